"""Statistics of frequency-shifted reflected channels.

A reflecting module that multiplies the incident signal by a unit cosine at
frequency f splits each propagation path into a pair of images at carrier +/- f.
Both images ride on the same physical paths (same amplitudes, same delays), so
they are correlated random variables. This module provides the closed-form
moments of uniformly distributed path delays, the resulting pair-correlation
law, Monte-Carlo generation of the multipath channels, and the correlation
matrix of the full set of reflected branches together with its condition
number.

Conventions: a channel is a sum of per-path phasors a_l * exp(-j*2*pi*f*tau_l)
with E{a_l^2} = 1/L and tau_l uniform on [0, tau_max]. Frequencies and delays
only enter through their products, so any consistent unit system works.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

# A Rayleigh variable with this scale is the magnitude of a unit-variance
# complex Gaussian.
_RAYLEIGH_SCALE = np.sqrt(0.5)

AMPLITUDE_LAWS = ("rayleigh", "constant")
CORRELATION_MODELS = ("pair_only", "shared_scatterers")


@dataclass(frozen=True)
class FrequencyPlan:
    """Mixing-frequency layout of a surface with v x s reflecting modules.

    The (row, col) module mixes at ((row-1)*s + col) * spacing, so mixing
    frequencies are strictly increasing in the flattened module index. The
    coherence spacing 1/(2*tau_max) is the granularity at which a +/- image
    pair decorrelates; spacing_ratio is the mixing-frequency spacing in those
    units.
    """

    carrier: float
    v: int
    s: int
    spacing: float
    tau_max: float
    bandwidth: float = 0.0

    def __post_init__(self):
        if self.v < 1 or self.s < 1:
            raise ValueError(f"module grid must be at least 1x1, got {self.v}x{self.s}")
        if self.tau_max <= 0:
            raise ValueError(f"tau_max must be positive, got {self.tau_max}")
        if self.spacing <= 0:
            raise ValueError(f"frequency spacing must be positive, got {self.spacing}")
        if self.bandwidth < 0:
            raise ValueError(f"bandwidth must be nonnegative, got {self.bandwidth}")
        if self.spacing <= self.bandwidth:
            raise ValueError(
                "frequency spacing must exceed the signal bandwidth "
                f"({self.spacing} <= {self.bandwidth}); branches would overlap"
            )

    @property
    def coherence_spacing(self) -> float:
        return 1.0 / (2.0 * self.tau_max)

    @property
    def spacing_ratio(self) -> float:
        return self.spacing / self.coherence_spacing

    @property
    def n_modules(self) -> int:
        return self.v * self.s

    def mixing_frequency(self, row: int, col: int) -> float:
        """Mixing frequency of the (row, col) module, indices starting at 1."""
        if not (1 <= row <= self.v and 1 <= col <= self.s):
            raise ValueError(f"module index ({row},{col}) outside {self.v}x{self.s} grid")
        return ((row - 1) * self.s + col) * self.spacing

    def mixing_frequencies(self) -> np.ndarray:
        """All module mixing frequencies, flattened row-major, shape (v*s,)."""
        return np.arange(1, self.n_modules + 1, dtype=float) * self.spacing

    def shifts(self) -> np.ndarray:
        """Signed frequency shifts in branch order: +f11, -f11, +f12, -f12, ..."""
        f = self.mixing_frequencies()
        return np.stack([f, -f], axis=1).ravel()


class TrigMoments(NamedTuple):
    cos: float
    sin: float
    cos_sq: float
    sin_sq: float


def uniform_delay_moments(freq: float, spread: float) -> TrigMoments:
    """Moments of cos/sin(2*pi*freq*tau) for tau uniform on [0, spread].

    Closed forms:
        E{cos}   = sin(x)/x              with x = 2*pi*freq*spread
        E{sin}   = (1 - cos(x))/x
        E{cos^2} = 1/2 + sin(2x)/(4x)
        E{sin^2} = 1/2 - sin(2x)/(4x)
    The freq*spread -> 0 limit is (1, 0, 1, 0).
    """
    x = 2.0 * np.pi * freq * spread
    if x == 0.0:
        return TrigMoments(1.0, 0.0, 1.0, 0.0)
    half = np.sin(0.5 * x)
    # (1 - cos x)/x written as 2 sin^2(x/2)/x to survive x near multiples of 2*pi
    ripple = np.sin(2.0 * x) / (4.0 * x)
    return TrigMoments(
        cos=np.sin(x) / x,
        sin=2.0 * half * half / x,
        cos_sq=0.5 + ripple,
        sin_sq=0.5 - ripple,
    )


def delay_phasor_mean(freq, tau_max: float):
    """E{exp(-j*2*pi*freq*tau)} for tau uniform on [0, tau_max].

    Accepts scalar or array freq; magnitude is always in [0, 1] and the value
    is exactly 0 when freq*tau_max is a nonzero integer.
    """
    if tau_max <= 0:
        raise ValueError(f"tau_max must be positive, got {tau_max}")
    x = 2.0 * np.pi * np.asarray(freq, dtype=float) * tau_max
    half = np.sin(0.5 * x)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(
            x == 0.0,
            1.0 + 0.0j,
            (np.sin(np.where(x == 0.0, 1.0, x)) - 2.0j * half * half)
            / np.where(x == 0.0, 1.0, x),
        )
    if np.isscalar(freq) or np.ndim(freq) == 0:
        return complex(out)
    return out


def pair_correlation(shift: float, tau_max: float) -> float:
    """Correlation magnitude between the +shift and -shift images of one channel.

    Equals |E{g+ g-*}| = |sin(2*pi*shift*tau_max)| / (2*pi*shift*tau_max); it
    is exactly zero whenever shift is a positive integer multiple of the
    coherence spacing 1/(2*tau_max), which is the design rule for picking
    mixing frequencies.
    """
    if tau_max <= 0:
        raise ValueError(f"tau_max must be positive, got {tau_max}")
    if shift < 0:
        raise ValueError(f"shift must be nonnegative, got {shift}")
    x = 2.0 * np.pi * shift * tau_max
    if x == 0.0:
        return 1.0
    return abs(np.sin(x)) / x


def complex_normal(rng: np.random.Generator, shape=()) -> np.ndarray:
    """I.i.d. circularly symmetric complex Gaussians with unit variance."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@dataclass(frozen=True)
class PathSet:
    """Discrete multipath description: per-path amplitudes and delays."""

    amplitudes: np.ndarray
    delays: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=float)
        delays = np.asarray(self.delays, dtype=float)
        if amplitudes.shape != delays.shape or amplitudes.ndim != 1:
            raise ValueError("amplitudes and delays must be 1-d arrays of equal length")
        if not np.all(np.isfinite(amplitudes)):
            raise ValueError("path amplitudes must be finite")
        if np.any(delays < 0):
            raise ValueError("path delays must be nonnegative")
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "delays", delays)

    def __len__(self) -> int:
        return self.amplitudes.size

    def response(self, freq: float) -> complex:
        """Narrowband channel at the given absolute frequency."""
        return complex(np.sum(self.amplitudes * np.exp(-2j * np.pi * freq * self.delays)))


def draw_path_set(count: int, tau_max: float, rng: np.random.Generator,
                  amplitude_law: str = "rayleigh") -> PathSet:
    """Draw `count` paths with delays uniform on [0, tau_max] and E{a^2} = 1/count.

    amplitude_law "rayleigh" draws each amplitude as the magnitude of a
    CN(0, 1/count) variable; "constant" fixes all amplitudes to 1/sqrt(count).
    """
    if count < 1:
        raise ValueError(f"path count must be >= 1, got {count}")
    if tau_max <= 0:
        raise ValueError(f"tau_max must be positive, got {tau_max}")
    amplitudes = _draw_amplitudes(rng, (count,), amplitude_law)
    delays = rng.uniform(0.0, tau_max, size=count)
    return PathSet(amplitudes=amplitudes, delays=delays)


def _draw_amplitudes(rng, shape, amplitude_law):
    if amplitude_law == "rayleigh":
        amps = rng.rayleigh(_RAYLEIGH_SCALE, size=shape)
    elif amplitude_law == "constant":
        amps = np.ones(shape)
    else:
        raise ValueError(f"unknown amplitude law {amplitude_law!r}; expected one of {AMPLITUDE_LAWS}")
    return amps / np.sqrt(shape[-1])


def evaluate_at_shift(paths: PathSet, carrier: float, shift: float) -> complex:
    """Channel seen by the image that the mixer placed at carrier + shift."""
    return paths.response(carrier + shift)


@dataclass(frozen=True)
class StackLayout:
    """Branch layout of the stacked receive vector.

    Order: M direct entries, then for each module (row-major) the +shift
    cascade block and the -shift cascade block, M entries each.
    """

    v: int
    s: int
    m: int

    @property
    def dim(self) -> int:
        return (2 * self.v * self.s + 1) * self.m

    @property
    def direct(self) -> slice:
        return slice(0, self.m)

    def branches(self) -> Iterator[tuple[str, slice]]:
        yield "direct", slice(0, self.m)
        offset = self.m
        for row in range(1, self.v + 1):
            for col in range(1, self.s + 1):
                for sign in ("plus", "minus"):
                    yield f"{sign}_{row}_{col}", slice(offset, offset + self.m)
                    offset += self.m

    def cascade_slice(self) -> slice:
        """All cascaded entries (everything after the direct block)."""
        return slice(self.m, self.dim)


def stack_branches(direct: np.ndarray, cascade_plus: np.ndarray,
                   cascade_minus: np.ndarray) -> np.ndarray:
    """Stack direct (..., M) and cascade (..., V, S, M) blocks into (..., (2VS+1)M)."""
    paired = np.stack([cascade_plus, cascade_minus], axis=-2)  # (..., V, S, 2, M)
    flat = paired.reshape(*paired.shape[:-4], -1)
    return np.concatenate([direct, flat], axis=-1)


@dataclass(frozen=True)
class ChannelSet:
    """One realization of every channel in the link.

    direct: (M,) user->receiver, user_surface: (V,S) user->module,
    to_bs_plus/minus: (V,S,M) module->receiver at the shifted carriers.
    Cascades are half the product of the two hops; the factor 1/2 is the
    amplitude that a unit-swing cosine mixer puts into each image.
    """

    direct: np.ndarray
    user_surface: np.ndarray
    to_bs_plus: np.ndarray
    to_bs_minus: np.ndarray

    def __post_init__(self):
        v, s = np.shape(self.user_surface)
        if np.shape(self.to_bs_plus) != (v, s, self.m) or np.shape(self.to_bs_minus) != (v, s, self.m):
            raise ValueError("to_bs arrays must have shape (V, S, M)")

    @property
    def m(self) -> int:
        return np.shape(self.direct)[0]

    @property
    def layout(self) -> StackLayout:
        v, s = np.shape(self.user_surface)
        return StackLayout(v=v, s=s, m=self.m)

    @property
    def cascade_plus(self) -> np.ndarray:
        return 0.5 * self.user_surface[:, :, None] * self.to_bs_plus

    @property
    def cascade_minus(self) -> np.ndarray:
        return 0.5 * self.user_surface[:, :, None] * self.to_bs_minus

    def stacked(self) -> np.ndarray:
        """Full receive-side channel vector, length (2VS+1)M."""
        return stack_branches(self.direct, self.cascade_plus, self.cascade_minus)


def _draw_reflected(plan: FrequencyPlan, m: int, paths: int, trials: int,
                    rng: np.random.Generator, amplitude_law: str):
    """Per-module multipath draws shared by the +/- images.

    Returns (to_bs_plus, to_bs_minus) of shape (trials, V, S, M). Each
    (module, antenna) slot owns an independent path set; the two images of a
    slot reuse its amplitudes and delays, which is what correlates them.
    """
    shape = (trials, plan.v, plan.s, m, paths)
    amps = _draw_amplitudes(rng, shape, amplitude_law)
    delays = rng.uniform(0.0, plan.tau_max, size=shape)
    freqs = plan.mixing_frequencies().reshape(1, plan.v, plan.s, 1, 1)
    carrier_phase = np.exp(-2j * np.pi * plan.carrier * delays)
    shift_phase = np.exp(-2j * np.pi * freqs * delays)
    base = amps * carrier_phase
    g_plus = np.sum(base * shift_phase, axis=-1)
    g_minus = np.sum(base * np.conj(shift_phase), axis=-1)
    return g_plus, g_minus


def draw_channel_set(plan: FrequencyPlan, m: int, rng: np.random.Generator,
                     paths: int = 256, amplitude_law: str = "rayleigh") -> ChannelSet:
    """Draw one channel realization under the rich-scattering model.

    The direct and user->module channels are i.i.d. CN(0,1) (their own path
    sums in the large-path limit); the module->receiver channels are explicit
    sums of `paths` paths so the +/- images of one module/antenna pair carry
    the correlation dictated by pair_correlation.
    """
    direct = complex_normal(rng, (m,))
    user_surface = complex_normal(rng, (plan.v, plan.s))
    g_plus, g_minus = _draw_reflected(plan, m, paths, 1, rng, amplitude_law)
    return ChannelSet(
        direct=direct,
        user_surface=user_surface,
        to_bs_plus=g_plus[0],
        to_bs_minus=g_minus[0],
    )


def draw_stacked_channels(plan: FrequencyPlan, m: int, trials: int,
                          rng: np.random.Generator, paths: int = 256,
                          amplitude_law: str = "rayleigh") -> np.ndarray:
    """Batch of stacked channel vectors, shape (trials, (2VS+1)M).

    Same statistics as draw_channel_set; vectorized over trials for the
    Monte-Carlo drivers. Memory grows as trials*V*S*M*paths, so callers
    should chunk large runs.
    """
    direct = complex_normal(rng, (trials, m))
    user_surface = complex_normal(rng, (trials, plan.v, plan.s))
    g_plus, g_minus = _draw_reflected(plan, m, paths, trials, rng, amplitude_law)
    z_plus = 0.5 * user_surface[..., None] * g_plus
    z_minus = 0.5 * user_surface[..., None] * g_minus
    return stack_branches(direct, z_plus, z_minus)


def reflected_correlation_matrix(plan: FrequencyPlan, model: str = "pair_only") -> np.ndarray:
    """Correlation matrix of the 2VS reflected branches, in shift order.

    "pair_only": only the two images of the same module are correlated
    (independent scatterers per module), giving 2x2 blocks on the diagonal.
    "shared_scatterers": every branch sees the same delay population, so entry
    (a, b) is the delay-phasor mean at the shift difference. The pair_only
    model is exactly the identity when spacing_ratio is a positive integer.
    """
    n = 2 * plan.n_modules
    if model == "pair_only":
        f = np.eye(n, dtype=complex)
        for k, freq in enumerate(plan.mixing_frequencies()):
            c = delay_phasor_mean(2.0 * freq, plan.tau_max)
            f[2 * k, 2 * k + 1] = c
            f[2 * k + 1, 2 * k] = np.conj(c)
    elif model == "shared_scatterers":
        shifts = plan.shifts()
        f = delay_phasor_mean(shifts[:, None] - shifts[None, :], plan.tau_max)
    else:
        raise ValueError(f"unknown correlation model {model!r}; expected one of {CORRELATION_MODELS}")
    return _clip_to_psd(f)


def _clip_to_psd(f: np.ndarray) -> np.ndarray:
    """Zero out tiny negative eigenvalues left by rounding; report real clips."""
    evals, evecs = np.linalg.eigh(f)
    if evals[0] >= 0.0:
        return f
    scale = max(evals[-1], 1.0)
    if evals[0] < -1e-10 * scale:
        raise ValueError(f"correlation matrix is not PSD (min eigenvalue {evals[0]:.3e})")
    if evals[0] < -f.shape[0] * np.finfo(float).eps * scale:
        # beyond plain eigendecomposition rounding: say so
        warnings.warn(
            f"clipping {np.sum(evals < 0)} tiny negative eigenvalue(s) "
            f"(min {evals[0]:.3e}) from the correlation matrix",
            stacklevel=2,
        )
    clipped = (evecs * np.maximum(evals, 0.0)) @ evecs.conj().T
    # restore the exact unit diagonal lost to rounding
    np.fill_diagonal(clipped, 1.0)
    return clipped


def condition_number_db(f: np.ndarray) -> float:
    """Ratio of extreme singular values in dB; +inf if the matrix is singular."""
    f = np.asarray(f)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {f.shape}")
    sv = np.linalg.svd(f, compute_uv=False)
    # numerical-rank cutoff: singular values at rounding level count as zero
    if sv[-1] <= sv[0] * f.shape[0] * np.finfo(float).eps:
        return np.inf
    return 10.0 * np.log10(sv[0] / sv[-1])
