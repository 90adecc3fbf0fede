"""Waveform-level simulation of a link through a frequency-mixing reflector.

Everything upstream of the receiver is tracked symbolically as a finite sum
of real cosine tones (amplitude, frequency, phase). Propagation delays then
act as exact phase rotations and the mixing reflection is an exact tone
split, so the rendered passband waveform carries no resampling error. The
receiver chain (IQ demodulation, FIR low-pass, single-bin tone projection)
operates numerically on samples, which is the part this module exists to
verify against the closed-form frequency-domain picture.

Units are normalized: the symbol duration is 1, frequencies are in cycles
per symbol, and the carrier plus all mixing frequencies are integers so that
a one-symbol projection window is exactly leak-free.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.signal import oaconvolve

from .errors import ConfigurationError, PreconditionError

DEFAULT_CARRIER = 1024
DEFAULT_SAMPLE_RATE = 8192
DEFAULT_FILTER_TAPS = 1025


@dataclass(frozen=True)
class SignalGrid:
    """Normalized sampling setup: integer carrier, integer samples per symbol."""

    carrier: int = DEFAULT_CARRIER
    sample_rate: int = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        if not (isinstance(self.carrier, (int, np.integer)) and self.carrier > 0):
            raise ConfigurationError(f"carrier must be a positive integer, got {self.carrier!r}")
        if not (isinstance(self.sample_rate, (int, np.integer)) and self.sample_rate > 0):
            raise ConfigurationError(f"sample_rate must be a positive integer, got {self.sample_rate!r}")
        if self.sample_rate < 8 * self.carrier:
            raise ConfigurationError(
                f"sample_rate {self.sample_rate} < 8x carrier {self.carrier}; "
                "leave Nyquist margin for the mixing images"
            )

    def check_mixing(self, freq) -> int:
        """Validate a mixing frequency: integer, nonnegative, below the carrier."""
        if freq != int(freq) or freq < 0:
            raise ConfigurationError(f"mixing frequency must be a nonnegative integer, got {freq!r}")
        if freq >= self.carrier:
            raise ConfigurationError(
                f"mixing frequency {freq} >= carrier {self.carrier}; images would fold through DC"
            )
        return int(freq)


@dataclass(frozen=True)
class SinglePathLink:
    """One-path channel: amplitude gain and a sub-symbol delay."""

    gain: float
    delay: float

    def __post_init__(self):
        if self.gain < 0:
            raise ValueError(f"gain must be nonnegative, got {self.gain}")
        if not 0.0 <= self.delay < 1.0:
            raise ValueError(f"delay must lie in [0, 1) symbols, got {self.delay}")


@dataclass(frozen=True)
class Tone:
    """One real passband tone amplitude*cos(2*pi*frequency*t + phase)."""

    amplitude: float
    frequency: float
    phase: float

    def normalized(self) -> "Tone":
        """Canonical form with nonnegative frequency (cos is even)."""
        if self.frequency < 0:
            return Tone(self.amplitude, -self.frequency, -self.phase)
        return self


class ToneSum:
    """Immutable finite sum of real cosine tones."""

    def __init__(self, tones: Iterable[Tone]):
        self._tones = tuple(t.normalized() for t in tones)

    @property
    def tones(self) -> tuple[Tone, ...]:
        return self._tones

    def __add__(self, other: "ToneSum") -> "ToneSum":
        return ToneSum(self._tones + other.tones)

    def render(self, grid: SignalGrid, n_symbols: int, start_time: float = 0.0) -> "PassbandWaveform":
        """Sample the tone sum on the grid over n_symbols whole symbols."""
        if n_symbols < 1:
            raise ValueError(f"n_symbols must be >= 1, got {n_symbols}")
        n = grid.sample_rate * n_symbols
        t = start_time + np.arange(n) / grid.sample_rate
        samples = np.zeros(n)
        for tone in self._tones:
            samples += tone.amplitude * np.cos(2.0 * np.pi * tone.frequency * t + tone.phase)
        return PassbandWaveform(samples=samples, sample_rate=grid.sample_rate, start_time=start_time)


@dataclass(frozen=True)
class PassbandWaveform:
    """Real samples on the normalized grid, spanning whole symbols."""

    samples: np.ndarray
    sample_rate: int
    start_time: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if not np.all(np.isfinite(samples)):
            raise ValueError("waveform samples must be finite")
        if samples.size == 0 or samples.size % self.sample_rate != 0:
            raise ValueError(
                f"waveform length {samples.size} is not a whole number of symbols "
                f"at {self.sample_rate} samples/symbol"
            )
        object.__setattr__(self, "samples", samples)

    def times(self) -> np.ndarray:
        return self.start_time + np.arange(self.samples.size) / self.sample_rate


@dataclass(frozen=True)
class BasebandWaveform:
    """Complex baseband samples; same grid conventions as PassbandWaveform."""

    samples: np.ndarray
    sample_rate: int
    start_time: float = 0.0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=complex)
        if not np.all(np.isfinite(samples)):
            raise ValueError("waveform samples must be finite")
        if samples.size == 0 or samples.size % self.sample_rate != 0:
            raise ValueError(
                f"waveform length {samples.size} is not a whole number of symbols "
                f"at {self.sample_rate} samples/symbol"
            )
        object.__setattr__(self, "samples", samples)

    def times(self) -> np.ndarray:
        return self.start_time + np.arange(self.samples.size) / self.sample_rate


def upconvert(x: complex, grid: SignalGrid) -> ToneSum:
    """Carrier tone |x|*cos(2*pi*carrier*t + arg(x)) for a unit-modulus symbol."""
    if not np.isclose(abs(x), 1.0, rtol=0.0, atol=1e-12):
        raise ValueError(f"symbol must be unit modulus, got |x| = {abs(x)}")
    return ToneSum([Tone(amplitude=abs(x), frequency=float(grid.carrier), phase=float(np.angle(x)))])


def propagate_single_path(source: ToneSum, link: SinglePathLink) -> ToneSum:
    """Apply a one-path channel: scale amplitudes, rotate each tone by -2*pi*f*delay."""
    return ToneSum(
        Tone(link.gain * t.amplitude, t.frequency, t.phase - 2.0 * np.pi * t.frequency * link.delay)
        for t in source.tones
    )


def frm_reflect(source: ToneSum, mixing: float, grid: SignalGrid) -> ToneSum:
    """Reflection off a module whose gain swings as cos(2*pi*mixing*t).

    Each tone splits into half-amplitude images at frequency +/- mixing with
    the phase untouched; mixing 0 is the static mirror (identity).
    """
    mixing = grid.check_mixing(mixing)
    if mixing == 0:
        return source
    out = []
    for t in source.tones:
        out.append(Tone(0.5 * t.amplitude, t.frequency + mixing, t.phase))
        out.append(Tone(0.5 * t.amplitude, t.frequency - mixing, t.phase))
    return ToneSum(out)


def lowpass_taps(cutoff: float, sample_rate: int, num_taps: int = DEFAULT_FILTER_TAPS) -> np.ndarray:
    """Linear-phase Hamming-windowed-sinc low-pass, normalized to unit DC gain."""
    if num_taps < 3 or num_taps % 2 == 0:
        raise ConfigurationError(f"num_taps must be an odd integer >= 3, got {num_taps}")
    if not 0.0 < cutoff < sample_rate / 2.0:
        raise ConfigurationError(f"cutoff {cutoff} outside (0, Nyquist {sample_rate / 2})")
    n = np.arange(num_taps) - (num_taps - 1) / 2
    taps = 2.0 * cutoff / sample_rate * np.sinc(2.0 * cutoff / sample_rate * n)
    taps *= np.hamming(num_taps)
    return taps / np.sum(taps)


def filter_response(taps: np.ndarray, freq, sample_rate: int):
    """Complex frequency response of an FIR filter at the given frequencies,
    with the linear-phase group delay removed (symmetric taps make it real)."""
    n = np.arange(taps.size) - (taps.size - 1) / 2
    freq = np.asarray(freq, dtype=float)
    return np.sum(taps * np.exp(-2j * np.pi * freq[..., None] * n / sample_rate), axis=-1)


def iq_demod_lowpass(wave: PassbandWaveform, grid: SignalGrid, cutoff: float,
                     num_taps: int = DEFAULT_FILTER_TAPS) -> BasebandWaveform:
    """Mix the passband signal down by the carrier and low-pass filter.

    Returns the complex envelope: a passband tone cos(2*pi*(carrier+f)*t + p)
    comes out as exp(j*(2*pi*f*t + p)) for |f| inside the passband. The
    filter's group delay is compensated, so the output timeline matches the
    input; the first and last num_taps samples are transient and should be
    discarded before any measurement.
    """
    if cutoff >= grid.carrier:
        raise ConfigurationError(
            f"cutoff {cutoff} must stay below the carrier {grid.carrier} to reject the 2x carrier image"
        )
    taps = lowpass_taps(cutoff, grid.sample_rate, num_taps)
    t = wave.times()
    mixed = 2.0 * wave.samples * np.exp(-2j * np.pi * grid.carrier * t)
    group_delay = (num_taps - 1) // 2
    full = oaconvolve(mixed, taps, mode="full")
    filtered = full[group_delay:group_delay + mixed.size]
    return BasebandWaveform(samples=filtered, sample_rate=grid.sample_rate, start_time=wave.start_time)


def extract_tones(baseband: BasebandWaveform, offsets: Sequence[float]) -> dict[float, complex]:
    """Single-bin Fourier projection of the baseband waveform at each offset.

    The waveform must span an integer number of periods of every offset and
    offsets must be at least one cycle/symbol apart, which makes the
    projections exact (no spectral leakage between requested bins).
    """
    offsets = [float(f) for f in offsets]
    if len(set(offsets)) != len(offsets):
        raise PreconditionError("offsets must be distinct")
    n = baseband.samples.size
    window_symbols = n / baseband.sample_rate
    for f in offsets:
        cycles = f * window_symbols
        if abs(cycles - round(cycles)) > 1e-9:
            raise PreconditionError(
                f"window of {window_symbols} symbols does not cover whole periods of offset {f}"
            )
    for a in offsets:
        for b in offsets:
            if a < b and b - a < 1.0:
                raise PreconditionError(f"offsets {a} and {b} closer than 1 cycle/symbol")
    t = baseband.times()
    readout = {}
    for f in offsets:
        readout[f] = complex(np.mean(baseband.samples * np.exp(-2j * np.pi * f * t)))
    return readout


@dataclass(frozen=True)
class Reflector:
    """One mixing module in a scene: its two hops and its mixing frequency."""

    to_surface: SinglePathLink
    to_receiver: SinglePathLink
    mixing: float


@dataclass(frozen=True)
class LinkScene:
    """Direct path plus any number of mixing reflectors."""

    direct: SinglePathLink
    reflectors: tuple[Reflector, ...]
    grid: SignalGrid = SignalGrid()

    def __post_init__(self):
        object.__setattr__(self, "reflectors", tuple(self.reflectors))
        for r in self.reflectors:
            self.grid.check_mixing(r.mixing)
            if r.mixing == 0:
                raise ConfigurationError("reflector mixing frequency must be >= 1")
        mixings = [r.mixing for r in self.reflectors]
        if len(set(mixings)) != len(mixings):
            raise ConfigurationError("reflector mixing frequencies must be distinct")

    def offsets(self) -> list[float]:
        """Frequency offsets occupied at baseband: 0 and +/- each mixing frequency."""
        out = [0.0]
        for r in self.reflectors:
            out.extend([float(r.mixing), -float(r.mixing)])
        return out


def simulate_link(scene: LinkScene, x: complex, n_symbols: int = 3,
                  cutoff: float | None = None,
                  num_taps: int | None = None) -> dict[float, complex]:
    """Run the full transmit -> reflect -> receive chain and read out each bin.

    Composes upconversion, per-reflector two-hop propagation with the mixing
    reflection in between, superposition with the direct path, IQ
    demodulation with low-pass filtering, and leak-free tone projection over
    one symbol taken after the filter transient has been discarded. When
    num_taps is not given it scales with sample_rate over the gap between the
    cutoff and the widest mixing offset, which keeps the filter's passband
    deviation at the tones near 1e-4 regardless of the mixing frequencies.
    """
    grid = scene.grid
    carrier_tone = upconvert(x, grid)
    total = propagate_single_path(carrier_tone, scene.direct)
    for r in scene.reflectors:
        at_surface = propagate_single_path(carrier_tone, r.to_surface)
        reflected = frm_reflect(at_surface, r.mixing, grid)
        total = total + propagate_single_path(reflected, r.to_receiver)

    max_mixing = max((r.mixing for r in scene.reflectors), default=0)
    if cutoff is None:
        cutoff = 2.0 * max_mixing if max_mixing > 0 else grid.carrier / 8.0
    if cutoff <= max_mixing:
        raise ConfigurationError(f"cutoff {cutoff} does not pass the widest mixing offset {max_mixing}")
    if num_taps is None:
        gap = cutoff - max_mixing
        num_taps = max(int(np.ceil(4.0 * grid.sample_rate / gap)) | 1, 129)

    # the 1-symbol window starts on the first symbol boundary past the filter
    # transient and must end half a kernel before the rendered waveform does
    group_delay = (num_taps - 1) // 2
    start = -(-num_taps // grid.sample_rate) * grid.sample_rate
    min_symbols = -(-(start + grid.sample_rate + group_delay) // grid.sample_rate)
    n_symbols = max(n_symbols, min_symbols)

    wave = total.render(grid, n_symbols)
    baseband = iq_demod_lowpass(wave, grid, cutoff, num_taps)
    window = BasebandWaveform(
        samples=baseband.samples[start:start + grid.sample_rate],
        sample_rate=grid.sample_rate,
        start_time=baseband.start_time + start / grid.sample_rate,
    )
    return extract_tones(window, scene.offsets())
