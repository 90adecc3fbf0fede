"""Deterministic line-of-sight channels from scene coordinates.

Each link is a single ray: its amplitude is (distance/d0)^(-alpha) applied
directly to the amplitude (not the power), and its phase is the carrier
wavenumber times the distance. The surface-to-receiver rays use the shifted
wavenumbers 2*pi*(carrier +/- mixing)/c, which is the only place the mixing
frequency enters the geometry. The classical static-mirror combined gain is
included as the baseline that exhibits two-ray interference fading.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .multipath import ChannelSet, FrequencyPlan

SPEED_OF_LIGHT = 3.0e8  # m/s


@dataclass(frozen=True)
class SceneGeometry:
    """3D placement of the user, the receiver array, and the module grid.

    The m-th receive antenna extends from `bs` along +x in steps of
    bs_spacing; the (v, s)-th module extends from `surface` along +y and +z
    in steps of surface_spacing.
    """

    user: np.ndarray
    bs: np.ndarray
    surface: np.ndarray
    bs_spacing: float = 0.1
    surface_spacing: float = 0.1
    m: int = 1
    v: int = 1
    s: int = 1

    def __post_init__(self):
        for name in ("user", "bs", "surface"):
            p = np.asarray(getattr(self, name), dtype=float)
            if p.shape != (3,):
                raise ValueError(f"{name} must be a 3D coordinate, got shape {p.shape}")
            object.__setattr__(self, name, p)
        if self.bs_spacing <= 0 or self.surface_spacing <= 0:
            raise ValueError("antenna and module spacings must be positive")
        if min(self.m, self.v, self.s) < 1:
            raise ValueError("m, v, s must all be >= 1")

    def bs_positions(self) -> np.ndarray:
        """Antenna coordinates, shape (M, 3)."""
        out = np.tile(self.bs, (self.m, 1))
        out[:, 0] += self.bs_spacing * np.arange(self.m)
        return out

    def surface_positions(self) -> np.ndarray:
        """Module coordinates, shape (V, S, 3)."""
        out = np.tile(self.surface, (self.v, self.s, 1))
        out[:, :, 1] += self.surface_spacing * np.arange(self.v)[:, None]
        out[:, :, 2] += self.surface_spacing * np.arange(self.s)[None, :]
        return out

    def replace_user(self, user) -> "SceneGeometry":
        return SceneGeometry(user=np.asarray(user, dtype=float), bs=self.bs,
                             surface=self.surface, bs_spacing=self.bs_spacing,
                             surface_spacing=self.surface_spacing,
                             m=self.m, v=self.v, s=self.s)


@dataclass(frozen=True)
class PathlossModel:
    """Reference-distance pathloss with configurable exponent.

    amplitude_law True applies (d/d0)^(-alpha) to the ray amplitude, the
    literal reading of the channel model here; False treats it as a power
    loss, i.e. amplitude (d/d0)^(-alpha/2).
    """

    reference_distance: float = 50.0
    exponent: float = 2.0
    speed: float = SPEED_OF_LIGHT
    amplitude_law: bool = True

    def __post_init__(self):
        if self.reference_distance <= 0:
            raise ValueError(f"reference distance must be positive, got {self.reference_distance}")
        if self.exponent <= 0:
            raise ValueError(f"pathloss exponent must be positive, got {self.exponent}")
        if self.speed <= 0:
            raise ValueError(f"propagation speed must be positive, got {self.speed}")

    def amplitude(self, distance) -> np.ndarray:
        exp = self.exponent if self.amplitude_law else 0.5 * self.exponent
        return (np.asarray(distance) / self.reference_distance) ** (-exp)

    def wavenumber(self, freq):
        return 2.0 * np.pi * freq / self.speed


def los_component(src, dst, wavenumber: float, pathloss: PathlossModel) -> complex:
    """Single-ray channel (d/d0)^(-alpha) * exp(-j * wavenumber * d)."""
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    d = float(np.linalg.norm(src - dst))
    if d == 0.0:
        raise ValueError("source and destination coincide; ray channel undefined")
    return complex(pathloss.amplitude(d) * np.exp(-1j * wavenumber * d))


def assemble_two_path_channels(geom: SceneGeometry, pathloss: PathlossModel,
                               plan: FrequencyPlan) -> ChannelSet:
    """Deterministic ChannelSet for the scene under the single-ray model.

    plan.carrier is the carrier in the same units as pathloss.speed (Hz when
    speed is m/s); the +/- module->receiver rays differ only through the
    shifted wavenumbers, so their magnitudes are identical and the whole
    surface->receiver side is fixed by the (static) geometry.
    """
    bs_pos = geom.bs_positions()            # (M, 3)
    surf_pos = geom.surface_positions()     # (V, S, 3)
    if (geom.v, geom.s) != (plan.v, plan.s):
        raise ValueError(
            f"geometry grid {geom.v}x{geom.s} does not match plan grid {plan.v}x{plan.s}"
        )

    kappa = pathloss.wavenumber(plan.carrier)
    d_user_bs = np.linalg.norm(geom.user - bs_pos, axis=-1)               # (M,)
    d_user_surf = np.linalg.norm(geom.user - surf_pos, axis=-1)           # (V, S)
    d_surf_bs = np.linalg.norm(surf_pos[:, :, None, :] - bs_pos, axis=-1)  # (V, S, M)

    direct = pathloss.amplitude(d_user_bs) * np.exp(-1j * kappa * d_user_bs)
    user_surface = pathloss.amplitude(d_user_surf) * np.exp(-1j * kappa * d_user_surf)

    mixing = plan.mixing_frequencies().reshape(plan.v, plan.s, 1)
    amp_sb = pathloss.amplitude(d_surf_bs)
    to_bs_plus = amp_sb * np.exp(-1j * pathloss.wavenumber(plan.carrier + mixing) * d_surf_bs)
    to_bs_minus = amp_sb * np.exp(-1j * pathloss.wavenumber(plan.carrier - mixing) * d_surf_bs)

    return ChannelSet(direct=direct, user_surface=user_surface,
                      to_bs_plus=to_bs_plus, to_bs_minus=to_bs_minus)


def classical_two_path_gain(geom: SceneGeometry, pathloss: PathlossModel,
                            carrier: float, user=None) -> float:
    """Power gain |h_direct + h_reflected|^2 of the static-mirror two-ray link.

    Uses the first antenna and first module, a unit-amplitude reflection and
    no added reflection phase. Both rays share the carrier wavenumber, so the
    gain fluctuates with the phase difference of the two path lengths; this
    is the fading baseline the frequency-mixing branches avoid.
    """
    user = geom.user if user is None else np.asarray(user, dtype=float)
    kappa = pathloss.wavenumber(carrier)
    direct = los_component(user, geom.bs, kappa, pathloss)
    to_surface = los_component(user, geom.surface, kappa, pathloss)
    to_bs = los_component(geom.surface, geom.bs, kappa, pathloss)
    return float(np.abs(direct + to_surface * to_bs) ** 2)
