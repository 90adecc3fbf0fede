"""Achievable rate of the stacked link: Monte Carlo, closed-form bound, baseline.

With perfect receive-side channel knowledge and maximum-ratio combining over
every frequency bin, the rate is E[log2(1 + p * ||h_all||^2)]. Jensen's
inequality bounds it by log2(1 + p * E||h_all||^2), and the stacked second
moment is m * (1 + v*s/2): m from the direct branch plus 2*v*s cascaded
branches of variance 1/4 each per antenna. The conventional receive-array
baseline drops the surface entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .multipath import FrequencyPlan, complex_normal, draw_stacked_channels

# trials per vectorized chunk; keeps the (chunk, v, s, m, paths) draws in
# tens of megabytes
_CHUNK = 500


@dataclass(frozen=True)
class RatePoint:
    mean: float
    std_error: float


@dataclass
class RateCurve:
    """Sweep of the Monte-Carlo rate, its upper bound, and the array baseline."""

    powers_db: np.ndarray
    rate_mc: np.ndarray
    rate_mc_se: np.ndarray
    rate_bound: np.ndarray
    rate_mimo: np.ndarray
    rate_mimo_se: np.ndarray
    trials: int


def expected_stacked_energy(m: int, s: int, v: int) -> float:
    """E||h_all||^2 = m * (1 + s*v/2) under the rich-scattering model."""
    return m * (1.0 + s * v / 2.0)


def rate_upper_bound(m: int, s: int, v: int, power: float) -> float:
    """Jensen bound log2(1 + p * m * (1 + s*v/2)); s*v may be zero."""
    if m < 1 or s < 0 or v < 0 or power < 0:
        raise ValueError("need m >= 1, s, v >= 0 and power >= 0")
    return math.log2(1.0 + power * expected_stacked_energy(m, s, v))


def _mean_log_rate(norms_sq: np.ndarray, power: float) -> RatePoint:
    terms = np.log2(1.0 + power * norms_sq)
    mean = math.fsum(terms) / terms.size
    var = math.fsum((t - mean) ** 2 for t in terms) / max(terms.size - 1, 1)
    return RatePoint(mean=mean, std_error=math.sqrt(var / terms.size))


def stacked_channel_energies(plan: FrequencyPlan, m: int, trials: int,
                             rng: np.random.Generator, paths: int = 256,
                             amplitude_law: str = "rayleigh") -> np.ndarray:
    """||h_all||^2 for `trials` independent channel realizations."""
    out = np.empty(trials)
    done = 0
    while done < trials:
        n = min(_CHUNK, trials - done)
        h = draw_stacked_channels(plan, m, n, rng, paths=paths, amplitude_law=amplitude_law)
        out[done:done + n] = np.sum(np.abs(h) ** 2, axis=1)
        done += n
    return out


def rate_mc(plan: FrequencyPlan, m: int, power: float, trials: int,
            rng: np.random.Generator, paths: int = 256,
            amplitude_law: str = "rayleigh") -> RatePoint:
    """Monte-Carlo estimate of E[log2(1 + p * ||h_all||^2)] with its standard error."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if power < 0:
        raise ValueError(f"power must be nonnegative, got {power}")
    norms = stacked_channel_energies(plan, m, trials, rng, paths, amplitude_law)
    return _mean_log_rate(norms, power)


def mimo_baseline(m: int, power: float, trials: int, rng: np.random.Generator) -> RatePoint:
    """Rate of the plain m-antenna link, E[log2(1 + p * ||h_d||^2)], h_d i.i.d. CN(0,1)."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    h = complex_normal(rng, (trials, m))
    return _mean_log_rate(np.sum(np.abs(h) ** 2, axis=1), power)


def rate_mc_with_estimates(plan: FrequencyPlan, m: int, power: float, trials: int,
                           rng: np.random.Generator, paths: int = 256,
                           estimator: str = "mmse") -> RatePoint:
    """Rate when the combiner uses estimated channels instead of the truth.

    The receiver matched-filters with the one-pilot estimate, so the
    post-combining SNR is p*|est^H h|^2 / ||est||^2 under unit-variance
    noise. This variant is outside the closed-form analysis (which assumes
    perfect channel knowledge) and is provided for exploration only.
    """
    from .estimation import mmse_coefficients
    from .multipath import StackLayout

    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if power <= 0:
        raise ValueError(f"power must be positive, got {power}")
    layout = StackLayout(v=plan.v, s=plan.s, m=m)
    if estimator == "mmse":
        coeff = mmse_coefficients(layout, power)
    elif estimator == "ls":
        coeff = np.full(layout.dim, 1.0 / np.sqrt(power))
    else:
        raise ValueError(f"unknown estimator {estimator!r}; expected 'ls' or 'mmse'")
    snrs = np.empty(trials)
    done = 0
    while done < trials:
        n = min(_CHUNK, trials - done)
        h = draw_stacked_channels(plan, m, n, rng, paths=paths)
        est = coeff * (np.sqrt(power) * h + complex_normal(rng, h.shape))
        align = np.abs(np.sum(np.conj(est) * h, axis=1)) ** 2
        snrs[done:done + n] = power * align / np.sum(np.abs(est) ** 2, axis=1)
        done += n
    terms = np.log2(1.0 + snrs)
    mean = math.fsum(terms) / trials
    var = math.fsum((t - mean) ** 2 for t in terms) / max(trials - 1, 1)
    return RatePoint(mean=mean, std_error=math.sqrt(var / trials))


def rate_curve(plan: FrequencyPlan, m: int, powers: np.ndarray, trials: int,
               rng: np.random.Generator, paths: int = 256,
               amplitude_law: str = "rayleigh") -> RateCurve:
    """Evaluate the rate sweep reusing one batch of channel draws across powers.

    The channel statistics do not depend on the transmit power, so a single
    set of realizations evaluated at every power gives valid (and smoother)
    curves at a fraction of the drawing cost.
    """
    powers = np.asarray(powers, dtype=float)
    norms = stacked_channel_energies(plan, m, trials, rng, paths, amplitude_law)
    mimo_norms = np.sum(np.abs(complex_normal(rng, (trials, m))) ** 2, axis=1)
    mc = np.empty(powers.size)
    mc_se = np.empty(powers.size)
    mimo = np.empty(powers.size)
    mimo_se = np.empty(powers.size)
    bound = np.empty(powers.size)
    for i, p in enumerate(powers):
        point = _mean_log_rate(norms, p)
        mc[i], mc_se[i] = point.mean, point.std_error
        base = _mean_log_rate(mimo_norms, p)
        mimo[i], mimo_se[i] = base.mean, base.std_error
        bound[i] = rate_upper_bound(m, plan.s, plan.v, p)
    return RateCurve(
        powers_db=10.0 * np.log10(powers),
        rate_mc=mc, rate_mc_se=mc_se,
        rate_bound=bound,
        rate_mimo=mimo, rate_mimo_se=mimo_se,
        trials=trials,
    )
