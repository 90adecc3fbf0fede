"""One-pilot channel estimation on the frequency-decoupled receive stack.

Because every branch of the stacked observation sits in its own frequency
bin, a single unit-modulus pilot identifies all of them at once: the
estimators below act entrywise, so estimating one branch never touches the
samples of another. Least squares needs no prior; the Bayesian linear
estimator uses the branch variances of the rich-scattering model (1 for the
direct branch, 1/4 for every cascaded branch).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .multipath import StackLayout, complex_normal

DIRECT_PRIOR_VAR = 1.0
CASCADE_PRIOR_VAR = 0.25


@dataclass(frozen=True)
class Observation:
    """One received pilot snapshot y = sqrt(power) * h_all * pilot + noise."""

    y: np.ndarray
    pilot: complex
    power: float
    layout: StackLayout

    def __post_init__(self):
        y = np.asarray(self.y, dtype=complex)
        if y.shape != (self.layout.dim,):
            raise ValueError(f"observation has shape {y.shape}, layout expects ({self.layout.dim},)")
        if not np.isclose(abs(self.pilot), 1.0, rtol=0.0, atol=1e-12):
            raise ValueError(f"pilot must be unit modulus, got |x| = {abs(self.pilot)}")
        if self.power <= 0:
            raise ValueError(f"transmit power must be positive, got {self.power}")
        object.__setattr__(self, "y", y)


def make_observation(h_all: np.ndarray, pilot: complex, power: float,
                     layout: StackLayout, rng: np.random.Generator) -> Observation:
    """Form an observation of the stacked channel with unit-variance noise."""
    h_all = np.asarray(h_all, dtype=complex)
    noise = complex_normal(rng, h_all.shape)
    return Observation(y=np.sqrt(power) * h_all * pilot + noise,
                       pilot=pilot, power=power, layout=layout)


@dataclass
class EstimationReport:
    """Estimate plus per-branch error figures.

    nmse_theory and error_var_theory hold the model-implied values (the NMSE
    is the error variance over the branch's prior variance); nmse holds
    empirical values once a Monte-Carlo driver has accumulated them (None
    for a single shot).
    """

    h_all_hat: np.ndarray
    estimator: str
    nmse_theory: dict[str, float]
    error_var_theory: dict[str, float]
    nmse: dict[str, float] | None = None


def ls_estimate(obs: Observation) -> EstimationReport:
    """Least squares: conj(pilot)/sqrt(power) * y, unbiased, error variance 1/power."""
    h_hat = np.conj(obs.pilot) / np.sqrt(obs.power) * obs.y
    theory = {}
    raw = {}
    for name, _ in obs.layout.branches():
        prior = DIRECT_PRIOR_VAR if name == "direct" else CASCADE_PRIOR_VAR
        raw[name] = 1.0 / obs.power
        theory[name] = raw[name] / prior
    return EstimationReport(h_all_hat=h_hat, estimator="ls", nmse_theory=theory,
                            error_var_theory=raw)


def mmse_coefficients(layout: StackLayout, power: float,
                      direct_var: float = DIRECT_PRIOR_VAR,
                      cascade_var: float = CASCADE_PRIOR_VAR) -> np.ndarray:
    """Entrywise Bayesian scaling prior*sqrt(p)/(p*prior + 1), shape (dim,)."""
    if direct_var <= 0 or cascade_var <= 0:
        raise ValueError("prior variances must be positive")
    coeffs = np.empty(layout.dim)
    for name, sl in layout.branches():
        prior = direct_var if name == "direct" else cascade_var
        coeffs[sl] = prior * np.sqrt(power) / (power * prior + 1.0)
    return coeffs


def mmse_estimate(obs: Observation, direct_var: float = DIRECT_PRIOR_VAR,
                  cascade_var: float = CASCADE_PRIOR_VAR) -> EstimationReport:
    """Bayesian linear estimator with per-branch priors.

    Each entry is scaled by the linear MMSE coefficient for a zero-mean
    branch with the given prior variance under unit-variance noise. The
    resulting error variance is prior/(1+p*prior), i.e. an NMSE of
    1/(1+p*prior) regardless of the branch's actual shape, since only second
    moments enter.
    """
    p = obs.power
    h_hat = mmse_coefficients(obs.layout, p, direct_var, cascade_var) * np.conj(obs.pilot) * obs.y
    theory = {}
    raw = {}
    for name, _ in obs.layout.branches():
        prior = direct_var if name == "direct" else cascade_var
        theory[name] = 1.0 / (1.0 + p * prior)
        raw[name] = prior * theory[name]
    return EstimationReport(h_all_hat=h_hat, estimator="mmse", nmse_theory=theory,
                            error_var_theory=raw)


def nmse(estimate: np.ndarray, truth: np.ndarray) -> float:
    """Energy of the error normalized by the energy of the truth.

    Both arrays may carry a leading trial axis; the ratio then aggregates
    over trials, which is the estimator of E||err||^2 / E||truth||^2.
    """
    estimate = np.asarray(estimate)
    truth = np.asarray(truth)
    if estimate.shape != truth.shape:
        raise ValueError(f"shape mismatch: estimate {estimate.shape} vs truth {truth.shape}")
    denom = float(np.sum(np.abs(truth) ** 2))
    if denom == 0.0:
        raise ValueError("truth has zero energy; NMSE undefined")
    return float(np.sum(np.abs(estimate - truth) ** 2)) / denom


def branch_nmse(estimates: np.ndarray, truths: np.ndarray, layout: StackLayout) -> dict[str, float]:
    """Per-branch NMSE over a batch of trials, keyed by branch name."""
    estimates = np.atleast_2d(np.asarray(estimates))
    truths = np.atleast_2d(np.asarray(truths))
    return {name: nmse(estimates[:, sl], truths[:, sl]) for name, sl in layout.branches()}
