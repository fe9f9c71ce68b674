"""Noise-error analysis for reconstructions from noisy potentials.

Diagonal noise ``w`` perturbs ``A_h`` by ``-diag(w)``, so sorted eigenvalues of
the clean and noisy matrices differ by at most ``max|w_j|``. Combined with a
probabilistic amplitude bound ``B`` on the noise this gives, per matched mode,
``|kappa_noisy - kappa_clean| < B / (sqrt(2) kappa_noisy)`` and an
a-posteriori bound on ``||y_h(noisy) - y_h(clean)||_2`` that uses only the
noisy spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import NegativeSpectrum, scsa
from .errors import ConditionViolation, DomainError
from .operators import D2Matrix
from .signals import NoiseModel, SampledSignal, add_noise, sigma_for_snr

THREE_SIGMA_PROBABILITY = 0.997


@dataclass(frozen=True)
class ChebyshevBound:
    """``B = max(|mu - gamma sigma|, |mu + gamma sigma|)`` holding with probability ``p``."""

    gamma: float
    p: float
    B: float
    mu: float = 0.0
    sigma: float = 0.0
    rule: str = "chebyshev"


@dataclass(frozen=True)
class NoiseErrorBound:
    h: float
    dx: float
    bound_value: float
    per_mode_terms: np.ndarray
    probability_floor: float


@dataclass(frozen=True)
class WeylGapReport:
    gaps: np.ndarray
    max_noise: float
    slack: float
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def chebyshev_bound(mu, sigma, gamma) -> ChebyshevBound:
    """Amplitude bound from the Bienaymé-Chebyshev inequality.

    ``p = 1 - 1/gamma^2`` is returned as is, even when ``gamma <= 1`` makes
    it vacuous.
    """
    if not sigma >= 0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    if not gamma > 0:
        raise DomainError(f"gamma must be > 0, got {gamma}")
    B = max(abs(mu - gamma * sigma), abs(mu + gamma * sigma))
    return ChebyshevBound(float(gamma), 1.0 - 1.0 / gamma**2, float(B), float(mu), float(sigma))


def three_sigma_bound(sigma) -> ChebyshevBound:
    """Zero-mean Gaussian version: ``B = 3 sigma`` at probability 0.997."""
    if not sigma >= 0:
        raise DomainError(f"sigma must be >= 0, got {sigma}")
    return ChebyshevBound(3.0, THREE_SIGMA_PROBABILITY, 3.0 * sigma, 0.0, float(sigma), "three_sigma")


def _check_matched(clean: NegativeSpectrum, noisy: NegativeSpectrum):
    if clean.N_h != noisy.N_h:
        raise ConditionViolation(
            "C5", f"clean spectrum has {clean.N_h} bound states, noisy has {noisy.N_h}"
        )
    if clean.h != noisy.h or clean.grid != noisy.grid:
        raise DomainError("clean and noisy spectra must share h and grid")


def weyl_gap_check(clean: NegativeSpectrum, noisy: NegativeSpectrum, noise: SampledSignal, slack=None):
    """Compare ``|kappa_noisy^2 - kappa_clean^2|`` to ``max|w|`` mode by mode.

    Modes are matched by rank. ``slack`` absorbs eigensolver rounding and
    defaults to the larger of the two spectra's negativity tolerances.
    """
    _check_matched(clean, noisy)
    if slack is None:
        slack = max(clean.tol_neg, noisy.tol_neg)
    gaps = np.abs(noisy.kappas**2 - clean.kappas**2)
    max_noise = float(np.max(np.abs(noise.values)))
    violations = [int(n) + 1 for n in np.flatnonzero(gaps > max_noise + slack)]
    return WeylGapReport(gaps, max_noise, float(slack), violations)


def c6_violations(clean: NegativeSpectrum, noisy: NegativeSpectrum) -> list:
    """1-based mode numbers where ``kappa_noisy^2 < 2 kappa_clean^2`` fails."""
    _check_matched(clean, noisy)
    bad = ~(noisy.kappas**2 < 2.0 * clean.kappas**2)
    return [int(n) + 1 for n in np.flatnonzero(bad)]


def kappa_gap_bound(noisy_kappa, B) -> float:
    if not noisy_kappa > 0:
        raise DomainError(f"kappa must be > 0, got {noisy_kappa}")
    return B / (math.sqrt(2.0) * noisy_kappa)


def aposteriori_bound(spec: NegativeSpectrum, B, p) -> NoiseErrorBound:
    """``(4h/sqrt(dx)) * sum_n (2 kappa_n + B/(sqrt(2) kappa_n))`` over the noisy spectrum."""
    if not B >= 0:
        raise DomainError(f"B must be >= 0, got {B}")
    kappas = spec.kappas
    if np.any(kappas <= 0):
        raise AssertionError("negative spectrum holds a non-positive kappa")
    terms = 2.0 * kappas + B / (math.sqrt(2.0) * kappas)
    value = 4.0 * spec.h / math.sqrt(spec.dx) * float(np.sum(terms))
    return NoiseErrorBound(spec.h, spec.dx, value, terms, float(p))


def bound_report(noisy_spec: NegativeSpectrum, cheb: ChebyshevBound, clean_spec=None, empirical_error=None) -> dict:
    """JSON-ready bound record.

    Without a clean spectrum ``c5_satisfied`` and ``bound_applicable`` are
    ``"unknown"``. When (C5) fails the formula value is still listed but
    ``bound_applicable`` is false.
    """
    bound = aposteriori_bound(noisy_spec, cheb.B, cheb.p)
    report = {
        "h": noisy_spec.h,
        "N_h": noisy_spec.N_h,
        "B": cheb.B,
        "gamma": cheb.gamma,
        "mu": cheb.mu,
        "sigma": cheb.sigma,
        "rule": cheb.rule,
        "p": cheb.p,
        "bound_value": bound.bound_value,
        "per_mode_terms": bound.per_mode_terms.tolist(),
        "c5_satisfied": "unknown",
        "c6_violations": [],
        "bound_applicable": "unknown",
    }
    if clean_spec is not None:
        c5 = clean_spec.N_h == noisy_spec.N_h
        report["c5_satisfied"] = c5
        report["clean_N_h"] = clean_spec.N_h
        report["bound_applicable"] = c5
        if c5:
            report["c6_violations"] = c6_violations(clean_spec, noisy_spec)
        else:
            report["note"] = "not applicable: clean and noisy bound-state counts differ (C5)"
    if empirical_error is not None:
        report["empirical_error"] = float(empirical_error)
    return report


@dataclass(frozen=True)
class CoverageResult:
    errors: np.ndarray
    bounds: np.ndarray
    c5: np.ndarray
    seeds: np.ndarray
    spectra: list = field(repr=False, default_factory=list)

    @property
    def covered(self) -> np.ndarray:
        """Per-draw ``error <= bound``, whatever the (C5) status."""
        return self.errors <= self.bounds

    @property
    def coverage(self) -> float:
        return float(np.mean(self.covered))

    @property
    def c5_rate(self) -> float:
        return float(np.mean(self.c5))

    @property
    def coverage_given_c5(self) -> float:
        """Coverage over the draws where the bound's hypothesis (C5) holds."""
        if not np.any(self.c5):
            return math.nan
        return float(np.mean(self.covered[self.c5]))


def monte_carlo_coverage(clean: SampledSignal, d2: D2Matrix, h, target_snr_db, n_draws=200,
                         seed=0, gaussian=True, gamma=3.0, method="lapack", keep_spectra=False):
    """Empirical frequency with which the a-posteriori bound dominates the noise error.

    Draw ``k`` uses seed ``seed + k``, so results do not depend on trial order.
    The bound is evaluated on every draw; ``c5`` records where its equal-count
    hypothesis actually holds.
    """
    sigma = sigma_for_snr(clean, target_snr_db)
    cheb = three_sigma_bound(sigma) if gaussian else chebyshev_bound(0.0, sigma, gamma)
    clean_est, clean_spec = scsa(clean, d2, h, method)
    errors, bounds, c5, spectra = [], [], [], []
    seeds = seed + np.arange(n_draws)
    for s in seeds:
        noisy, _ = add_noise(clean, NoiseModel(seed=int(s)), target_snr_db)
        est, spec = scsa(noisy, d2, h, method)
        errors.append(float(np.linalg.norm(est.values - clean_est.values)))
        bounds.append(aposteriori_bound(spec, cheb.B, cheb.p).bound_value)
        c5.append(spec.N_h == clean_spec.N_h)
        if keep_spectra:
            spectra.append(spec)
    if keep_spectra:
        spectra.insert(0, clean_spec)
    return CoverageResult(np.array(errors), np.array(bounds), np.array(c5, dtype=bool), seeds, spectra)
