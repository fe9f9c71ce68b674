"""Schrödinger-operator assembly, negative spectrum and signal reconstruction.

For a potential ``y`` sampled on a grid and a semi-classical parameter
``h > 0`` the matrix ``A_h = -h^2 D2 - diag(y)`` is formed; its eigenvalues
``-kappa_n^2 < 0`` and eigenvectors (rescaled so ``dx * sum(psi^2) = 1``) give
the estimate ``y_h = 4 h sum_n kappa_n psi_n^2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .eigen import default_tol_neg, symmetric_eigen
from .errors import DomainError
from .operators import D2Matrix, OperatorSpectrum
from .signals import Grid, SampledSignal

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SchrodingerMatrix:
    h: float
    d2: D2Matrix
    potential: SampledSignal
    entries: np.ndarray


@dataclass(frozen=True, eq=False)
class NegativeSpectrum:
    h: float
    kappas: np.ndarray
    eigenvectors: np.ndarray
    grid: Grid
    tol_neg: float = 0.0

    @property
    def N_h(self) -> int:
        return int(self.kappas.shape[0])

    @property
    def dx(self) -> float:
        return self.grid.dx

    def normalization_residuals(self) -> np.ndarray:
        """``dx * sum(psi^2) - 1`` for every stored eigenvector."""
        return self.dx * np.sum(self.eigenvectors**2, axis=0) - 1.0

    def to_record(self) -> dict:
        return {
            "h": self.h,
            "N_h": self.N_h,
            "kappas": self.kappas.tolist(),
            "normalization_residuals": self.normalization_residuals().tolist(),
        }


@dataclass(frozen=True)
class BoundThresholds:
    """Eigenvalue-count guarantees for ``-h^2 D2 - diag(y)``.

    ``N_h = M - n_zero`` for ``h < h_all`` and ``N_h = 0`` for
    ``h > h_none``. ``h_all`` is NaN when no entry is positive.
    """

    n_zero: int
    y_min_pos: float
    y_max: float
    h_all: float
    h_none: float

    @property
    def h_all_defined(self) -> bool:
        return not math.isnan(self.h_all)


def assemble(h, d2: D2Matrix, potential: SampledSignal) -> SchrodingerMatrix:
    h = float(h)
    if not (h > 0 and math.isfinite(h)):
        raise DomainError(f"h must be positive and finite, got {h}")
    if potential.grid.M != d2.M:
        raise DomainError(f"potential has {potential.grid.M} samples, D2 is {d2.M}x{d2.M}")
    if not math.isclose(potential.grid.dx, d2.dx, rel_tol=1e-12):
        raise DomainError(f"potential spacing {potential.grid.dx} != D2 spacing {d2.dx}")
    entries = -(h * h) * d2.entries
    idx = np.arange(d2.M)
    entries[idx, idx] -= potential.values
    return SchrodingerMatrix(h, d2, potential, entries)


def negative_spectrum(a: SchrodingerMatrix, tol_neg=None, method="lapack") -> NegativeSpectrum:
    """Bound states of ``a``: ``kappa = sqrt(-lambda)`` for ``lambda < -tol_neg``, descending."""
    if tol_neg is None:
        tol_neg = default_tol_neg(a.entries)
    decomp = symmetric_eigen(a.entries, method=method)
    # ascending eigenvalues -> leading block is the negative part, largest kappa first
    count = int(np.count_nonzero(decomp.eigenvalues < -tol_neg))
    lam = decomp.eigenvalues[:count]
    kappas = np.sqrt(np.maximum(-lam, 0.0))
    grid = a.potential.grid
    vectors = decomp.eigenvectors[:, :count] / math.sqrt(grid.dx)
    return NegativeSpectrum(a.h, kappas, vectors, grid, float(tol_neg))


def reconstruct(spec: NegativeSpectrum) -> SampledSignal:
    values = 4.0 * spec.h * (spec.eigenvectors**2 @ spec.kappas)
    if spec.N_h == 0:
        values = np.zeros(spec.grid.M)
    return SampledSignal(spec.grid, values)


def scsa(potential: SampledSignal, d2: D2Matrix, h, method="lapack"):
    """Assemble, solve and reconstruct in one call; returns ``(estimate, spectrum)``."""
    spec = negative_spectrum(assemble(h, d2, potential), method=method)
    return reconstruct(spec), spec


def count_thresholds(potential: SampledSignal, spectrum: OperatorSpectrum, tol_zero=0.0) -> BoundThresholds:
    if not spectrum.d1 > 0:
        raise DomainError(f"count thresholds need d1 > 0, got {spectrum.d1}")
    y = potential.values
    positive = y[y > tol_zero]
    n_zero = int(y.shape[0] - positive.shape[0])
    if positive.size == 0:
        log.warning("no entry of the potential exceeds tol_zero=%g; h_all undefined", tol_zero)
        return BoundThresholds(n_zero, math.nan, float(np.max(y)), math.nan, math.inf)
    y_min_pos = float(np.min(positive))
    y_max = float(np.max(positive))
    h_all = math.sqrt(y_min_pos / spectrum.d1)
    h_none = math.inf if spectrum.dM <= spectrum.tol_psd else math.sqrt(y_max / spectrum.dM)
    return BoundThresholds(n_zero, y_min_pos, y_max, h_all, h_none)


def nh_profile(potential: SampledSignal, d2: D2Matrix, h_grid, method="lapack"):
    """``[(h, N_h), ...]`` by full eigensolve at every grid point.

    N_h is only guaranteed to drop somewhere below each h, not monotonically
    on an arbitrary grid; increases are logged, not raised.
    """
    h_grid = check_h_grid(h_grid)
    profile = []
    for h in h_grid:
        spec = negative_spectrum(assemble(h, d2, potential), method=method)
        if profile and spec.N_h > profile[-1][1]:
            log.warning(
                "N_h increased from %d at h=%g to %d at h=%g",
                profile[-1][1], profile[-1][0], spec.N_h, h,
            )
        profile.append((float(h), spec.N_h))
    return profile


def check_h_grid(h_grid) -> np.ndarray:
    h_grid = np.asarray(h_grid, dtype=float).ravel()
    if h_grid.size == 0:
        raise DomainError("h grid is empty")
    if not np.all(np.isfinite(h_grid)) or np.any(h_grid <= 0):
        raise DomainError("h grid values must be positive and finite")
    if np.any(np.diff(h_grid) <= 0):
        raise DomainError("h grid must be strictly increasing")
    return h_grid
