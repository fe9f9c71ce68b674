"""Second-order differentiation matrices and their extreme spectrum.

Two schemes:

* ``fourier_pseudospectral``: dense periodic spectral matrix. The grid is
  treated as one period of length ``M * dx``, so the last sample couples to
  the first (wrap-around). Negative semidefinite; constants are annihilated.
* ``central_fd_dirichlet``: three-point stencil with homogeneous Dirichlet
  ends. Negative definite with closed-form eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.linalg import toeplitz

from ._io import atomic_write_text
from .eigen import EPS, symmetric_eigen
from .errors import DomainError

FOURIER = "fourier_pseudospectral"
CENTRAL_FD = "central_fd_dirichlet"
SCHEME_ALIASES = {"fourier": FOURIER, "fd": CENTRAL_FD, FOURIER: FOURIER, CENTRAL_FD: CENTRAL_FD}

MAX_DENSE_SIZE = 4096


@dataclass(frozen=True, eq=False)
class D2Matrix:
    scheme: str
    M: int
    dx: float
    entries: np.ndarray

    @property
    def tol_psd(self) -> float:
        """Semidefiniteness tolerance ``1e3 * eps * ||D2||_inf``."""
        return 1e3 * EPS * float(np.max(np.sum(np.abs(self.entries), axis=1)))

    def bands(self):
        """``(diagonal, offdiagonal)`` of the finite-difference matrix."""
        if self.scheme != CENTRAL_FD:
            raise DomainError(f"{self.scheme} matrix is not tridiagonal")
        return np.diag(self.entries).copy(), np.diag(self.entries, 1).copy()


@dataclass(frozen=True)
class OperatorSpectrum:
    """Extreme eigenvalues of ``-D2``: ``d1`` largest, ``dM`` smallest."""

    d1: float
    dM: float
    tol_psd: float

    @property
    def definite(self) -> bool:
        return self.dM > self.tol_psd


def _check_size(M, dx, max_size):
    if int(M) != M or M < 2:
        raise DomainError(f"D2 needs M >= 2, got {M}")
    if not (dx > 0 and math.isfinite(dx)):
        raise DomainError(f"D2 needs dx > 0, got {dx}")
    if M > max_size:
        raise DomainError(f"M={M} exceeds the dense size cap {max_size}")
    return int(M), float(dx)


def fourier_d2(M, dx, max_size=MAX_DENSE_SIZE) -> D2Matrix:
    """Periodic pseudo-spectral second-derivative matrix on ``M`` points.

    Entries are the unit-period formulas on spacing ``delta = 2*pi/M`` rescaled
    to physical spacing by ``(delta/dx)**2``:

    * even ``M``: diagonal ``-pi^2/(3 delta^2) - 1/6``, off-diagonal
      ``-(-1)^m / (2 sin^2(m delta/2))``;
    * odd ``M``: diagonal ``-pi^2/(3 delta^2) + 1/12``, off-diagonal
      ``-(-1)^m cot(m delta/2) / (2 sin(m delta/2))``;

    where ``m = k - j``. The odd-M diagonal carries ``+1/12``: the trace must
    equal ``-(M^3 - M)/12`` (sum of ``-k^2`` over the resolved wavenumbers).
    Both depend on ``|m|`` only, so the matrix is built
    as a symmetric Toeplitz matrix from its first column.
    """
    M, dx = _check_size(M, dx, max_size)
    delta = 2.0 * math.pi / M
    m = np.arange(1, M)
    half = m * delta / 2.0
    sign = np.where(m % 2 == 0, -1.0, 1.0)  # -(-1)^m
    column = np.empty(M)
    if M % 2 == 0:
        column[0] = -math.pi**2 / (3.0 * delta**2) - 1.0 / 6.0
        column[1:] = sign * 0.5 / np.sin(half) ** 2
    else:
        column[0] = -math.pi**2 / (3.0 * delta**2) + 1.0 / 12.0
        column[1:] = sign * 0.5 * np.cos(half) / np.sin(half) ** 2
    column *= (delta / dx) ** 2
    return D2Matrix(FOURIER, M, dx, toeplitz(column))


def central_fd_d2(M, dx, max_size=MAX_DENSE_SIZE) -> D2Matrix:
    M, dx = _check_size(M, dx, max_size)
    inv = 1.0 / dx**2
    entries = np.zeros((M, M))
    idx = np.arange(M)
    entries[idx, idx] = -2.0 * inv
    entries[idx[:-1], idx[:-1] + 1] = inv
    entries[idx[:-1] + 1, idx[:-1]] = inv
    return D2Matrix(CENTRAL_FD, M, dx, entries)


def make_d2(scheme, M, dx, max_size=MAX_DENSE_SIZE) -> D2Matrix:
    try:
        scheme = SCHEME_ALIASES[scheme]
    except KeyError:
        raise DomainError(f"unknown D2 scheme {scheme!r}") from None
    if scheme == FOURIER:
        return fourier_d2(M, dx, max_size)
    return central_fd_d2(M, dx, max_size)


def fd_eigenvalues(M, dx) -> np.ndarray:
    """Closed-form spectrum of ``-central_fd_d2``: ``4/dx^2 sin^2(k pi / (2(M+1)))``, ascending."""
    k = np.arange(1, M + 1)
    return 4.0 / dx**2 * np.sin(k * math.pi / (2.0 * (M + 1))) ** 2


def extreme_spectrum(d2: D2Matrix, method="lapack") -> OperatorSpectrum:
    if d2.scheme == CENTRAL_FD:
        values = fd_eigenvalues(d2.M, d2.dx)
    else:
        values = symmetric_eigen(-d2.entries, method=method).eigenvalues
    return OperatorSpectrum(d1=float(values[-1]), dM=float(values[0]), tol_psd=d2.tol_psd)


def dump_matrix(d2: D2Matrix, path) -> None:
    """Plain-text dense dump: one row per line, space separated, row-major."""
    rows = (" ".join(f"{v:.17g}" for v in row) for row in d2.entries.tolist())
    atomic_write_text(Path(path), "\n".join(rows) + "\n")
