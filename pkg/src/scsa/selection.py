"""Choosing h without the clean signal.

The noisy signal and each reconstruction are passed through the same causal
second-order low-pass filter; local minima of the filtered residual over an
h grid are the candidates.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from ._io import atomic_write_text
from .core import check_h_grid, scsa
from .errors import DomainError, NumericError
from .noise import aposteriori_bound
from .operators import D2Matrix
from .signals import SampledSignal

log = logging.getLogger(__name__)

DEFAULT_H_GRID = np.round(np.arange(0.2, 2.0 + 1e-9, 0.1), 10)
DEFAULT_WC = 0.01


@dataclass(frozen=True, eq=False)
class ButterworthFilter:
    """Biquad ``b0 + b1 z^-1 + b2 z^-2 / (1 + a1 z^-1 + a2 z^-2)``."""

    w_c: float
    b: np.ndarray
    a: np.ndarray

    def response(self, omega) -> np.ndarray:
        """Complex frequency response at ``omega`` radians/sample."""
        z1 = np.exp(-1j * np.asarray(omega, dtype=float))
        return np.polyval(self.b[::-1], z1) / np.polyval(self.a[::-1], z1)

    def poles(self) -> np.ndarray:
        return np.roots(self.a)


def butterworth2(w_c=DEFAULT_WC) -> ButterworthFilter:
    """Discretize ``w_c^2 / (s^2 + 2 w_c s + w_c^2)`` by the bilinear map.

    Unit sample period, ``s = 2 (z - 1)/(z + 1)``, no prewarping. Note the
    analog prototype has a double pole at ``-w_c``, so its gain at ``w_c``
    is 1/2.
    """
    if not 0 < w_c < math.pi:
        raise DomainError(f"cutoff must lie in (0, pi) rad/sample, got {w_c}")
    w2 = w_c * w_c
    a0 = 4.0 + 4.0 * w_c + w2
    b = np.array([w2, 2.0 * w2, w2]) / a0
    a = np.array([a0, 2.0 * w2 - 8.0, 4.0 - 4.0 * w_c + w2]) / a0
    return ButterworthFilter(float(w_c), b, a)


def filter_signal(f: ButterworthFilter, s: SampledSignal) -> SampledSignal:
    """Causal direct-form filtering from zero initial state."""
    return SampledSignal(s.grid, lfilter(f.b, f.a, s.values))


def filtered_residual(f: ButterworthFilter, u: SampledSignal, v: SampledSignal) -> float:
    return float(np.linalg.norm(filter_signal(f, u).values - filter_signal(f, v).values))


@dataclass(frozen=True, eq=False)
class HSweepResult:
    h_grid: np.ndarray
    n_h: np.ndarray
    raw_residual: np.ndarray
    filtered_residual: np.ndarray
    true_error: np.ndarray | None = None
    noise_bound: np.ndarray | None = None
    clean_n_h: np.ndarray | None = None
    clean_error: np.ndarray | None = None
    noise_error: np.ndarray | None = None
    failures: dict = field(default_factory=dict)
    spectra: list = field(default_factory=list, repr=False)

    def columns(self):
        """Ordered ``(name, array)`` pairs; optional columns are ``None`` when absent."""
        cols = [
            ("h", self.h_grid),
            ("N_h", self.n_h),
            ("raw_residual", self.raw_residual),
            ("filtered_residual", self.filtered_residual),
            ("true_error", self.true_error),
            ("noise_bound", self.noise_bound),
        ]
        extra = [
            ("clean_N_h", self.clean_n_h),
            ("clean_error", self.clean_error),
            ("noise_error", self.noise_error),
        ]
        return cols + [(name, col) for name, col in extra if col is not None]

    def to_csv(self) -> str:
        cols = self.columns()
        lines = [",".join(name for name, _ in cols)]
        for i in range(self.h_grid.shape[0]):
            cells = []
            for name, col in cols:
                if col is None or (isinstance(col[i], float) and math.isnan(col[i])):
                    cells.append("")
                elif name in ("N_h", "clean_N_h"):
                    cells.append("" if col[i] < 0 else str(int(col[i])))
                else:
                    cells.append(f"{float(col[i]):.17g}")
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"

    def write_csv(self, path):
        atomic_write_text(path, self.to_csv())


def sweep(noisy: SampledSignal, d2: D2Matrix, h_grid=DEFAULT_H_GRID, filt=None, clean=None,
          bound_B=None, clean_side=False, method="lapack", keep_spectra=False) -> HSweepResult:
    """Run SCSA on ``noisy`` at every h and record residual curves.

    With ``clean`` the true error is recorded; ``clean_side`` additionally
    reconstructs the clean signal at each h (clean-side error, noise error,
    clean N_h). ``bound_B`` enables the a-posteriori noise bound column.
    Eigensolver failures are logged and leave NaN in that row.
    """
    h_grid = check_h_grid(h_grid)
    if filt is None:
        filt = butterworth2()
    if clean is not None and clean.grid != noisy.grid:
        raise DomainError("clean and noisy signals must share a grid")
    n = h_grid.shape[0]
    nan = lambda: np.full(n, np.nan)  # noqa: E731
    n_h = np.full(n, -1, dtype=int)
    raw, filtered = nan(), nan()
    true_error = nan() if clean is not None else None
    noise_bound = nan() if bound_B is not None else None
    clean_n_h = np.full(n, -1, dtype=int) if clean is not None and clean_side else None
    clean_error = nan() if clean_n_h is not None else None
    noise_error = nan() if clean_n_h is not None else None
    failures, spectra = {}, []
    filtered_noisy = filter_signal(filt, noisy).values
    for i, h in enumerate(h_grid):
        try:
            est, spec = scsa(noisy, d2, h, method)
        except NumericError as exc:
            log.warning("sweep: eigensolver failed at h=%g: %s", h, exc)
            failures[float(h)] = str(exc)
            continue
        n_h[i] = spec.N_h
        raw[i] = np.linalg.norm(noisy.values - est.values)
        filtered[i] = np.linalg.norm(filtered_noisy - filter_signal(filt, est).values)
        if keep_spectra:
            spectra.append(spec)
        if clean is not None:
            true_error[i] = np.linalg.norm(clean.values - est.values)
        if bound_B is not None:
            noise_bound[i] = aposteriori_bound(spec, bound_B, math.nan).bound_value
        if clean_n_h is not None:
            try:
                clean_est, clean_spec = scsa(clean, d2, h, method)
            except NumericError as exc:
                log.warning("sweep: clean eigensolve failed at h=%g: %s", h, exc)
                failures[float(h)] = str(exc)
                continue
            clean_n_h[i] = clean_spec.N_h
            clean_error[i] = np.linalg.norm(clean.values - clean_est.values)
            noise_error[i] = np.linalg.norm(clean_est.values - est.values)
            if keep_spectra:
                spectra.append(clean_spec)
    return HSweepResult(h_grid, n_h, raw, filtered, true_error, noise_bound,
                        clean_n_h, clean_error, noise_error, failures, spectra)


@dataclass(frozen=True)
class Selection:
    recommended_h: float
    local_minima: list
    no_interior_minimum: bool


def local_minima(values) -> list:
    """Indices of interior discrete local minima.

    A run of equal values strictly below both neighbours counts once, at its
    first index. NaN entries never qualify and break runs.
    """
    v = np.asarray(values, dtype=float)
    out = []
    i = 1
    n = v.shape[0]
    while i < n - 1:
        if np.isnan(v[i]):
            i += 1
            continue
        j = i
        while j + 1 < n and v[j + 1] == v[i]:
            j += 1
        left, right = v[i - 1], (v[j + 1] if j + 1 < n else np.nan)
        if v[i] < left and v[i] < right:
            out.append(i)
        i = j + 1
    return out


def select_h(result: HSweepResult) -> Selection:
    """Pick h at the lowest local minimum of the filtered residual.

    Ties go to the smaller h. Without an interior minimum the global minimizer
    is returned and ``no_interior_minimum`` is set.
    """
    fr = np.asarray(result.filtered_residual, dtype=float)
    h = result.h_grid
    if np.all(np.isnan(fr)):
        raise NumericError("no sweep point produced a filtered residual")
    minima = local_minima(fr)
    if minima:
        best = min(minima, key=lambda i: (fr[i], i))
        return Selection(float(h[best]), [float(h[i]) for i in minima], False)
    best = int(np.nanargmin(fr))
    return Selection(float(h[best]), [], True)
