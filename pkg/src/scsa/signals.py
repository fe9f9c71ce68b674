"""Sampling grids, signal containers, test signals, noise injection and norms.

Noise is drawn with ``numpy.random.default_rng(seed).standard_normal`` (PCG64
bit generator, ziggurat normal sampler); a given seed reproduces the same
sequence on every build that uses the same numpy major release.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._io import atomic_write_text
from .errors import CsvFormatError, DomainError

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class Grid:
    """Uniform lattice ``x_j = a + j*dx``, ``j = 0..M-1``, with ``x_{M-1} = b``."""

    a: float
    b: float
    M: int
    dx: float

    @property
    def x(self) -> np.ndarray:
        x = self.a + np.arange(self.M) * self.dx
        # pin the right endpoint so CSV round trips rebuild an identical grid
        x[-1] = self.b
        return x

    @property
    def shape(self):
        return (self.M,)


def make_grid(a, b, M) -> Grid:
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"grid endpoints must be finite, got ({a}, {b})")
    if int(M) != M or M < 2:
        raise DomainError(f"grid needs at least 2 samples, got M={M}")
    if not b > a:
        raise DomainError(f"grid needs b > a, got a={a}, b={b}")
    M = int(M)
    return Grid(a=a, b=b, M=M, dx=(b - a) / (M - 1))


@dataclass(frozen=True, eq=False)
class SampledSignal:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.shape[0] != self.grid.M:
            raise DomainError(
                f"signal has shape {values.shape}, grid expects ({self.grid.M},)"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("signal contains NaN or Inf")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.grid.M

    def with_values(self, values) -> "SampledSignal":
        return SampledSignal(self.grid, values)


@dataclass(frozen=True)
class NoiseModel:
    mean: float = 0.0
    variance: float = 1.0
    seed: int = 0
    kind: str = field(default="gaussian_iid")

    def __post_init__(self):
        if self.kind != "gaussian_iid":
            raise DomainError(f"unsupported noise kind {self.kind!r}")
        if not self.variance >= 0:
            raise DomainError(f"noise variance must be >= 0, got {self.variance}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)


def sech2_signal(grid: Grid, center=6.0) -> SampledSignal:
    """Pöschl-Teller profile ``sech^2(x - center)``."""
    return SampledSignal(grid, 1.0 / np.cosh(grid.x - center) ** 2)


def _check_same_grid(a: SampledSignal, b: SampledSignal):
    if a.grid != b.grid:
        raise DomainError(f"grid mismatch: {a.grid} vs {b.grid}")


def snr_db(clean: SampledSignal, noise: SampledSignal) -> float:
    """``10 log10(sum clean^2 / sum noise^2)``, unweighted sums."""
    _check_same_grid(clean, noise)
    noise_power = float(np.dot(noise.values, noise.values))
    if noise_power == 0.0:
        raise DomainError("SNR undefined for identically zero noise")
    signal_power = float(np.dot(clean.values, clean.values))
    return 10.0 * math.log10(signal_power / noise_power)


def sigma_for_snr(clean: SampledSignal, target_snr_db) -> float:
    """Noise standard deviation whose expected power gives ``target_snr_db``."""
    power = float(np.dot(clean.values, clean.values)) / clean.grid.M
    return math.sqrt(power / 10.0 ** (target_snr_db / 10.0))


def add_noise(clean: SampledSignal, model: NoiseModel, target_snr_db=None):
    """Return ``(noisy, noise)`` with ``noisy = clean + noise``.

    Without a target the noise is ``mean + sigma * z``. With a target, the draw
    ``mean + z`` (unit variance) is rescaled so the realized SNR equals the
    target; ``model.variance`` is then ignored.
    """
    rng = np.random.default_rng(int(model.seed))
    z = rng.standard_normal(clean.grid.M)
    if target_snr_db is None:
        w = model.mean + model.sigma * z
    else:
        signal_power = float(np.dot(clean.values, clean.values))
        if signal_power == 0.0:
            raise DomainError("cannot hit a target SNR on an identically zero signal")
        w = model.mean + z
        w = w * math.sqrt(signal_power / (np.dot(w, w) * 10.0 ** (target_snr_db / 10.0)))
    noise = SampledSignal(clean.grid, w)
    return SampledSignal(clean.grid, clean.values + w), noise


def l2_error(a: SampledSignal, b: SampledSignal) -> float:
    _check_same_grid(a, b)
    return float(np.linalg.norm(a.values - b.values))


def write_csv(signal: SampledSignal, path) -> None:
    path = Path(path)
    lines = ["x,value"]
    lines += [f"{x:.17g},{v:.17g}" for x, v in zip(signal.grid.x.tolist(), signal.values.tolist())]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_csv(path) -> SampledSignal:
    """Read an ``x,value`` CSV; the grid is rebuilt from first/last x and M."""
    path = Path(path)
    xs, vs = [], []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["x", "value"]:
            raise CsvFormatError(path, 1, f"expected header 'x,value', got {header}")
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise CsvFormatError(path, row_number, f"expected 2 fields, got {len(row)}")
            try:
                x, v = float(row[0]), float(row[1])
            except ValueError as exc:
                raise CsvFormatError(path, row_number, str(exc)) from None
            if not (math.isfinite(x) and math.isfinite(v)):
                raise CsvFormatError(path, row_number, "non-finite value")
            xs.append(x)
            vs.append(v)
    if len(xs) < 2:
        raise CsvFormatError(path, len(xs) + 1, "need at least 2 samples")
    grid = make_grid(xs[0], xs[-1], len(xs))
    xs = np.asarray(xs)
    spacing_err = np.max(np.abs(xs - grid.x))
    if spacing_err > 1e-9 * max(1.0, abs(grid.b) + abs(grid.a)):
        row = int(np.argmax(np.abs(xs - grid.x))) + 2
        raise CsvFormatError(path, row, "samples are not uniformly spaced")
    return SampledSignal(grid, vs)
