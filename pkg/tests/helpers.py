"""Random instance generators shared by unit and acceptance tests."""

import numpy as np

from scsa.signals import SampledSignal, make_grid


def random_potential(rng, max_M=50):
    """Nonnegative potential with a random number of exact zeros."""
    M = int(rng.integers(2, max_M + 1))
    dx = float(rng.uniform(0.05, 1.0))
    grid = make_grid(0.0, dx * (M - 1), M)
    n_zero = int(rng.integers(0, M))
    y = rng.uniform(0.05, 2.0, size=M)
    y[rng.choice(M, size=n_zero, replace=False)] = 0.0
    return SampledSignal(grid, y)


def log_h_grid(h_lo, h_hi, n=30):
    return np.geomspace(h_lo, h_hi, n)


def bump_potential(rng, M):
    """Smooth positive bump on [0, 10] with random height, width and centre."""
    grid = make_grid(0.0, 10.0, M)
    x = grid.x
    amp = rng.uniform(0.5, 3.0)
    width = rng.uniform(0.5, 2.0)
    centre = rng.uniform(3.0, 7.0)
    return SampledSignal(grid, amp / np.cosh((x - centre) / width) ** 2)
