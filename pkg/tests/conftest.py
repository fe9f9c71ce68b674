import math

import numpy as np
import pytest

from scsa.operators import fourier_d2
from scsa.signals import make_grid, sech2_signal

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record_criterion(number, title, passed, detail=""):
    ACCEPTANCE[number] = (title, bool(passed), detail)
    print(f"\n[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} -- {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {number}. {title}: {detail}")


@pytest.fixture(scope="session")
def sech_grid():
    return make_grid(0.0, 12.0, 1201)


@pytest.fixture(scope="session")
def sech_clean(sech_grid):
    return sech2_signal(sech_grid, 6.0)


@pytest.fixture(scope="session")
def sech_d2(sech_grid):
    return fourier_d2(sech_grid.M, sech_grid.dx)


@pytest.fixture(scope="session")
def small_grid():
    """Coarser sampling of the sech^2 window, cheap enough for unit tests."""
    return make_grid(0.0, 12.0, 241)


@pytest.fixture(scope="session")
def small_clean(small_grid):
    return sech2_signal(small_grid, 6.0)


@pytest.fixture(scope="session")
def small_d2(small_grid):
    return fourier_d2(small_grid.M, small_grid.dx)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


SQRT2 = math.sqrt(2.0)
