"""Semi-classical signal analysis (SCSA).

A sampled signal ``y`` is used as the potential of ``-h^2 d^2/dx^2 - y``; the
signal is rebuilt from the operator's bound states, and the toolkit bounds the
noise contribution and picks ``h`` from filtered residuals.
"""

__version__ = "0.1.0"

from .core import (
    BoundThresholds,
    NegativeSpectrum,
    SchrodingerMatrix,
    assemble,
    count_thresholds,
    negative_spectrum,
    nh_profile,
    reconstruct,
    scsa,
)
from .eigen import EigenDecomposition, negative_count, symmetric_eigen
from .errors import ConditionViolation, CsvFormatError, DomainError, NumericError
from .noise import (
    ChebyshevBound,
    NoiseErrorBound,
    aposteriori_bound,
    chebyshev_bound,
    kappa_gap_bound,
    monte_carlo_coverage,
    three_sigma_bound,
    weyl_gap_check,
)
from .operators import D2Matrix, OperatorSpectrum, central_fd_d2, extreme_spectrum, fourier_d2, make_d2
from .selection import ButterworthFilter, HSweepResult, butterworth2, filter_signal, select_h, sweep
from .signals import Grid, NoiseModel, SampledSignal, add_noise, l2_error, make_grid, sech2_signal, snr_db
