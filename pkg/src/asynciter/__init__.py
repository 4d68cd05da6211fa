"""Simulate and analyse linear iterative systems whose nodes update
asynchronously, driven by binary diagonal activation matrices."""

from .activation import (
    ScheduleKind,
    SchedulePolicy,
    ScheduleState,
    activations,
    next_activation,
    verify_window_coverage,
)
from .dynamics import (
    ConvergenceCriterion,
    Reference,
    compute_fixed_point,
    perturb_matrix,
    run_trajectory,
    step,
)
from .linalg import SpectralEstimate, certify_contractive, solve_linear, spectral_radius
from .matrix_gen import SignConvention, SystemSpec, generate_system
from .rate import RateMode, RateReport, coverage_probability_bound, fit_empirical_rate, theoretical_rate
from .spectral_analysis import effective_matrix, idle_row_eigen_check, window_product_radius

__version__ = "0.1.0"
