from .report import ExperimentReport
from .stats import chi2_critical, chi_square, chi_square_two_sample, ks_critical, ks_statistic
from .suites import (
    DEFAULT_SEED,
    MODES,
    eigenangle_limit,
    ewens_exactness,
    rerun,
    run_consistency,
    run_cycle_length_convergence,
    run_delta_uniformity,
    run_eigenangle_convergence,
    run_flow_convergence,
    run_marginal_check,
)
from .testfunc import TestFunction

__all__ = [
    "DEFAULT_SEED",
    "MODES",
    "ExperimentReport",
    "TestFunction",
    "chi2_critical",
    "chi_square",
    "chi_square_two_sample",
    "eigenangle_limit",
    "ewens_exactness",
    "rerun",
    "ks_critical",
    "ks_statistic",
    "run_consistency",
    "run_cycle_length_convergence",
    "run_delta_uniformity",
    "run_eigenangle_convergence",
    "run_flow_convergence",
    "run_marginal_check",
]
