"""Convergence studies: cases, runners and report artifacts."""

from .cases import (
    CASES,
    CoefficientCase,
    ExactEigenvalue,
    ManufacturedProblem,
    exact_eigenfunction,
    exact_reference,
    get_case,
    manufactured_problem,
)
from .convergence import (
    compute_error_norms,
    eigenfunction_errors,
    fitted_slope,
    observed_rates,
    run_comparison,
    run_convergence,
    run_source_study,
    run_study,
)
from .outputs import emit_outputs, plot_convergence, write_csv

__all__ = [
    "CASES",
    "CoefficientCase",
    "ExactEigenvalue",
    "ManufacturedProblem",
    "compute_error_norms",
    "eigenfunction_errors",
    "emit_outputs",
    "exact_eigenfunction",
    "exact_reference",
    "fitted_slope",
    "get_case",
    "manufactured_problem",
    "observed_rates",
    "plot_convergence",
    "run_comparison",
    "run_convergence",
    "run_source_study",
    "run_study",
    "write_csv",
]
