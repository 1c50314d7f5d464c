"""Testprobleme, Fehlermaße, Konvergenzstudien und Eigenschaftsprüfungen."""

from .errors import L2Errors, energy_error, l2_errors, project_exact_solution
from .problems import (
    PROBLEM_IDS,
    ManufacturedProblem,
    derive_data,
    get_problem,
    patch_problem,
    zero_problem,
)
from .properties import (
    CheckResult,
    PatchResult,
    PropertySuite,
    commutation_check,
    curved_defect_check,
    divergence_theorem_check,
    error_equation_check,
    infsup_probe,
    infsup_study,
    patch_test,
)
from .study import (
    CSV_COLUMNS,
    ConvergenceStudy,
    ErrorReport,
    ErrorRow,
    build_problem_mesh,
    compare_curved_straight,
    convergence_study,
    observed_order,
    run_pipeline,
)

__all__ = [
    "L2Errors",
    "energy_error",
    "l2_errors",
    "project_exact_solution",
    "PROBLEM_IDS",
    "ManufacturedProblem",
    "derive_data",
    "get_problem",
    "patch_problem",
    "zero_problem",
    "CheckResult",
    "PatchResult",
    "PropertySuite",
    "commutation_check",
    "curved_defect_check",
    "divergence_theorem_check",
    "error_equation_check",
    "infsup_probe",
    "infsup_study",
    "patch_test",
    "CSV_COLUMNS",
    "ConvergenceStudy",
    "ErrorReport",
    "ErrorRow",
    "build_problem_mesh",
    "compare_curved_straight",
    "convergence_study",
    "observed_order",
    "run_pipeline",
]
