from mfgtime.diagnostics.direction_checks import check_normalized_gradient, check_U_equals_W
from mfgtime.diagnostics.measure_checks import (
    asymptotics_report,
    check_equilibrium_residual,
    check_support_bound,
    check_trajectory_admissibility
)
from mfgtime.diagnostics.mfg_system import TensorBump, calibrate_weak_constant, mfg_system_residual
from mfgtime.diagnostics.report import FAIL, INFO, PASS, REQUIRED_CHECKS, CheckResult, DiagnosticsReport
from mfgtime.diagnostics.runner import merge_results, run_diagnostics
from mfgtime.diagnostics.value_checks import (
    check_dpp,
    check_hj_residual,
    check_lipschitz,
    check_optimality_converse,
    check_ratio_sensitivity,
    check_time_monotonicity,
    check_value_bound
)

__all__ = [
    "CheckResult",
    "DiagnosticsReport",
    "REQUIRED_CHECKS",
    "PASS",
    "FAIL",
    "INFO",
    "run_diagnostics",
    "merge_results",
    "check_dpp",
    "check_hj_residual",
    "check_time_monotonicity",
    "check_value_bound",
    "check_lipschitz",
    "check_ratio_sensitivity",
    "check_optimality_converse",
    "check_U_equals_W",
    "check_normalized_gradient",
    "asymptotics_report",
    "check_support_bound",
    "check_trajectory_admissibility",
    "check_equilibrium_residual",
    "mfg_system_residual",
    "calibrate_weak_constant",
    "TensorBump",
]
