__version__ = "0.1.0"

# Scenario and value types
from mfgtime.model import (
    EmpiricalMeasure,
    PolylineTrajectory,
    SpaceTimeGrid,
    TargetSet,
    TrajectoryBundle
)
from mfgtime.model.scenario import Scenario

# Transport
from mfgtime.transport.wasserstein import wasserstein, wasserstein_distance
from mfgtime.transport.trajectory_metric import trajectory_metric

# Congestion
from mfgtime.congestion import SpeedModelFactory, build_speed_field

# Optimal control
from mfgtime.ocp import ValueField, solve_value_function, trace_optimal_trajectory

# Equilibrium
from mfgtime.equilibrium import best_response, equilibrium_residual, fixed_point_iterate

# Diagnostics
from mfgtime.diagnostics import DiagnosticsReport, run_diagnostics

# Runs
from mfgtime.run import Run, RunInfo
from mfgtime.summary import Summary

# Utils
from mfgtime.utils.formatting import (
    chapter,
    section,
    paragraph
)

__all__ = [
    "__version__",
    "EmpiricalMeasure",
    "PolylineTrajectory",
    "TrajectoryBundle",
    "TargetSet",
    "SpaceTimeGrid",
    "Scenario",
    "wasserstein",
    "wasserstein_distance",
    "trajectory_metric",
    "SpeedModelFactory",
    "build_speed_field",
    "ValueField",
    "solve_value_function",
    "trace_optimal_trajectory",
    "best_response",
    "fixed_point_iterate",
    "equilibrium_residual",
    "DiagnosticsReport",
    "run_diagnostics",
    "Run",
    "RunInfo",
    "Summary",
    "chapter",
    "section",
    "paragraph",
]
