from mfgtime.ocp.directions import (
    NON_UNIQUE,
    DirectionSet,
    descent_directions,
    normalized_gradient,
    ratio_sensitivity,
    unit_directions
)
from mfgtime.ocp.lipschitz import empirical_lipschitz
from mfgtime.ocp.oracles import dijkstra_oracle
from mfgtime.ocp.semi_lagrangian import solve_value_function, stationary_solve, target_mask
from mfgtime.ocp.tracing import flow_velocity, trace_many, trace_optimal_trajectory
from mfgtime.ocp.value_field import ValueField

__all__ = [
    "ValueField",
    "DirectionSet",
    "NON_UNIQUE",
    "unit_directions",
    "descent_directions",
    "normalized_gradient",
    "ratio_sensitivity",
    "solve_value_function",
    "stationary_solve",
    "target_mask",
    "flow_velocity",
    "trace_many",
    "trace_optimal_trajectory",
    "dijkstra_oracle",
    "empirical_lipschitz",
]
