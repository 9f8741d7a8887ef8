from mfgtime.transport.pushforward import (
    final_measure,
    flow_distance,
    measure_at_node,
    measure_flow,
    pushforward_at
)
from mfgtime.transport.trajectory_metric import (
    trajectory_metric,
    trajectory_metric_with_bound
)
from mfgtime.transport.wasserstein import (
    TransportPlan,
    transport_plan_frame,
    wasserstein,
    wasserstein_distance
)

__all__ = [
    "TransportPlan",
    "transport_plan_frame",
    "wasserstein",
    "wasserstein_distance",
    "pushforward_at",
    "measure_at_node",
    "measure_flow",
    "final_measure",
    "flow_distance",
    "trajectory_metric",
    "trajectory_metric_with_bound",
]
