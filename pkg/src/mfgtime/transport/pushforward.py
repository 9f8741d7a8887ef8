import numpy as np

from mfgtime.model.measures import EmpiricalMeasure
from mfgtime.model.trajectories import TrajectoryBundle
from mfgtime.transport.wasserstein import wasserstein_distance

_TIME_TOL = 1e-9


def pushforward_at(bundle: TrajectoryBundle, t) -> EmpiricalMeasure:
    """
    The image e_t#Q of a trajectory bundle under evaluation at time t:
    members' positions at t (linear between nodes) with the bundle weights.
    """
    t = float(t)
    if t < -_TIME_TOL or t > bundle.horizon + _TIME_TOL:
        raise ValueError(f"Time {t} lies outside [0, {bundle.horizon}].")
    return EmpiricalMeasure(bundle.positions_at(min(max(t, 0.0), bundle.horizon)), bundle.weights)


def measure_at_node(bundle: TrajectoryBundle, k) -> EmpiricalMeasure:
    """e_t#Q at the grid time t_k, without interpolation."""
    return EmpiricalMeasure(bundle.node_positions(k), bundle.weights)


def measure_flow(bundle: TrajectoryBundle):
    """e_t#Q at every grid time of the bundle."""
    return [measure_at_node(bundle, k) for k in range(bundle.n_nodes)]


def final_measure(bundle: TrajectoryBundle) -> EmpiricalMeasure:
    """e_inf#Q: members are frozen after their last node."""
    return measure_at_node(bundle, bundle.n_nodes - 1)


def flow_distance(first: TrajectoryBundle, second: TrajectoryBundle, p=1.0, last_node=None):
    """
    Node-wise W_p between the measure flows of two bundles on one grid.

    Args:
        first, second: Bundles sharing a time grid.
        p: Wasserstein order.
        last_node: Compare nodes 0..last_node only. Beyond the node where
            both bundles have settled the distance is constant, so callers
            can stop there.

    Returns:
        np.ndarray: W_p at each compared grid time.
    """
    if not first.same_grid(second):
        raise ValueError("Cannot compare bundles defined on different time grids.")
    if last_node is None:
        last_node = first.n_nodes - 1
    return np.array([wasserstein_distance(measure_at_node(first, k), measure_at_node(second, k), p)
                     for k in range(last_node + 1)])
