"""
Metric on path space:

    d(g1, g2) = sum_{n >= 1} 2^-n * s_n / (1 + s_n),  s_n = sup_{t in [0, n]} |g1(t) - g2(t)|.

The sum is cut at n_max = ceil(horizon). Paths sampled on the grid are
frozen after their last node, so s_n = s_{n_max} for n > n_max and the
tail is summed in closed form as 2^-n_max * s / (1 + s). The returned
bound 2^-n_max caps what the tail can contribute.
"""

import math

import numpy as np

from mfgtime.model.trajectories import PolylineTrajectory


def _horizon_blocks(n_nodes, dt):
    """Last node index inside [0, n] for n = 1..n_max."""
    horizon = (n_nodes - 1) * dt
    n_max = max(1, int(math.ceil(horizon - 1e-9)))
    last = np.minimum(np.floor(np.arange(1, n_max + 1) / dt + 1e-9).astype(int), n_nodes - 1)
    return n_max, last


def metric_from_gaps(gaps, dt):
    """
    Metric values from node-wise distances.

    Args:
        gaps: Array (..., n_nodes) of |g1(t_k) - g2(t_k)|.
        dt: Time step of the grid.

    Returns:
        tuple: (metric values of shape gaps.shape[:-1], tail bound 2^-n_max)
    """
    gaps = np.asarray(gaps, dtype=float)
    n_max, last = _horizon_blocks(gaps.shape[-1], dt)
    running = np.maximum.accumulate(gaps, axis=-1)
    s = running[..., last]
    ratio = s / (1.0 + s)
    factors = 0.5 ** np.arange(1, n_max + 1)
    tail_bound = 0.5 ** n_max
    head = ratio @ factors
    tail = tail_bound * running[..., -1] / (1.0 + running[..., -1])
    return head + tail, tail_bound


def paths_metric(paths, reference, dt):
    """Metric between each of the stacked paths (m, n, d) and one reference path (n, d)."""
    gaps = np.linalg.norm(np.asarray(paths) - np.asarray(reference)[None, :, :], axis=2)
    return metric_from_gaps(gaps, dt)[0]


def trajectory_metric_with_bound(first: PolylineTrajectory, second: PolylineTrajectory):
    """Metric value and the truncation bound 2^-n_max."""
    if abs(first.dt - second.dt) > 1e-12 or first.n_nodes != second.n_nodes:
        raise ValueError("Trajectories must share the same time grid.")
    gaps = np.linalg.norm(first.points - second.points, axis=1)
    value, bound = metric_from_gaps(gaps, first.dt)
    return float(value), bound


def trajectory_metric(first: PolylineTrajectory, second: PolylineTrajectory) -> float:
    return trajectory_metric_with_bound(first, second)[0]
