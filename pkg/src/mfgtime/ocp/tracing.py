import math

import numpy as np

from mfgtime.core.constants import DEFAULT_CLUSTER_ANGLE, DEFAULT_DIRECTIONS
from mfgtime.core.errors import TracingError
from mfgtime.model.trajectories import PolylineTrajectory, grid_index
from mfgtime.ocp.directions import descent_ratios, unit_directions


def flow_velocity(phi, field, t, points, previous=None, n_directions=DEFAULT_DIRECTIONS, probe=None,
                  select_tol=None, cluster_angle=DEFAULT_CLUSTER_ANGLE):
    """
    Unit flow directions -grad^ phi at several points, with the tie-break
    used by the tracer.

    Near-minimal directions are selected per point. The anchor is the
    lowest-ratio direction when `previous` is None, otherwise the selected
    direction closest in angle to the previous step. The flow direction is
    the normalised mean of the selected directions within `cluster_angle`
    of the anchor.

    Args:
        points: (n, d) positions off the target.
        previous: (n, d) previous step directions, or None.

    Returns:
        tuple: (directions (n, d), valid (n,) bool). Invalid rows have no
        reachable foot and carry NaN.
    """
    points = np.asarray(points, dtype=float)
    directions = unit_directions(points.shape[1], n_directions)
    probe = phi.dt if probe is None else float(probe)
    if select_tol is None:
        select_tol = 2.0 * (1.0 - math.cos(2.0 * math.pi / max(directions.shape[0], 2)))

    ratios = descent_ratios(phi, field, t, points, directions, probe)
    minimum = ratios.min(axis=1)
    valid = np.isfinite(minimum)
    selected = ratios <= minimum[:, None] + select_tol

    if previous is None:
        anchor = np.argmin(ratios, axis=1)
    else:
        closeness = np.where(selected, np.asarray(previous) @ directions.T, -np.inf)
        anchor = np.argmax(closeness, axis=1)
    cosines = directions @ directions.T
    near_anchor = cosines[anchor] >= math.cos(cluster_angle) - 1e-12
    members = (selected & near_anchor).astype(float)
    mean = members @ directions
    norms = np.linalg.norm(mean, axis=1)
    result = np.full_like(points, np.nan)
    good = valid & (norms > 0)
    result[good] = mean[good] / norms[good, None]
    return result, good


def trace_many(phi, field, target, t0, starts, n_directions=DEFAULT_DIRECTIONS, probe=None, select_tol=None,
               cluster_angle=DEFAULT_CLUSTER_ANGLE):
    """
    Euler integration of the optimal flow x' = -k grad^ phi from several
    starting points, all advanced together.

    Paths are constant on [0, t0]; a path exits at the first node within
    h of the target and stays constant afterwards.

    Returns:
        tuple: (paths (m, n_nodes, d), exit_times (m,)) with exit times
        relative to t0 and +inf for paths that never reached the target.
    """
    grid = phi.grid
    dt = grid.dt.value
    h = grid.h.value
    n_nodes = grid.n_steps + 1
    k0 = grid_index(t0, dt, "Start time")
    if not 0 <= k0 < n_nodes:
        raise ValueError(f"Start time {t0} lies outside the horizon {grid.horizon}.")

    starts = np.asarray(starts, dtype=float).reshape(-1, grid.dim)
    m = starts.shape[0]
    paths = np.empty((m, n_nodes, grid.dim))
    paths[:, : k0 + 1] = starts[:, None, :]
    exit_times = np.full(m, math.inf)

    position = starts.copy()
    active = target.distance(position) > h
    exit_times[~active] = 0.0
    previous = None
    for k in range(k0, n_nodes - 1):
        idx = np.flatnonzero(active)
        if idx.size:
            t = k * dt
            step, good = flow_velocity(phi, field, t, position[idx],
                                       None if previous is None else previous[idx],
                                       n_directions, probe, select_tol, cluster_angle)
            if previous is None:
                previous = np.zeros_like(position)
            moving = idx[good]
            speeds = field.evaluate(phi.population, t, position[moving])
            position[moving] = position[moving] + dt * speeds[:, None] * step[good]
            previous[moving] = step[good]
            stuck = idx[~good]
            if stuck.size:
                active[stuck] = False
            arrived = moving[target.distance(position[moving]) <= h]
            exit_times[arrived] = (k + 1 - k0) * dt
            active[arrived] = False
        paths[:, k + 1] = position
    return paths, exit_times


def trace_optimal_trajectory(phi, field, target, t0, x0, n_directions=DEFAULT_DIRECTIONS, probe=None,
                             select_tol=None, cluster_angle=DEFAULT_CLUSTER_ANGLE) -> PolylineTrajectory:
    """
    An optimal trajectory from (t0, x0), traced along the normalised
    gradient flow.

    Raises:
        TracingError: The path did not reach the target within the horizon.
    """
    x0 = np.asarray(x0, dtype=float).reshape(1, -1)
    if not phi.grid.inside(x0)[0]:
        raise ValueError(f"Start point {x0[0].tolist()} lies outside the grid box.")
    paths, exit_times = trace_many(phi, field, target, t0, x0, n_directions, probe, select_tol, cluster_angle)
    if not math.isfinite(exit_times[0]):
        raise TracingError(f"Trajectory from x0 = {x0[0].tolist()} at t0 = {t0} did not reach the target "
                           f"within the horizon {phi.grid.horizon:g}; enlarge the box or the horizon.")
    return PolylineTrajectory(paths[0], phi.dt, t0, exit_times[0])
