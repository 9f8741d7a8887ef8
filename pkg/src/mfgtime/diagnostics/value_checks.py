"""
Checks on a solved value function: dynamic programming, the
Hamilton-Jacobi residual, time monotonicity, a-priori bounds and the
stability of the descent-ratio probe.
"""

import math

import numpy as np

from mfgtime.core.constants import DEFAULT_ANGLE_TOL_DEG, DEFAULT_DIRECTIONS
from mfgtime.diagnostics.report import INFO, CheckResult
from mfgtime.diagnostics.sampling import KINK_FACTOR, sample_points, scheme_tolerance
from mfgtime.model.bounds import lipschitz_bounds, origin_distance, psi_T_bounds
from mfgtime.model.trajectories import grid_index
from mfgtime.ocp.directions import ratio_sensitivity
from mfgtime.ocp.lipschitz import empirical_lipschitz
from mfgtime.ocp.tracing import trace_many

RESIDUAL_LEVEL = 0.1
HJ_MAX_SLICES = 20


def _check_grid(phi, bundle):
    if bundle.n_nodes != phi.n_steps + 1 or abs(bundle.dt - phi.dt) > 1e-12:
        raise ValueError("Bundle and value field live on different time grids.")


def _node_values(phi, paths):
    """phi(t_k, paths[:, k]) for every member and node."""
    values = np.empty(paths.shape[:2])
    for k in range(paths.shape[1]):
        values[:, k] = phi.evaluate_slice(k, paths[:, k, :])
    return values


def _step_masks(t0s, exit_times, dt, n_nodes):
    """Steps k -> k+1 taken after the start and before the exit, per member."""
    k = np.arange(n_nodes - 1)[None, :]
    starts = np.array([grid_index(t0, dt, "Start time") for t0 in t0s])[:, None]
    finite = np.isfinite(exit_times)
    exits = np.where(finite, starts[:, 0] + np.rint(np.where(finite, exit_times, 0.0) / dt), n_nodes - 1)
    return (k >= starts) & (k < exits[:, None]), finite


def dpp_residuals(phi, paths, t0s, exit_times):
    """
    Per-step DPP residuals phi(t_{k+1}, x_{k+1}) + dt - phi(t_k, x_k).

    Returns:
        tuple: (residuals of members that exit, residuals of members that
        never exit); non-finite values are dropped.
    """
    dt = phi.dt
    values = _node_values(phi, paths)
    steps = values[:, 1:] + dt - values[:, :-1]
    active, exits = _step_masks(t0s, exit_times, dt, paths.shape[1])
    valid = active & np.isfinite(steps)
    return steps[valid & exits[:, None]], steps[valid & ~exits[:, None]]


def random_one_steps(phi, field, rng, samples):
    """phi(t + dt, x + dt k u) + dt - phi(t, x) for random off-target nodes, times and unit u."""
    grid = phi.grid
    if phi.n_steps == 0:
        return np.empty(0)
    nodes = grid.nodes()
    candidates = np.flatnonzero(~phi.target_mask.reshape(-1))
    if candidates.size == 0:
        return np.empty(0)
    picks = candidates[rng.integers(0, candidates.size, size=samples)]
    times = rng.integers(0, phi.n_steps, size=samples)
    directions = rng.normal(size=(samples, grid.dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    residuals = np.empty(samples)
    for j, (node, n, u) in enumerate(zip(picks, times, directions)):
        x = nodes[node:node + 1]
        k = field.evaluate(phi.population, n * phi.dt, x)[0]
        here = phi.evaluate_slice(n, x)[0]
        there = phi.evaluate_slice(n + 1, x + phi.dt * k * u)[0]
        residuals[j] = there + phi.dt - here
    return residuals[np.isfinite(residuals)]


def check_dpp(phi, bundle, field, rng=None, samples=200) -> CheckResult:
    """
    Equality along the bundle's optimal members and the inequality for
    random admissible one-steps and for members that never exit.
    """
    _check_grid(phi, bundle)
    tol = 2.0 * scheme_tolerance(phi.grid)
    equality, stuck = dpp_residuals(phi, bundle.paths, bundle.t0s, bundle.exit_times)
    rng = np.random.default_rng(0) if rng is None else rng
    inequality = np.concatenate([random_one_steps(phi, field, rng, samples), stuck])

    max_equality = float(np.abs(equality).max()) if equality.size else 0.0
    min_inequality = float(inequality.min()) if inequality.size else 0.0
    measured = {
        "max_equality_residual": max_equality,
        "mean_equality_residual": float(np.abs(equality).mean()) if equality.size else 0.0,
        "min_inequality_residual": min_inequality,
    }
    details = {"optimal_steps": int(equality.size), "inequality_samples": int(inequality.size)}
    passed = max_equality <= tol and min_inequality >= -tol
    return CheckResult.decide("dpp", passed, measured, tol,
                              "The value drops by one time step per step along optimal paths "
                              "and by at most that along any admissible step.", details)


def _interior(array, axis, offset):
    index = [slice(1, -1)] * array.ndim
    index[axis] = slice(1 + offset, array.shape[axis] - 1 + offset)
    return array[tuple(index)]


def _hj_slices(n_steps, max_slices):
    if n_steps < 2:
        return np.array([n_steps])
    return np.unique(np.rint(np.linspace(1, n_steps - 1, max_slices)).astype(int))


def hj_residuals(phi, field, max_slices=HJ_MAX_SLICES):
    """
    |-d_t phi + k |grad phi| - 1| at interior off-target nodes by central
    differences.

    Returns:
        tuple: (residuals at smooth nodes, number of nodes excluded as kinks)
    """
    grid = phi.grid
    h = grid.h.value
    dt = grid.dt.value
    if any(n < 3 for n in grid.shape):
        return np.empty(0), 0
    values = phi.values
    mask = phi.target_mask
    near_target = _interior(mask, 0, 0).copy()
    for axis in range(grid.dim):
        near_target |= _interior(mask, axis, -1) | _interior(mask, axis, 1)

    residuals = []
    kinks = 0
    for n in _hj_slices(phi.n_steps, max_slices):
        slab = values[n]
        if 0 < n < phi.n_steps:
            with np.errstate(invalid="ignore"):
                time_derivative = _interior((values[n + 1] - values[n - 1]) / (2.0 * dt), 0, 0)
        else:
            time_derivative = np.zeros_like(_interior(slab, 0, 0))
        gradient_sq = np.zeros_like(time_derivative)
        spike = np.zeros_like(time_derivative)
        centre = _interior(slab, 0, 0)
        for axis in range(grid.dim):
            plus = _interior(slab, axis, 1)
            minus = _interior(slab, axis, -1)
            with np.errstate(invalid="ignore"):
                gradient_sq = gradient_sq + ((plus - minus) / (2.0 * h)) ** 2
                spike = np.maximum(spike, np.abs(plus - 2.0 * centre + minus))
        speeds = _interior(field.node_speeds(phi.population, n, grid), 0, 0)
        with np.errstate(invalid="ignore"):
            residual = np.abs(-time_derivative + speeds * np.sqrt(gradient_sq) - 1.0)
        usable = np.isfinite(residual) & np.isfinite(centre) & ~near_target
        kink = usable & (spike > KINK_FACTOR * h / field.k_max)
        kinks += int(kink.sum())
        residuals.append(residual[usable & ~kink])
    return np.concatenate(residuals), kinks


def check_hj_residual(phi, field, max_slices=HJ_MAX_SLICES) -> CheckResult:
    tol = 5.0 * scheme_tolerance(phi.grid)
    residuals, kinks = hj_residuals(phi, field, max_slices)
    median = float(np.median(residuals)) if residuals.size else 0.0
    measured = {
        "median_residual": median,
        "fraction_below_0.1": float(np.mean(residuals <= RESIDUAL_LEVEL)) if residuals.size else 1.0,
    }
    details = {"tested_nodes": int(residuals.size), "kink_nodes_excluded": kinks}
    return CheckResult.decide("hj_residual", median <= tol, measured, tol,
                              "The value function satisfies -d_t phi + k |grad phi| = 1 at smooth "
                              "interior nodes; nodes at gradient jumps are excluded and counted.", details)


def time_quotients(phi, rng, samples=200):
    """[phi(t1, x) - phi(t0, x)] / (t1 - t0) with their time gaps, at random off-target nodes."""
    if phi.n_steps == 0:
        return np.empty(0), np.empty(0)
    candidates = np.flatnonzero(~phi.target_mask.reshape(-1))
    if candidates.size == 0:
        return np.empty(0), np.empty(0)
    nodes = candidates[rng.integers(0, candidates.size, size=samples)]
    pairs = np.sort(rng.integers(0, phi.n_steps + 1, size=(samples, 2)), axis=1)
    keep = pairs[:, 0] < pairs[:, 1]
    nodes, pairs = nodes[keep], pairs[keep]
    flat = phi.values.reshape(phi.n_steps + 1, -1)
    first = flat[pairs[:, 0], nodes]
    second = flat[pairs[:, 1], nodes]
    gaps = (pairs[:, 1] - pairs[:, 0]) * phi.dt
    finite = np.isfinite(first) & np.isfinite(second)
    return ((second - first) / gaps)[finite], gaps[finite]


def check_time_monotonicity(phi, rng=None, samples=200) -> CheckResult:
    tol = 2.0 * scheme_tolerance(phi.grid)
    rng = np.random.default_rng(0) if rng is None else rng
    quotients, gaps = time_quotients(phi, rng, samples)
    if quotients.size:
        c_est = float(quotients.min() + 1.0)
        c_tolerant = float((quotients + tol / gaps).min() + 1.0)
    else:
        c_est = c_tolerant = 1.0
    measured = {"c_est": c_est, "c_est_with_tolerance": c_tolerant}
    return CheckResult.decide("time_monotonicity", c_tolerant > 0.0, measured, tol,
                              "Time difference quotients of the value stay above c - 1 for some c > 0.",
                              {"samples": int(quotients.size)})


def value_bound_excess(phi, k_min, k_max):
    """
    max over eligible nodes and times of phi(t, x) - T(|x|).

    Eligible nodes have both |x| and D0 inside the inscribed radius, so
    the path through the origin to the target stays in the box.
    """
    grid = phi.grid
    radii = np.linalg.norm(grid.nodes(), axis=1)
    d0 = origin_distance(phi.target)
    eligible = np.maximum(radii, d0) <= grid.inscribed_radius() + 1e-12
    if not eligible.any():
        return -math.inf, 0
    bound, _ = psi_T_bounds(phi.target, k_min, k_max, radii[eligible])
    values = phi.values.reshape(phi.n_steps + 1, -1)[:, eligible]
    return float((values - bound[None, :]).max()), int(eligible.sum())


def check_value_bound(phi, k_min, k_max) -> CheckResult:
    tol = phi.dt + scheme_tolerance(phi.grid)
    excess, nodes = value_bound_excess(phi, k_min, k_max)
    return CheckResult.decide("value_bound", excess <= tol, {"max_excess": excess}, tol,
                              "The value never exceeds the exit-time bound T(|x|) = (|x| + D0) / K_min.",
                              {"nodes": nodes})


def check_lipschitz(phi, k_min, k_max, speed_lipschitz, radius, measure_lipschitz=(0.0, 0.0)) -> CheckResult:
    spatial, temporal = empirical_lipschitz(phi, radius)
    c_r, m_r = lipschitz_bounds(phi.target, k_min, k_max, speed_lipschitz, radius)
    measured = {"spatial": spatial, "temporal": temporal}
    details = {"R": radius, "L_x": speed_lipschitz,
               "L_W1_own": measure_lipschitz[0], "L_W1_other": measure_lipschitz[1]}
    return CheckResult("lipschitz", INFO, measured, {"spatial": c_r, "temporal": m_r},
                       "Empirical space and time Lipschitz constants of the value on B_R next to "
                       "their a-priori bounds.", details)


def check_ratio_sensitivity(phi, field, rng=None, samples=50, n_directions=DEFAULT_DIRECTIONS,
                            probe=None, angle_tol=DEFAULT_ANGLE_TOL_DEG) -> CheckResult:
    rng = np.random.default_rng(0) if rng is None else rng
    points = sample_points(phi, rng, samples)
    angles, changes = [], []
    for x in points:
        sensitivity = ratio_sensitivity(phi, field, 0.0, x, n_directions, probe)
        if math.isfinite(sensitivity["angle"]):
            angles.append(math.degrees(sensitivity["angle"]))
            changes.append(sensitivity["ratio_change"])
    measured = {
        "median_angle_deg": float(np.median(angles)) if angles else 0.0,
        "max_angle_deg": float(np.max(angles)) if angles else 0.0,
        "max_ratio_change": float(np.max(changes)) if changes else 0.0,
    }
    return CheckResult("ratio_sensitivity", INFO, measured, {"angle_deg": angle_tol},
                       "Minimising direction and minimal ratio probed at h' and 2h'.",
                       {"samples": len(angles)})


def check_optimality_converse(phi, field, rng=None, samples=30, tracing_options=None) -> CheckResult:
    """
    Paths that wait at x0 until t0 > 0 and then follow the optimal flow
    reach the target in phi(t0, x0) and satisfy the DPP equality.
    """
    grid = phi.grid
    tol_step = 2.0 * scheme_tolerance(grid)
    tol_gap = 5.0 * scheme_tolerance(grid)
    rng = np.random.default_rng(0) if rng is None else rng
    options = dict(tracing_options or {})
    if phi.n_steps < 4:
        return CheckResult.decide("optimality_converse", True, {"max_gap": 0.0, "max_step_residual": 0.0},
                                  tol_step, "Vacuous: the horizon has fewer than four steps.")

    gaps, step_residuals, failed, tested = [], [], 0, 0
    for k0 in (phi.n_steps // 4, phi.n_steps // 2):
        t0 = k0 * phi.dt
        points = sample_points(phi, rng, samples, t=t0)
        if points.shape[0] == 0:
            continue
        reachable = phi.evaluate(t0, points) + t0 <= grid.horizon - 2.0 * phi.dt
        points = points[reachable]
        if points.shape[0] == 0:
            continue
        tested += points.shape[0]
        paths, exit_times = trace_many(phi, field, phi.target, t0, points, **options)
        exited = np.isfinite(exit_times)
        failed += int((~exited).sum())
        start_values = phi.evaluate(t0, points)
        gaps.append(((exit_times - start_values) / (1.0 + start_values))[exited])
        equality, _ = dpp_residuals(phi, paths[exited], np.full(exited.sum(), t0), exit_times[exited])
        step_residuals.append(np.abs(equality))

    gaps = np.concatenate(gaps) if gaps else np.empty(0)
    step_residuals = np.concatenate(step_residuals) if step_residuals else np.empty(0)
    max_gap = float(gaps.max()) if gaps.size else 0.0
    max_step = float(step_residuals.max()) if step_residuals.size else 0.0
    measured = {"max_gap": max_gap, "max_step_residual": max_step}
    passed = failed == 0 and max_gap <= tol_gap and max_step <= tol_step
    return CheckResult.decide("optimality_converse", passed, measured, tol_step,
                              "A path resting at x0 until t0 and then following the optimal flow is "
                              "optimal from (t0, x0): its exit time matches the value and the DPP "
                              "equality holds along it.",
                              {"tested": tested, "not_exited": failed, "gap_tolerance": tol_gap})
