"""
Semi-Lagrangian discretisation of the dynamic programming principle

    phi(t_n, x) = min_u  dt + phi(t_{n+1}, x + dt k(t_n, x) u),

with u ranging over M sampled unit directions and phi(t_{n+1}, .)
interpolated multilinearly between grid nodes. Target nodes hold 0 and
feet leaving the box hold +inf.
"""

import numpy as np
from scipy.ndimage import map_coordinates

from mfgtime.core.constants import DEFAULT_DIRECTIONS, DEFAULT_MAX_SWEEPS, DEFAULT_STATIONARY_TOL_FACTOR
from mfgtime.core.errors import EmptyTargetError, StationarySolveError
from mfgtime.ocp.directions import unit_directions
from mfgtime.ocp.interpolation import INFINITE_WEIGHT_TOL, interpolate, split_infinite
from mfgtime.ocp.value_field import ValueField
from mfgtime.utils.formatting import info

_DIRECTION_CHUNK = 16


def target_mask(target, grid) -> np.ndarray:
    """Grid nodes within one spacing h of the target."""
    mask = (target.distance(grid.nodes()) <= grid.h.value * (1.0 + 1e-12)).reshape(grid.shape)
    if not mask.any():
        raise EmptyTargetError(f"No grid node lies within h = {grid.h.value:g} of the target {target!r}.")
    return mask


def time_step(next_values, grid, speeds, directions, dt, mask) -> np.ndarray:
    """One backward step of the scheme for every node at once."""
    nodes = grid.nodes()
    flat_speeds = np.asarray(speeds).reshape(-1)
    parts = split_infinite(next_values)
    best = np.full(nodes.shape[0], np.inf)
    for start in range(0, directions.shape[0], _DIRECTION_CHUNK):
        chunk = directions[start:start + _DIRECTION_CHUNK]
        feet = nodes[None, :, :] + dt * flat_speeds[None, :, None] * chunk[:, None, :]
        values = interpolate(next_values, grid, feet.reshape(-1, grid.dim), parts=parts)
        best = np.minimum(best, values.reshape(chunk.shape[0], -1).min(axis=0))
    result = (dt + best).reshape(grid.shape)
    result[mask] = 0.0
    return result


def _sweep_orderings(grid):
    """Slice orderings: every axis, forwards and backwards."""
    orderings = []
    for axis in range(grid.dim):
        count = grid.shape[axis]
        orderings.append((axis, range(count)))
        orderings.append((axis, range(count - 1, -1, -1)))
    return orderings


def stationary_solve(speeds, mask, grid, directions, dt, tol=None, max_sweeps=DEFAULT_MAX_SWEEPS,
                     verbose=False) -> np.ndarray:
    """
    Minimal time to the target for a frozen speed field.

    Block Gauss-Seidel: the grid is swept slice by slice along each axis in
    both orders, every slice being updated from the current values. The
    update at a node solves its own direction-wise fixed point
    v = dt + w v + rest exactly, where w is the interpolation weight the
    node puts on itself. Sweeping starts from +inf off the target and stops
    once a sweep changes no node by `tol` or more.

    Args:
        speeds: Node speeds shaped like the grid.
        mask: Target mask shaped like the grid.
        grid: SpaceTimeGrid.
        directions: (M, d) unit directions.
        dt: Step length in time.
        tol: Convergence tolerance (default 1e-6 dt).
        max_sweeps: Sweep budget.

    Returns:
        np.ndarray: Values shaped like the grid.

    Raises:
        StationarySolveError: No convergence within `max_sweeps`.
    """
    tol = DEFAULT_STATIONARY_TOL_FACTOR * dt if tol is None else tol
    h = grid.h.value
    nodes = grid.nodes()
    flat_mask = np.asarray(mask).reshape(-1)
    flat_speeds = np.asarray(speeds, dtype=float).reshape(-1)

    values = np.where(flat_mask, 0.0, np.inf)
    filled = np.zeros_like(values)
    indicator = (~flat_mask).astype(float)
    filled_grid = filled.reshape(grid.shape)
    indicator_grid = indicator.reshape(grid.shape)

    displacement = dt * flat_speeds[:, None, None] * directions[None, :, :]
    self_weight = np.prod(np.clip(1.0 - np.abs(displacement) / h, 0.0, None), axis=2)
    feet = nodes[:, None, :] + displacement
    feet_outside = ~grid.inside(feet.reshape(-1, grid.dim)).reshape(feet.shape[:2])
    coordinates = (feet - grid.lo) / h

    index = np.indices(grid.shape).reshape(grid.dim, -1)
    members = [[np.flatnonzero((index[axis] == s) & ~flat_mask) for s in range(grid.shape[axis])]
               for axis in range(grid.dim)]

    sweeps = 0
    change = np.inf
    while sweeps < max_sweeps:
        for axis, order in _sweep_orderings(grid):
            change = 0.0
            for s in order:
                free = members[axis][s]
                if free.size == 0:
                    continue
                coords = coordinates[free].reshape(-1, grid.dim).T
                weight = self_weight[free]
                rest = map_coordinates(filled_grid, coords, order=1, mode="nearest", prefilter=False)
                rest = rest.reshape(weight.shape) - weight * filled[free, None]
                blocked = feet_outside[free]
                if indicator.any():
                    touched = map_coordinates(indicator_grid, coords, order=1, mode="nearest", prefilter=False)
                    touched = touched.reshape(weight.shape) - weight * indicator[free, None]
                    blocked = blocked | (touched > INFINITE_WEIGHT_TOL)
                candidates = (dt + rest) / (1.0 - weight)
                candidates[blocked] = np.inf
                old = values[free]
                new = np.minimum(candidates.min(axis=1), old)
                improved = new < old
                if improved.any():
                    was_infinite = ~np.isfinite(old[improved])
                    delta = old[improved] - new[improved]
                    change = max(change, np.inf if was_infinite.any() else float(delta.max()))
                    values[free] = new
                    finite = np.isfinite(new)
                    filled[free] = np.where(finite, new, 0.0)
                    indicator[free] = (~finite).astype(float)
            sweeps += 1
            if change < tol:
                if verbose:
                    print(info(f"Stationary solve converged after {sweeps} sweeps."))
                return values.reshape(grid.shape)
            if sweeps >= max_sweeps:
                break
    raise StationarySolveError(f"Stationary solve did not converge within {max_sweeps} sweeps "
                               f"(last change {change:.3e} >= tolerance {tol:.3e}).")


def solve_value_function(field, target, grid, population=0, n_directions=DEFAULT_DIRECTIONS,
                         max_sweeps=DEFAULT_MAX_SWEEPS, stationary_tol=None, certified_radius=None,
                         verbose=False) -> ValueField:
    """
    Value function of the minimal-time problem of one population.

    The terminal slice at the horizon is the stationary solution for the
    frozen field; earlier slices follow by backward steps of the scheme.
    A time-independent field has the stationary solution at every time.

    Raises:
        CFLViolationError: dt > h / K_max.
        EmptyTargetError: No node lies within h of the target.
        StationarySolveError: The terminal solve did not converge.
    """
    grid.check_cfl(field.k_max)
    mask = target_mask(target, grid)
    directions = unit_directions(grid.dim, n_directions)
    dt = grid.dt.value
    n_steps = grid.n_steps

    values = np.empty((n_steps + 1,) + grid.shape)
    values[n_steps] = stationary_solve(field.node_speeds(population, n_steps, grid), mask, grid,
                                       directions, dt, stationary_tol, max_sweeps, verbose)
    if field.time_independent:
        values[:] = values[n_steps]
    else:
        for n in range(n_steps - 1, -1, -1):
            values[n] = time_step(values[n + 1], grid, field.node_speeds(population, n, grid),
                                  directions, dt, mask)
    return ValueField(grid, values, mask, target, population, certified_radius)
