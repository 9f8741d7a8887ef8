"""
Seeded sampling of test points and finite-difference probes shared by
the checks.
"""

import numpy as np

# Second differences above KINK_FACTOR * h / K_max mark a gradient jump.
KINK_FACTOR = 0.5

# Fixed stream tags, one per randomised check.
STREAMS = {
    "dpp": 1,
    "time_monotonicity": 2,
    "u_equals_w": 3,
    "normalized_gradient": 4,
    "ratio_sensitivity": 5,
    "optimality_converse": 6,
    "mfg_system": 7,
}


def check_rng(seed, check, population=0) -> np.random.Generator:
    """Generator of one check for one population, independent of call order."""
    return np.random.default_rng([int(seed), STREAMS[check], int(population)])


def scheme_tolerance(grid) -> float:
    """h + dt, the unit in which scheme accuracy is measured."""
    return grid.h.value + grid.dt.value


def sample_points(phi, rng, count, t=0.0, min_distance=None, margin=None, oversample=20):
    """
    Up to `count` uniform points in the box, at least `min_distance` from
    the target and `margin` from the box faces, where phi(t, .) is finite.
    """
    grid = phi.grid
    h = grid.h.value
    min_distance = 2.0 * h if min_distance is None else min_distance
    margin = 2.0 * h if margin is None else margin
    lo = grid.lo + margin
    hi = grid.hi - margin
    if np.any(hi <= lo):
        return np.empty((0, grid.dim))
    candidates = rng.uniform(lo, hi, size=(oversample * count, grid.dim))
    keep = phi.target.distance(candidates) > min_distance
    candidates = candidates[keep]
    if candidates.shape[0]:
        candidates = candidates[np.isfinite(phi.evaluate(t, candidates))]
    return candidates[:count]


def fd_probe(phi, t, points, k_max, step=None):
    """
    Central-difference gradient and kink flags of phi(t, .) at points.

    Returns:
        tuple: (gradients (n, d), kink (n,) bool, finite (n,) bool)
    """
    grid = phi.grid
    step = grid.h.value if step is None else step
    points = np.asarray(points, dtype=float)
    n, dim = points.shape
    centre = phi.evaluate(t, points)
    gradients = np.zeros((n, dim))
    second = np.zeros((n, dim))
    finite = np.isfinite(centre)
    for axis in range(dim):
        offset = np.zeros(dim)
        offset[axis] = step
        plus = phi.evaluate(t, points + offset)
        minus = phi.evaluate(t, points - offset)
        finite &= np.isfinite(plus) & np.isfinite(minus)
        with np.errstate(invalid="ignore"):
            gradients[:, axis] = (plus - minus) / (2.0 * step)
            second[:, axis] = plus - 2.0 * centre + minus
    kink = np.any(np.abs(np.nan_to_num(second, nan=np.inf)) > KINK_FACTOR * step / k_max, axis=1)
    return gradients, kink, finite


def angle_between(first, second) -> np.ndarray:
    """Row-wise angles (rad) between two arrays of nonzero vectors."""
    first = np.asarray(first, dtype=float)
    second = np.asarray(second, dtype=float)
    cosine = np.sum(first * second, axis=1) / (np.linalg.norm(first, axis=1) * np.linalg.norm(second, axis=1))
    return np.arccos(np.clip(cosine, -1.0, 1.0))
