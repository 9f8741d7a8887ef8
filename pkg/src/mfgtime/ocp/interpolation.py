import numpy as np
from scipy.ndimage import map_coordinates

# Interpolation weight on an infinite corner above which the result is infinite.
INFINITE_WEIGHT_TOL = 1e-9


def _sample(array, coordinates):
    return map_coordinates(array, coordinates, order=1, mode="nearest", prefilter=False)


def split_infinite(values):
    """Finite part (inf replaced by 0) and the indicator of infinite nodes, or None if all finite."""
    finite = np.isfinite(values)
    if finite.all():
        return values, None
    return np.where(finite, values, 0.0), (~finite).astype(float)


def interpolate(values, grid, points, parts=None) -> np.ndarray:
    """
    Multilinear interpolation of node values at arbitrary points.

    A point is +inf when it lies outside the grid box or when an infinite
    node carries interpolation weight.

    Args:
        values: Array shaped like the grid, may hold +inf.
        grid: SpaceTimeGrid (spatial part is used).
        points: (n, d) positions.
        parts: Precomputed `split_infinite(values)` to reuse across calls.

    Returns:
        np.ndarray: (n,) interpolated values.
    """
    filled, indicator = split_infinite(values) if parts is None else parts
    coordinates = grid.index_coordinates(points)
    result = _sample(filled, coordinates)
    if indicator is not None:
        result[_sample(indicator, coordinates) > INFINITE_WEIGHT_TOL] = np.inf
    result[~grid.inside(points)] = np.inf
    return result
