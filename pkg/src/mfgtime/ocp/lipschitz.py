import numpy as np


def empirical_lipschitz(phi, radius):
    """
    Largest finite-difference quotients of phi between neighbouring grid
    nodes that both lie in the ball B_R and have finite values.

    Returns:
        tuple: (spatial constant, temporal constant)
    """
    grid = phi.grid
    inside = (np.linalg.norm(grid.nodes(), axis=1) <= radius).reshape(grid.shape)
    values = phi.values

    spatial = 0.0
    for axis in range(grid.dim):
        lower = [slice(None)] * grid.dim
        upper = [slice(None)] * grid.dim
        lower[axis] = slice(0, -1)
        upper[axis] = slice(1, None)
        both = inside[tuple(lower)] & inside[tuple(upper)]
        first = values[(slice(None),) + tuple(lower)]
        second = values[(slice(None),) + tuple(upper)]
        ok = both[None] & np.isfinite(first) & np.isfinite(second)
        if ok.any():
            spatial = max(spatial, float(np.abs(second - first)[ok].max()) / grid.h.value)

    temporal = 0.0
    if phi.n_steps > 0:
        first, second = values[:-1], values[1:]
        ok = inside[None] & np.isfinite(first) & np.isfinite(second)
        if ok.any():
            temporal = float(np.abs(second - first)[ok].max()) / grid.dt.value
    return spatial, temporal
