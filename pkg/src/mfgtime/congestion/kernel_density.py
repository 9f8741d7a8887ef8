import math

import numpy as np
from scipy.spatial.distance import cdist

from mfgtime.model.measures import EmpiricalMeasure, as_points

_CHUNK = 4096


def gaussian_peak(sigma, dim) -> float:
    """G_sigma(0) = (2 pi sigma^2)^(-d/2)."""
    return (2.0 * math.pi * sigma * sigma) ** (-0.5 * dim)


def kernel_gradient_sup(sigma, dim) -> float:
    """sup |grad G_sigma| = G_sigma(0) * exp(-1/2) / sigma, attained at |x| = sigma."""
    return gaussian_peak(sigma, dim) * math.exp(-0.5) / sigma


def kernel_density(measure: EmpiricalMeasure, points, sigma) -> np.ndarray:
    """
    Gaussian kernel density rho(x) = sum_j w_j G_sigma(x - p_j) at each point.

    Args:
        measure: Particle measure; the zero measure gives rho = 0.
        points: (n, d) evaluation positions, or one d-dimensional position.
        sigma: Bandwidth > 0.

    Returns:
        np.ndarray: Densities of shape (n,).
    """
    if sigma <= 0:
        raise ValueError(f"Kernel bandwidth must be positive, got {sigma}.")
    dim = measure.dim
    points = as_points(points, dim)
    if measure.is_zero:
        return np.zeros(points.shape[0])

    peak = gaussian_peak(sigma, dim)
    scale = -0.5 / (sigma * sigma)
    density = np.empty(points.shape[0])
    for start in range(0, points.shape[0], _CHUNK):
        block = points[start:start + _CHUNK]
        kernel = np.exp(scale * cdist(block, measure.points, "sqeuclidean"))
        density[start:start + _CHUNK] = peak * (kernel @ measure.weights)
    return density


def density_grid(measure: EmpiricalMeasure, grid, sigma) -> np.ndarray:
    """Kernel density on every node of a SpaceTimeGrid, shaped like the grid."""
    return kernel_density(measure, grid.nodes(), sigma).reshape(grid.shape)
