import numpy as np

from mfgtime.core.constants import WEIGHT_SUM_TOL


def as_points(points, dim=None) -> np.ndarray:
    """
    Coerces positions to a float array of shape (n, d).

    A 1-D input is read as n positions on the line (d = 1) unless `dim`
    says otherwise, in which case it is read as a single d-dimensional point.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 0:
        points = points.reshape(1, 1)
    elif points.ndim == 1:
        if dim is not None and dim > 1:
            if points.size == 0:
                return points.reshape(0, dim)
            points = points.reshape(1, -1)
        else:
            points = points.reshape(-1, 1)
    elif points.ndim != 2:
        raise ValueError(f"Positions must be a 2-D array of shape (n, d), got shape {points.shape}.")
    if dim is not None and points.shape[1] != dim and points.shape[0] > 0:
        raise ValueError(f"Dimension mismatch: expected d = {dim}, got d = {points.shape[1]}.")
    return points


class EmpiricalMeasure:
    """
    A weighted particle cloud m = sum_j w_j delta_{x_j} on R^d.

    Weights are nonnegative and sum to one. The only exception is the
    zero measure with no atoms, which stands for "no other population"
    in single-population games.
    """

    def __init__(self, points, weights=None, dim=None, normalize=False):
        points = as_points(points, dim)
        n = points.shape[0]
        if weights is None:
            weights = np.full(n, 1.0 / n) if n else np.zeros(0)
        weights = np.asarray(weights, dtype=float).reshape(-1)

        if weights.shape[0] != n:
            raise ValueError(f"Got {n} points but {weights.shape[0]} weights.")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise ValueError("Measure weights must be finite and nonnegative.")
        if not np.all(np.isfinite(points)):
            raise ValueError("Measure positions must be finite.")
        if n:
            total = weights.sum()
            if normalize:
                if total <= 0:
                    raise ValueError("Cannot normalize a measure with zero total mass.")
                weights = weights / total
            elif abs(total - 1.0) > WEIGHT_SUM_TOL:
                raise ValueError(f"Measure weights must sum to 1 (got {total:.15g}).")

        self._points = points.copy()
        self._weights = weights.copy()
        self._points.setflags(write=False)
        self._weights.setflags(write=False)

    @classmethod
    def zero(cls, dim):
        """The zero-atom measure of dimension `dim`."""
        return cls(np.zeros((0, dim)), np.zeros(0), dim=dim)

    @classmethod
    def dirac(cls, point):
        point = np.asarray(point, dtype=float).reshape(1, -1)
        return cls(point, [1.0])

    @classmethod
    def mixture(cls, measures, coefficients):
        """
        Concatenates atoms of several measures with weights scaled by the
        given nonnegative coefficients (which must sum to one).
        """
        pairs = [(measure, c) for measure, c in zip(measures, coefficients) if c > 0 and measure.n_atoms]
        if not pairs:
            raise ValueError("A mixture needs at least one nonempty measure with positive coefficient.")
        points = np.concatenate([measure.points for measure, _ in pairs])
        weights = np.concatenate([c * measure.weights for measure, c in pairs])
        return cls(points, weights, normalize=True)

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def n_atoms(self) -> int:
        return self._points.shape[0]

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    @property
    def total_mass(self) -> float:
        return float(self._weights.sum())

    @property
    def is_zero(self) -> bool:
        return self.n_atoms == 0

    def mass_in_ball(self, radius, center=None) -> float:
        """Mass of the closed ball of given radius (around the origin by default)."""
        if self.is_zero:
            return 0.0
        center = np.zeros(self.dim) if center is None else np.asarray(center, dtype=float)
        distances = np.linalg.norm(self._points - center, axis=1)
        return float(self._weights[distances <= radius].sum())

    def support_radius(self, center=None) -> float:
        """Largest distance of an atom from the centre (origin by default)."""
        if self.is_zero:
            return 0.0
        center = np.zeros(self.dim) if center is None else np.asarray(center, dtype=float)
        return float(np.linalg.norm(self._points - center, axis=1).max())

    def mean(self) -> np.ndarray:
        return self._weights @ self._points

    def __repr__(self):
        return f"EmpiricalMeasure(n_atoms={self.n_atoms}, dim={self.dim})"
