from abc import ABC, abstractmethod

import numpy as np
from scipy.spatial.distance import cdist

from mfgtime.core.errors import ConfigError
from mfgtime.model.measures import as_points
from mfgtime.utils.formatting import paragraph, table


class TargetPrimitive(ABC):
    """
    A closed, nonempty building block of a target set with an exact
    Euclidean distance function.
    """

    kind = None

    @property
    @abstractmethod
    def dim(self):
        pass

    @abstractmethod
    def distance(self, points) -> np.ndarray:
        """Distance from each of the (n, d) points to the primitive."""
        pass

    @abstractmethod
    def as_dict(self) -> dict:
        pass


class Ball(TargetPrimitive):
    kind = "ball"

    def __init__(self, center, radius):
        self.center = np.asarray(center, dtype=float).reshape(-1)
        self.radius = float(radius)
        if self.radius < 0:
            raise ConfigError(f"Ball radius must be nonnegative, got {radius}.")

    @property
    def dim(self):
        return self.center.size

    def distance(self, points):
        points = as_points(points, self.dim)
        return np.maximum(np.linalg.norm(points - self.center, axis=1) - self.radius, 0.0)

    def as_dict(self):
        return {"type": self.kind, "center": self.center.tolist(), "radius": self.radius}


class Box(TargetPrimitive):
    kind = "box"

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float).reshape(-1)
        self.hi = np.asarray(hi, dtype=float).reshape(-1)
        if self.lo.shape != self.hi.shape:
            raise ConfigError("Box corners must have the same dimension.")
        if np.any(self.lo > self.hi):
            raise ConfigError(f"Box must satisfy lo <= hi, got lo={self.lo.tolist()}, hi={self.hi.tolist()}.")

    @property
    def dim(self):
        return self.lo.size

    def distance(self, points):
        points = as_points(points, self.dim)
        excess = np.maximum(np.maximum(self.lo - points, points - self.hi), 0.0)
        return np.linalg.norm(excess, axis=1)

    def as_dict(self):
        return {"type": self.kind, "lo": self.lo.tolist(), "hi": self.hi.tolist()}


class PointCloud(TargetPrimitive):
    """Finitely many points, each thickened to a closed ball of radius `tolerance`."""

    kind = "points"

    def __init__(self, points, tolerance=0.0):
        self.points = as_points(points)
        self.tolerance = float(tolerance)
        if self.points.shape[0] == 0:
            raise ConfigError("A point-cloud target needs at least one point.")
        if self.tolerance < 0:
            raise ConfigError(f"Point-cloud tolerance must be nonnegative, got {tolerance}.")

    @property
    def dim(self):
        return self.points.shape[1]

    def distance(self, points):
        points = as_points(points, self.dim)
        nearest = cdist(points, self.points).min(axis=1)
        return np.maximum(nearest - self.tolerance, 0.0)

    def as_dict(self):
        return {"type": self.kind, "points": self.points.tolist(), "tolerance": self.tolerance}


class TargetPrimitiveFactory:
    _supported = {
        'ball': {
            'description': 'Closed ball: center, radius',
            'class': Ball,
        },
        'box': {
            'description': 'Closed axis-aligned box: lo, hi',
            'class': Box,
        },
        'points': {
            'description': 'Point cloud thickened by a tolerance: points, tolerance',
            'class': PointCloud,
        },
    }

    @classmethod
    def list_supported_primitives(cls):
        return list(cls._supported.keys())

    @classmethod
    def show_supported_primitives(cls):
        rows = [[name, config['description']] for name, config in cls._supported.items()]
        print(paragraph("Supported target primitives"))
        print(table(rows, headers=["Primitive", "Description"]))

    @classmethod
    def create(cls, spec: dict) -> TargetPrimitive:
        spec = dict(spec)
        kind = spec.pop("type", None)
        config = cls._supported.get(kind)
        if config is None:
            raise ConfigError(f"Unsupported target primitive: '{kind}'.\n "
                              f"Supported primitives: {cls.list_supported_primitives()}")
        try:
            return config['class'](**spec)
        except TypeError as exc:
            raise ConfigError(f"Bad parameters for target primitive '{kind}': {exc}")


class TargetSet:
    """A finite union of target primitives of a common dimension."""

    def __init__(self, primitives):
        primitives = list(primitives)
        if not primitives:
            raise ConfigError("A target set needs at least one primitive.")
        dims = {primitive.dim for primitive in primitives}
        if len(dims) != 1:
            raise ConfigError(f"Target primitives have inconsistent dimensions: {sorted(dims)}.")
        self._primitives = primitives

    @classmethod
    def from_config(cls, specs):
        if isinstance(specs, dict):
            specs = [specs]
        return cls([TargetPrimitiveFactory.create(spec) for spec in specs])

    @property
    def primitives(self):
        return list(self._primitives)

    @property
    def dim(self):
        return self._primitives[0].dim

    def distance(self, points) -> np.ndarray:
        points = as_points(points, self.dim)
        return np.min([primitive.distance(points) for primitive in self._primitives], axis=0)

    def contains(self, points, tolerance=0.0) -> np.ndarray:
        return self.distance(points) <= tolerance

    def as_config(self):
        return [primitive.as_dict() for primitive in self._primitives]

    def __repr__(self):
        kinds = ", ".join(primitive.kind for primitive in self._primitives)
        return f"TargetSet({kinds})"


def target_distance(target: TargetSet, x) -> float:
    """Euclidean distance from a single position to the target set (0 inside)."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    return float(target.distance(x)[0])
