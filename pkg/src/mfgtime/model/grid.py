import math

import numpy as np

from mfgtime.core.component import StandardComponent
from mfgtime.core.errors import CFLViolationError, ConfigError
from mfgtime.core.parameter import Descriptor, Parameter
from mfgtime.model.measures import as_points

_BOX_TOL = 1e-12


class SpaceTimeGrid(StandardComponent):
    """
    Uniform Cartesian grid of a box in R^d with spacing h, combined with
    the time grid t_n = n * dt, n = 0..n_steps, covering [0, t_max].
    """

    @property
    def category_name(self):
        return "grid"

    def __init__(self, box, h, dt, t_max):
        super().__init__()
        box = np.asarray(box, dtype=float)
        if box.ndim != 2 or box.shape[1] != 2 or box.shape[0] < 1:
            raise ConfigError(f"Grid box must be a list of [lo, hi] pairs, got {box.tolist()}.")
        if np.any(box[:, 0] >= box[:, 1]):
            raise ConfigError(f"Grid box needs lo < hi on every axis, got {box.tolist()}.")

        self.box = Descriptor(value=box.tolist(),
                              name="box",
                              pretty_name="box [lo, hi] per axis",
                              units="m",
                              editable=False)
        self.h = Parameter(value=h,
                           name="h",
                           pretty_name="spatial spacing",
                           units="m",
                           min_value=0.0,
                           strict_min=True,
                           editable=False)
        self.dt = Parameter(value=dt,
                            name="dt",
                            pretty_name="time step",
                            units="s",
                            min_value=0.0,
                            strict_min=True)
        self.t_max = Parameter(value=t_max,
                               name="t_max",
                               pretty_name="time horizon",
                               units="s",
                               min_value=0.0,
                               strict_min=True)
        if self.t_max.value < self.dt.value:
            raise ConfigError(f"Horizon t_max = {t_max} must be at least one time step dt = {dt}.")

        self._axes = []
        for lo, hi in box:
            intervals = (hi - lo) / self.h.value
            n_intervals = int(round(intervals))
            if n_intervals < 1 or abs(n_intervals - intervals) > 1e-6:
                raise ConfigError(f"Box extent [{lo}, {hi}] is not a multiple of h = {self.h.value}.")
            self._axes.append(np.linspace(lo, hi, n_intervals + 1))
        self._nodes = None
        self._locked = True

    # Space

    @property
    def dim(self) -> int:
        return len(self._axes)

    @property
    def lo(self) -> np.ndarray:
        return np.array([axis[0] for axis in self._axes])

    @property
    def hi(self) -> np.ndarray:
        return np.array([axis[-1] for axis in self._axes])

    @property
    def axes(self):
        return self._axes

    @property
    def shape(self):
        return tuple(axis.size for axis in self._axes)

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.shape))

    def nodes(self) -> np.ndarray:
        """All grid nodes as an (n_nodes, d) array in C (row-major) order."""
        if self._nodes is None:
            mesh = np.meshgrid(*self._axes, indexing="ij")
            self._nodes = np.stack([m.reshape(-1) for m in mesh], axis=1)
            self._nodes.setflags(write=False)
        return self._nodes

    def index_coordinates(self, points) -> np.ndarray:
        """Fractional node indices of points, shape (d, n), for map_coordinates."""
        points = as_points(points, self.dim)
        return ((points - self.lo) / self.h.value).T

    def inside(self, points) -> np.ndarray:
        points = as_points(points, self.dim)
        return np.all((points >= self.lo - _BOX_TOL) & (points <= self.hi + _BOX_TOL), axis=1)

    def contains_ball(self, radius) -> bool:
        """Whether the closed origin-centred ball of given radius lies inside the box."""
        return bool(np.all(self.lo <= -radius) and np.all(self.hi >= radius))

    def inscribed_radius(self) -> float:
        """Radius of the largest origin-centred ball inside the box (0 if the origin is outside)."""
        return float(max(0.0, min(np.min(-self.lo), np.min(self.hi))))

    # Time

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.t_max.value / self.dt.value - 1e-9))

    @property
    def horizon(self) -> float:
        """t_max rounded up to a whole number of steps."""
        return self.n_steps * self.dt.value

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.dt.value

    def time_index(self, t) -> int:
        """Index of the nearest-earlier grid time, clamped to [0, n_steps]."""
        n = int(math.floor(t / self.dt.value + 1e-9))
        return min(max(n, 0), self.n_steps)

    # Checks

    def check_cfl(self, k_max) -> None:
        """Raise if one step at top speed can leave the neighbouring cells."""
        limit = self.h.value / k_max
        if self.dt.value > limit * (1.0 + 1e-12):
            raise CFLViolationError(
                f"CFL condition violated: dt = {self.dt.value:g} > h / K_max = "
                f"{self.h.value:g} / {k_max:g} = {limit:g}."
            )

    def as_dict(self):
        d = super().as_dict()
        d["n_steps"] = self.n_steps
        d["shape"] = list(self.shape)
        return d
