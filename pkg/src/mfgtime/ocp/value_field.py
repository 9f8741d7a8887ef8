import math

import numpy as np
import pandas as pd

from mfgtime.ocp.interpolation import interpolate, split_infinite


class ValueField:
    """
    The value function phi(t_n, x) of one population sampled on a
    space-time grid.

    `values` has shape (n_steps + 1, *grid.shape) and may hold +inf where
    the target cannot be reached inside the box. Off-grid evaluation is
    linear in time and multilinear in space; beyond the horizon the last
    slice is used. `certified_radius` is the radius of the origin-centred
    ball on which the box-restricted solve agrees with the whole-space
    value function, and `certified` says whether the box contains that ball.
    """

    def __init__(self, grid, values, target_mask, target, population=0, certified_radius=None):
        values = np.asarray(values, dtype=float)
        expected = (grid.n_steps + 1,) + grid.shape
        if values.shape != expected:
            raise ValueError(f"Value array has shape {values.shape}, expected {expected}.")
        self.grid = grid
        self.target = target
        self.population = int(population)
        self._values = values
        self._values.setflags(write=False)
        self._mask = np.asarray(target_mask, dtype=bool)
        self._mask.setflags(write=False)
        self.certified_radius = grid.inscribed_radius() if certified_radius is None else float(certified_radius)
        self._parts = {}

    # Properties

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def target_mask(self) -> np.ndarray:
        return self._mask

    @property
    def certified(self) -> bool:
        return self.grid.contains_ball(self.certified_radius)

    @property
    def dt(self) -> float:
        return self.grid.dt.value

    @property
    def h(self) -> float:
        return self.grid.h.value

    @property
    def n_steps(self) -> int:
        return self.grid.n_steps

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def slice(self, n) -> np.ndarray:
        return self._values[min(max(int(n), 0), self.n_steps)]

    # Evaluation

    def _slice_parts(self, n):
        if n not in self._parts:
            self._parts[n] = split_infinite(self._values[n])
        return self._parts[n]

    def evaluate_slice(self, n, points) -> np.ndarray:
        n = min(max(int(n), 0), self.n_steps)
        return interpolate(self._values[n], self.grid, points, parts=self._slice_parts(n))

    def evaluate(self, t, points) -> np.ndarray:
        """phi(t, x) at each of the (n, d) positions."""
        s = min(max(float(t) / self.dt, 0.0), float(self.n_steps))
        n = min(int(math.floor(s + 1e-9)), self.n_steps)
        frac = s - n
        if frac <= 1e-9 or n == self.n_steps:
            return self.evaluate_slice(n, points)
        before = self.evaluate_slice(n, points)
        after = self.evaluate_slice(n + 1, points)
        result = (1.0 - frac) * np.where(np.isfinite(before), before, 0.0) \
            + frac * np.where(np.isfinite(after), after, 0.0)
        result[~(np.isfinite(before) & np.isfinite(after))] = np.inf
        return result

    def value_at(self, t, x) -> float:
        return float(self.evaluate(t, np.asarray(x, dtype=float).reshape(1, -1))[0])

    # Export

    def as_frame(self) -> pd.DataFrame:
        """Long table with columns t, x1..xd, phi in (time, C-order node) order."""
        nodes = self.grid.nodes()
        n_nodes = nodes.shape[0]
        columns = {"t": np.repeat(self.times, n_nodes)}
        for j in range(self.grid.dim):
            columns[f"x{j + 1}"] = np.tile(nodes[:, j], self.n_steps + 1)
        columns["phi"] = self._values.reshape(-1)
        return pd.DataFrame(columns)

    def __repr__(self):
        return (f"ValueField(population={self.population}, shape={self._values.shape}, "
                f"certified_radius={self.certified_radius:.4g})")
