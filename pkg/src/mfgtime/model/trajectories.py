import math

import numpy as np

from mfgtime.core.constants import ADMISSIBILITY_TOL, WEIGHT_SUM_TOL
from mfgtime.model.measures import EmpiricalMeasure, as_points

_CONSTANCY_TOL = 1e-12


def grid_index(t, dt, name="time"):
    k = int(round(t / dt))
    if abs(k * dt - t) > 1e-9 * max(1.0, abs(t)):
        raise ValueError(f"{name} {t} is not a multiple of the time step {dt}.")
    return k


def _exit_node(k0, exit_time, dt, n_nodes):
    if not math.isfinite(exit_time):
        return n_nodes - 1
    return min(n_nodes - 1, k0 + int(math.ceil(exit_time / dt - 1e-9)))


def _interpolate_nodes(paths, dt, t):
    """Linear interpolation of node arrays (..., n_nodes, d) at time t, clamped to the horizon."""
    n_nodes = paths.shape[-2]
    s = min(max(t / dt, 0.0), n_nodes - 1)
    k = min(int(math.floor(s)), n_nodes - 1)
    frac = s - k
    if frac <= 0.0 or k == n_nodes - 1:
        return paths[..., k, :].copy()
    return (1.0 - frac) * paths[..., k, :] + frac * paths[..., k + 1, :]


class PolylineTrajectory:
    """
    A path sampled on the uniform time grid t_k = k * dt.

    The path is constant on [0, t0] and, when `exit_time` is finite,
    constant again from t0 + exit_time onwards. Between nodes the path is
    linear.
    """

    def __init__(self, points, dt, t0=0.0, exit_time=math.inf):
        points = as_points(points).copy()
        if points.shape[0] < 1:
            raise ValueError("A trajectory needs at least one node.")
        if dt <= 0:
            raise ValueError(f"Time step must be positive, got {dt}.")
        exit_time = float(exit_time)
        if exit_time < 0:
            raise ValueError(f"Exit time must be nonnegative, got {exit_time}.")

        self._points = points
        self._dt = float(dt)
        self._t0 = float(t0)
        self._exit_time = exit_time
        self._k0 = grid_index(self._t0, self._dt, "Start time")
        if not 0 <= self._k0 < points.shape[0]:
            raise ValueError(f"Start time {t0} lies outside the horizon {self.horizon}.")

        head = points[: self._k0 + 1]
        if np.abs(head - points[self._k0]).max() > _CONSTANCY_TOL:
            raise ValueError("Trajectory must be constant on [0, t0].")
        k_exit = _exit_node(self._k0, exit_time, self._dt, points.shape[0])
        tail = points[k_exit:]
        if np.abs(tail - points[k_exit]).max() > _CONSTANCY_TOL:
            raise ValueError("Trajectory must be constant after its exit time.")
        self._points.setflags(write=False)

    @classmethod
    def stationary(cls, point, dt, n_nodes, exit_time=math.inf):
        point = np.asarray(point, dtype=float).reshape(1, -1)
        return cls(np.repeat(point, n_nodes, axis=0), dt, 0.0, exit_time)

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def dt(self) -> float:
        return self._dt

    @property
    def t0(self) -> float:
        return self._t0

    @property
    def exit_time(self) -> float:
        return self._exit_time

    @property
    def n_nodes(self) -> int:
        return self._points.shape[0]

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    @property
    def horizon(self) -> float:
        return (self.n_nodes - 1) * self._dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_nodes) * self._dt

    @property
    def start_point(self) -> np.ndarray:
        return self._points[self._k0]

    @property
    def final_point(self) -> np.ndarray:
        """The limit position; the path is frozen after its last node."""
        return self._points[-1]

    @property
    def exited(self) -> bool:
        return math.isfinite(self._exit_time)

    def at(self, t) -> np.ndarray:
        return _interpolate_nodes(self._points, self._dt, float(t))

    def step_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self._points, axis=0), axis=1)

    def is_admissible(self, speed_cap) -> bool:
        """Node-wise check |x_{k+1} - x_k| <= cap * dt * (1 + tol)."""
        caps = np.broadcast_to(np.asarray(speed_cap, dtype=float), (max(self.n_nodes - 1, 0),))
        return bool(np.all(self.step_lengths() <= caps * self._dt * (1.0 + ADMISSIBILITY_TOL)))

    def __repr__(self):
        return (f"PolylineTrajectory(n_nodes={self.n_nodes}, dt={self._dt}, t0={self._t0}, "
                f"exit_time={self._exit_time})")


class TrajectoryBundle:
    """
    A weighted ensemble of trajectories sharing one time grid; the
    particle representation of a measure on path space.

    Paths are stored stacked as an array of shape (members, nodes, d).
    """

    def __init__(self, trajectories, weights=None, normalize=False):
        trajectories = list(trajectories)
        if not trajectories:
            raise ValueError("A bundle needs at least one trajectory.")
        dt = trajectories[0].dt
        n_nodes = trajectories[0].n_nodes
        for trajectory in trajectories:
            if abs(trajectory.dt - dt) > 1e-12 or trajectory.n_nodes != n_nodes:
                raise ValueError("All bundle members must share the same time step and horizon.")
        paths = np.stack([trajectory.points for trajectory in trajectories])
        t0s = np.array([trajectory.t0 for trajectory in trajectories])
        exit_times = np.array([trajectory.exit_time for trajectory in trajectories])
        self._init_arrays(paths, weights, dt, t0s, exit_times, normalize)

    @classmethod
    def from_arrays(cls, paths, weights, dt, t0s=None, exit_times=None, normalize=False):
        """
        Builds a bundle from stacked node arrays without per-member objects.
        Invariants are checked in bulk.
        """
        bundle = cls.__new__(cls)
        paths = np.asarray(paths, dtype=float)
        m = paths.shape[0]
        t0s = np.zeros(m) if t0s is None else np.asarray(t0s, dtype=float)
        exit_times = np.full(m, math.inf) if exit_times is None else np.asarray(exit_times, dtype=float)
        bundle._init_arrays(paths, weights, dt, t0s, exit_times, normalize)
        bundle._check_constancy()
        return bundle

    @classmethod
    def stationary(cls, measure: EmpiricalMeasure, dt, n_nodes, exit_times=None):
        """Every atom becomes a path that never moves (the map x -> (t -> x))."""
        paths = np.repeat(measure.points[:, None, :], n_nodes, axis=1)
        return cls.from_arrays(paths, measure.weights, dt, exit_times=exit_times)

    def _init_arrays(self, paths, weights, dt, t0s, exit_times, normalize):
        if paths.ndim != 3:
            raise ValueError(f"Bundle paths must have shape (members, nodes, d), got {paths.shape}.")
        m = paths.shape[0]
        if m == 0:
            raise ValueError("A bundle needs at least one trajectory.")
        weights = np.full(m, 1.0 / m) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
        if weights.shape[0] != m:
            raise ValueError(f"Got {m} trajectories but {weights.shape[0]} weights.")
        if np.any(weights < 0):
            raise ValueError("Bundle weights must be nonnegative.")
        total = weights.sum()
        if normalize:
            weights = weights / total
        elif abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"Bundle weights must sum to 1 (got {total:.15g}).")
        if np.any(exit_times < 0):
            raise ValueError("Exit times must be nonnegative.")

        self._paths = np.array(paths, dtype=float)
        self._weights = np.array(weights, dtype=float)
        self._dt = float(dt)
        self._t0s = np.array(t0s, dtype=float)
        self._exit_times = np.array(exit_times, dtype=float)
        for array in (self._paths, self._weights, self._t0s, self._exit_times):
            array.setflags(write=False)

    def _check_constancy(self):
        for j in range(len(self)):
            k0 = grid_index(self._t0s[j], self._dt, "Start time")
            path = self._paths[j]
            if np.abs(path[: k0 + 1] - path[k0]).max() > _CONSTANCY_TOL:
                raise ValueError(f"Trajectory {j} must be constant on [0, t0].")
            k_exit = _exit_node(k0, self._exit_times[j], self._dt, self.n_nodes)
            if np.abs(path[k_exit:] - path[k_exit]).max() > _CONSTANCY_TOL:
                raise ValueError(f"Trajectory {j} must be constant after its exit time.")

    # Shape and grid

    def __len__(self):
        return self._paths.shape[0]

    def __iter__(self):
        for j in range(len(self)):
            yield self.trajectory(j)

    @property
    def paths(self) -> np.ndarray:
        return self._paths

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def t0s(self) -> np.ndarray:
        return self._t0s

    @property
    def exit_times(self) -> np.ndarray:
        return self._exit_times

    @property
    def dt(self) -> float:
        return self._dt

    @property
    def n_nodes(self) -> int:
        return self._paths.shape[1]

    @property
    def dim(self) -> int:
        return self._paths.shape[2]

    @property
    def horizon(self) -> float:
        return (self.n_nodes - 1) * self._dt

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_nodes) * self._dt

    def same_grid(self, other) -> bool:
        return abs(self._dt - other.dt) <= 1e-12 and self.n_nodes == other.n_nodes

    def trajectory(self, j) -> PolylineTrajectory:
        return PolylineTrajectory(self._paths[j], self._dt, self._t0s[j], self._exit_times[j])

    # Evaluation

    def node_positions(self, k) -> np.ndarray:
        return self._paths[:, k, :]

    def positions_at(self, t) -> np.ndarray:
        return _interpolate_nodes(self._paths, self._dt, float(t))

    def initial_measure(self) -> EmpiricalMeasure:
        return EmpiricalMeasure(self._paths[:, 0, :], self._weights)

    def settled_node(self) -> int:
        """First node index from which no member moves any more."""
        moving = np.any(self._paths[:, 1:, :] != self._paths[:, :-1, :], axis=(0, 2))
        indices = np.flatnonzero(moving)
        return int(indices[-1] + 1) if indices.size else 0

    def admissible(self, speed_cap) -> np.ndarray:
        """Per-member admissibility at a uniform speed cap."""
        steps = np.linalg.norm(np.diff(self._paths, axis=1), axis=2)
        return np.all(steps <= speed_cap * self._dt * (1.0 + ADMISSIBILITY_TOL), axis=1)

    # Combination

    def mix(self, other, lam):
        """
        The mixture (1 - lam) * self + lam * other, realised by concatenating
        members with rescaled weights. Members with zero weight are dropped.
        """
        if not self.same_grid(other):
            raise ValueError("Cannot mix bundles defined on different time grids.")
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"Mixing weight must lie in [0, 1], got {lam}.")
        if lam == 1.0:
            return other
        if lam == 0.0:
            return self
        return TrajectoryBundle.from_arrays(
            np.concatenate([self._paths, other.paths]),
            np.concatenate([(1.0 - lam) * self._weights, lam * other.weights]),
            self._dt,
            np.concatenate([self._t0s, other.t0s]),
            np.concatenate([self._exit_times, other.exit_times]),
            normalize=True,
        )

    def __repr__(self):
        return f"TrajectoryBundle(members={len(self)}, n_nodes={self.n_nodes}, dt={self._dt})"
