import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from mfgtime.core.constants import DEFAULT_CLUSTER_ANGLE, DEFAULT_DIRECTIONS

NON_UNIQUE = "non-unique"


def unit_directions(dim, count=DEFAULT_DIRECTIONS) -> np.ndarray:
    """
    `count` unit vectors spread over the sphere S^{d-1}.

    d = 1 gives the two directions -1, +1; d = 2 equally spaced angles
    2 pi k / M; d = 3 a Fibonacci lattice. Higher dimensions use the
    coordinate axes plus seeded Gaussian draws.
    """
    if dim < 1:
        raise ValueError(f"Dimension must be positive, got {dim}.")
    if dim == 1:
        return np.array([[-1.0], [1.0]])
    if count < 2:
        raise ValueError(f"Need at least two directions, got {count}.")
    if dim == 2:
        angles = 2.0 * math.pi * np.arange(count) / count
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)
    if dim == 3:
        k = np.arange(count) + 0.5
        polar = np.arccos(1.0 - 2.0 * k / count)
        azimuth = math.pi * (1.0 + math.sqrt(5.0)) * k
        return np.stack([np.cos(azimuth) * np.sin(polar),
                         np.sin(azimuth) * np.sin(polar),
                         np.cos(polar)], axis=1)
    axes = np.concatenate([np.eye(dim), -np.eye(dim)])
    extra = np.random.default_rng(0).normal(size=(max(count - axes.shape[0], 0), dim))
    directions = np.concatenate([axes, extra])
    return directions / np.linalg.norm(directions, axis=1, keepdims=True)


def _angles(a, b):
    return np.arccos(np.clip(a @ b.T, -1.0, 1.0))


class DirectionSet:
    """
    Descent ratios r(u) = [phi(t + h', x + h' k u) - phi(t, x)] / h' of the
    sampled directions at one space-time point, with the near-minimal ones
    selected and grouped into angular clusters.

    An empty set (no selected directions) stands for a point on the target.
    """

    def __init__(self, t, x, probe, directions, ratios, selected, clusters):
        self.t = float(t)
        self.x = np.asarray(x, dtype=float)
        self.probe = float(probe)
        self.directions = directions
        self.ratios = ratios
        self.selected = np.asarray(selected, dtype=int)
        self.clusters = clusters

    @classmethod
    def empty(cls, t, x, probe, directions):
        return cls(t, x, probe, directions, np.full(directions.shape[0], np.nan), [], [])

    @property
    def is_empty(self) -> bool:
        return self.selected.size == 0

    @property
    def min_ratio(self) -> float:
        return float(np.min(self.ratios)) if not self.is_empty else math.nan

    @property
    def argmin_direction(self) -> np.ndarray:
        """The lowest-ratio direction; ties go to the lowest index."""
        return self.directions[int(np.argmin(self.ratios))]

    @property
    def selected_directions(self) -> np.ndarray:
        return self.directions[self.selected]

    @property
    def unique(self) -> bool:
        return len(self.clusters) == 1

    def cluster_mean(self, cluster) -> np.ndarray:
        mean = self.directions[cluster].mean(axis=0)
        norm = np.linalg.norm(mean)
        return mean / norm if norm > 0 else self.directions[cluster[0]]

    def cluster_diameter(self, cluster) -> float:
        vectors = self.directions[cluster]
        return float(_angles(vectors, vectors).max()) if len(cluster) > 1 else 0.0

    def __repr__(self):
        return (f"DirectionSet(selected={self.selected.size}, clusters={len(self.clusters)}, "
                f"min_ratio={self.min_ratio:.4g})")


def cluster_directions(directions, selected, cluster_angle=DEFAULT_CLUSTER_ANGLE):
    """
    Single-linkage clusters of the selected directions: two directions are
    linked when their angle is at most `cluster_angle`.
    """
    selected = np.asarray(selected, dtype=int)
    if selected.size == 0:
        return []
    vectors = directions[selected]
    adjacency = csr_matrix(_angles(vectors, vectors) <= cluster_angle + 1e-12)
    n_components, labels = connected_components(adjacency, directed=False)
    clusters = [selected[labels == c] for c in range(n_components)]
    # lowest member index first, so the order does not depend on labelling
    return sorted(clusters, key=lambda members: int(members[0]))


def descent_ratios(phi, field, t, points, directions, probe):
    """
    Ratios for several points at once.

    Returns:
        np.ndarray: (n, M) ratios; +inf where the probed foot is unreachable.
    """
    points = np.asarray(points, dtype=float)
    n, dim = points.shape
    speeds = field.evaluate(phi.population, t, points)
    feet = points[:, None, :] + probe * speeds[:, None, None] * directions[None, :, :]
    foot_values = phi.evaluate(t + probe, feet.reshape(-1, dim)).reshape(n, -1)
    here = phi.evaluate(t, points)
    with np.errstate(invalid="ignore"):
        ratios = (foot_values - here[:, None]) / probe
    ratios[~np.isfinite(foot_values)] = np.inf
    ratios[~np.isfinite(here)] = np.inf
    return ratios


def descent_directions(phi, field, t, x, n_directions=DEFAULT_DIRECTIONS, probe=None, select_tol=None,
                       cluster_angle=DEFAULT_CLUSTER_ANGLE) -> DirectionSet:
    """
    Directions of near-maximal descent of phi at (t, x).

    All sampled directions whose ratio is within `select_tol` of the
    minimum are selected. On the target (distance at most h) the result is
    the empty set.

    Args:
        phi: ValueField of the population.
        field: SpeedField the value function was solved for.
        t, x: Space-time point.
        n_directions: Number M of sampled directions.
        probe: Probe step h' (defaults to the time step).
        select_tol: Ratio slack (defaults to 2 (1 - cos(2 pi / M))).
        cluster_angle: Linkage angle of the clusters.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    probe = phi.dt if probe is None else float(probe)
    directions = unit_directions(x.size, n_directions)
    if select_tol is None:
        select_tol = 2.0 * (1.0 - math.cos(2.0 * math.pi / max(directions.shape[0], 2)))
    if phi.target.distance(x.reshape(1, -1))[0] <= phi.h:
        return DirectionSet.empty(t, x, probe, directions)

    ratios = descent_ratios(phi, field, t, x.reshape(1, -1), directions, probe)[0]
    if not np.isfinite(ratios).any():
        return DirectionSet(t, x, probe, directions, ratios, [], [])
    selected = np.flatnonzero(ratios <= ratios.min() + select_tol)
    clusters = cluster_directions(directions, selected, cluster_angle)
    return DirectionSet(t, x, probe, directions, ratios, selected, clusters)


def normalized_gradient(phi, field, t, x, n_directions=DEFAULT_DIRECTIONS, probe=None, select_tol=None,
                        cluster_angle=DEFAULT_CLUSTER_ANGLE):
    """
    The unit vector whose negation is the unique direction of maximal
    descent, or NON_UNIQUE when the selected directions split into several
    clusters or spread over more than `cluster_angle`.

    Raises:
        ValueError: x lies on the target or no direction is reachable.
    """
    dset = descent_directions(phi, field, t, x, n_directions, probe, select_tol, cluster_angle)
    if dset.is_empty:
        raise ValueError(f"No descent direction at x = {np.asarray(x).tolist()}: the point is on the target "
                         f"or its neighbourhood is unreachable.")
    if not dset.unique or dset.cluster_diameter(dset.clusters[0]) >= cluster_angle:
        return NON_UNIQUE
    return -dset.cluster_mean(dset.clusters[0])


def ratio_sensitivity(phi, field, t, x, n_directions=DEFAULT_DIRECTIONS, probe=None):
    """
    Compares the minimising direction probed at h' and 2h'.

    Returns:
        dict: angle between the two minimisers (rad) and the change of the
        minimal ratio. NaN entries on the target.
    """
    probe = phi.dt if probe is None else float(probe)
    single = descent_directions(phi, field, t, x, n_directions, probe)
    double = descent_directions(phi, field, t, x, n_directions, 2.0 * probe)
    if single.is_empty or double.is_empty:
        return {"angle": math.nan, "ratio_change": math.nan}
    cosine = float(np.clip(single.argmin_direction @ double.argmin_direction, -1.0, 1.0))
    return {"angle": math.acos(cosine), "ratio_change": abs(double.min_ratio - single.min_ratio)}
