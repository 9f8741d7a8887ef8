import itertools

import numpy as np
from numpy.testing import assert_allclose

from mfgtime.model.measures import EmpiricalMeasure
from mfgtime.model.trajectories import PolylineTrajectory
from mfgtime.transport.wasserstein import wasserstein, wasserstein_distance
from mfgtime.transport.trajectory_metric import trajectory_metric


def _brute_force(x, y):
    n = x.shape[0]
    costs = np.linalg.norm(x[:, None, :] - y[None, :, :], axis=2)
    return min(costs[np.arange(n), list(perm)].mean() for perm in itertools.permutations(range(n)))


def test_equal_weight_atoms_match_permutation_enumeration() -> None:
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 7))
        x = rng.uniform(-1.0, 1.0, size=(n, 2))
        y = rng.uniform(-1.0, 1.0, size=(n, 2))
        value, plan = wasserstein(EmpiricalMeasure(x), EmpiricalMeasure(y))
        assert_allclose(value, _brute_force(x, y), atol=1e-9)
        first, second = plan.marginals()
        assert_allclose(first, np.full(n, 1.0 / n), atol=1e-12)
        assert_allclose(second, np.full(n, 1.0 / n), atol=1e-12)


def test_line_measures_match_sorted_quantiles() -> None:
    for seed in range(20):
        rng = np.random.default_rng(1000 + seed)
        x = rng.normal(size=(50, 1))
        y = rng.normal(loc=0.5, size=(50, 1))
        expected = np.abs(np.sort(x[:, 0]) - np.sort(y[:, 0])).mean()
        assert_allclose(wasserstein_distance(EmpiricalMeasure(x), EmpiricalMeasure(y)), expected, atol=1e-10)


def test_wasserstein_metric_axioms() -> None:
    for seed in range(100):
        rng = np.random.default_rng(2000 + seed)
        measures = []
        for _ in range(3):
            n = int(rng.integers(1, 7))
            measures.append(EmpiricalMeasure(rng.uniform(-1.0, 1.0, size=(n, 2)), rng.uniform(0.1, 1.0, size=n),
                                             normalize=True))
        a, b, c = measures
        ab, ba = wasserstein_distance(a, b), wasserstein_distance(b, a)
        assert_allclose(ab, ba, atol=1e-9)
        assert wasserstein_distance(a, a) <= 1e-9
        assert wasserstein_distance(a, c) <= ab + wasserstein_distance(b, c) + 1e-9


def test_trajectory_metric_axioms() -> None:
    rng = np.random.default_rng(7)
    dt = 0.1
    for _ in range(100):
        paths = [PolylineTrajectory(np.cumsum(rng.normal(scale=0.05, size=(41, 2)), axis=0), dt) for _ in range(3)]
        a, b, c = paths
        ab = trajectory_metric(a, b)
        assert_allclose(ab, trajectory_metric(b, a), atol=1e-12)
        assert trajectory_metric(a, a) == 0.0
        assert 0.0 <= ab <= 1.0
        assert trajectory_metric(a, c) <= ab + trajectory_metric(b, c) + 1e-9


if __name__ == '__main__':
    test_equal_weight_atoms_match_permutation_enumeration()
    test_wasserstein_metric_axioms()
