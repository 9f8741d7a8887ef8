import numpy as np
from numpy.testing import assert_allclose

from mfgtime.equilibrium.compaction import compact_bundle
from mfgtime.model.trajectories import TrajectoryBundle


def _paths(ends, n_nodes=11, dt=0.1):
    t = np.arange(n_nodes) * dt / ((n_nodes - 1) * dt)
    return np.stack([np.stack([end * t, np.zeros(n_nodes)], axis=1) for end in ends])


def test_identical_members_are_merged():
    paths = _paths([1.0, 1.0, 0.5])
    bundle = TrajectoryBundle.from_arrays(paths, [0.25, 0.25, 0.5], 0.1)
    compact = compact_bundle(bundle, 1e-6)
    assert len(compact) == 2
    assert_allclose(compact.weights, [0.5, 0.5])
    assert_allclose(compact.paths[1], paths[2])


def test_members_from_different_starts_are_kept():
    paths = np.concatenate([_paths([1.0]), _paths([1.0]) + [0.0, 1e-9]])
    bundle = TrajectoryBundle.from_arrays(paths, [0.5, 0.5], 0.1)
    assert compact_bundle(bundle, 1.0) is bundle


def test_compaction_keeps_the_initial_measure():
    rng = np.random.default_rng(1)
    paths = _paths([1.0, 1.0 + 1e-7, 0.3, 0.3 + 1e-7])
    weights = rng.dirichlet(np.ones(4))
    bundle = TrajectoryBundle.from_arrays(paths, weights, 0.1)
    compact = compact_bundle(bundle, 1e-4)
    assert len(compact) == 2
    assert_allclose(compact.weights.sum(), 1.0)
    assert_allclose(compact.initial_measure().mean(), bundle.initial_measure().mean(), atol=1e-12)
