import numpy as np
from numpy.testing import assert_allclose

from mfgtime.diagnostics.measure_checks import (asymptotics_report, check_support_bound, check_trajectory_admissibility,
                                               decay_bound, distance_to_limit)
from mfgtime.diagnostics.report import FAIL, PASS
from mfgtime.equilibrium.iteration import best_response, initial_bundle
from mfgtime.model.measures import EmpiricalMeasure
from mfgtime.model.scenario import Scenario
from mfgtime.model.targets import PointCloud, TargetSet
from mfgtime.model.trajectories import TrajectoryBundle


def _scenario():
    return Scenario.from_dict({
        "populations": [{"target": [{"type": "ball", "center": [0.0, 0.0], "radius": 0.1}],
                         "m0": {"sampler": "explicit", "atoms": [[0.8, 0.0, 0.5], [0.0, -0.6, 0.5]]}}],
        "speed_model": {"type": "exponential", "k_min": 0.5, "k_max": 1.0, "sigma": 0.2},
        "grid": {"box": [[-1.0, 1.0], [-1.0, 1.0]], "h": 0.1, "dt": 0.1, "t_max": 2.0},
    })


def _walker(dt=0.1, n_nodes=21):
    t = np.arange(n_nodes) * dt
    paths = np.stack([np.maximum(1.0 - t, 0.2), np.zeros(n_nodes)], axis=1)[None]
    return TrajectoryBundle.from_arrays(paths, [1.0], dt, exit_times=[0.8])


def test_distance_to_limit_vanishes_once_settled():
    distances = distance_to_limit(_walker())
    assert_allclose(distances[:9], 0.8 - np.arange(9) * 0.1, atol=1e-12)
    assert np.all(distances[8:] == 0.0)


def test_distance_stays_under_the_decay_bound():
    bundle = _walker()
    target = TargetSet([PointCloud([[0.0, 0.0]], tolerance=0.1)])
    bound = decay_bound(bundle, target, 1.0, 1.0)
    assert np.all(distance_to_limit(bundle) <= bound + 1e-12)
    assert bound[-1] == 0.0


def test_stationary_bundle_respects_the_support_bound():
    scenario = _scenario()
    bundles = initial_bundle(scenario.m0, scenario.grid, scenario.targets)
    result = check_support_bound(bundles, scenario)
    assert result.status == PASS
    assert check_support_bound(bundles, scenario, history=[0, 2]).status == FAIL


def test_too_fast_member_fails_admissibility():
    scenario = _scenario()
    n_nodes = scenario.grid.n_steps + 1
    slow = TrajectoryBundle.stationary(EmpiricalMeasure.dirac([0.8, 0.0]), 0.1, n_nodes)
    assert check_trajectory_admissibility([slow], scenario).status == PASS
    t = np.arange(n_nodes) * 0.1
    paths = np.stack([np.maximum(0.8 - 3.0 * t, 0.0), np.zeros(n_nodes)], axis=1)[None]
    fast = TrajectoryBundle.from_arrays(paths, [1.0], 0.1)
    result = check_trajectory_admissibility([fast], scenario)
    assert result.status == FAIL
    assert result.measured["too_fast_members"] == 1


def test_asymptotics_of_optimal_and_resting_crowds():
    scenario = _scenario()
    resting = initial_bundle(scenario.m0, scenario.grid, scenario.targets)
    result = asymptotics_report(resting, scenario)
    assert result.status == FAIL
    assert result.details["populations"]["pop1"] == {"never_exit": 2}

    moving, _, _ = best_response(resting, scenario)
    result = asymptotics_report(moving, scenario)
    assert result.status == PASS, result.measured
    assert result.measured["settled_distance"] <= scenario.grid.h.value
