import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mfgtime.equilibrium.iteration import (IterationState, best_response, fixed_point_iterate, initial_bundle,
                                           update_residuals)
from mfgtime.equilibrium.residuals import equilibrium_residual
from mfgtime.equilibrium.support import count_support_violations, support_table
from mfgtime.model.scenario import Scenario
from mfgtime.transport.pushforward import measure_at_node


def _scenario(a_self=0.0):
    return Scenario.from_dict({
        "populations": [{"id": "walkers",
                         "target": [{"type": "ball", "center": [0.0, 0.0], "radius": 0.1}],
                         "m0": {"sampler": "explicit", "atoms": [[0.8, 0.0, 0.5], [0.0, -0.6, 0.5]]}}],
        "speed_model": {"type": "exponential", "k_min": 0.5, "k_max": 1.0, "sigma": 0.2,
                        "a_self": a_self, "a_cross": 0.0},
        "grid": {"box": [[-1.0, 1.0], [-1.0, 1.0]], "h": 0.1, "dt": 0.1, "t_max": 2.0},
        "solver": {"directions": 32},
    })


def test_initial_bundle_pushes_forward_to_m0():
    scenario = _scenario()
    bundle = initial_bundle(scenario.m0, scenario.grid, scenario.targets)[0]
    for k in (0, 5, bundle.n_nodes - 1):
        measure = measure_at_node(bundle, k)
        assert_allclose(measure.points, scenario.m0[0].points)
        assert_allclose(measure.weights, scenario.m0[0].weights)
    assert np.all(np.isinf(bundle.exit_times))


def test_best_response_reaches_the_target():
    scenario = _scenario()
    bundles = initial_bundle(scenario.m0, scenario.grid, scenario.targets)
    responses, value_fields, field = best_response(bundles, scenario)
    assert field.time_independent
    response = responses[0]
    assert np.all(np.isfinite(response.exit_times))
    assert_allclose(response.exit_times, [0.6, 0.4], atol=3.0 * 0.2)
    assert_allclose(response.weights, scenario.m0[0].weights)
    assert value_fields[0].population == 0


def test_congestion_off_converges_after_one_iteration():
    state, converged = fixed_point_iterate(_scenario(), max_iters=5, tol=1e-6, verbose=False)
    assert converged
    assert state.iterations == 1
    assert state.residuals[0] <= 1e-12
    assert len(state.support_violations) == 3


def test_zero_iterations_keep_the_warm_start():
    state, converged = fixed_point_iterate(_scenario(), max_iters=0, verbose=False)
    assert not converged
    assert state.iterations == 0
    assert math.isinf(state.last_residual)
    assert np.all(np.isfinite(state.bundles[0].exit_times))
    assert state.history_frame().empty


def test_history_frame_columns():
    state = IterationState([], ["a", "b"])
    state.bundle_sizes = [[1, 1], [2, 2], [3, 4]]
    state.record(0.5, [0.2, 0.1])
    state.record(1.0 / 3.0, [0.05, 0.07])
    frame = state.history_frame()
    assert list(frame.columns) == ["n", "lambda", "residual", "residual_a", "residual_b", "members_a",
                                   "members_b"]
    assert_allclose(frame["residual"], [0.2, 0.07])
    assert frame["members_b"].tolist() == [2, 4]


def test_update_residual_scales_with_the_weight():
    scenario = _scenario()
    bundles = initial_bundle(scenario.m0, scenario.grid, scenario.targets)
    responses, _, _ = best_response(bundles, scenario)
    full = update_residuals(bundles, responses, 1.0)
    half = update_residuals(bundles, responses, 0.5)
    assert_allclose(half, 0.5 * full)
    assert full[0] > 0.3


def test_invalid_iteration_arguments():
    with pytest.raises(ValueError):
        fixed_point_iterate(_scenario(), max_iters=-1, verbose=False)
    with pytest.raises(ValueError, match="Unsupported damping mode"):
        fixed_point_iterate(_scenario(), mode="anderson", verbose=False)


def test_support_table_holds_for_the_stationary_bundle():
    scenario = _scenario()
    bundles = initial_bundle(scenario.m0, scenario.grid, scenario.targets)
    table = support_table(bundles, scenario, radii=[0.0, 0.6, 0.8])
    assert set(table.columns) == {"population", "R", "psi", "t", "mass", "profile", "margin"}
    assert (table["margin"] >= 0).all()
    assert count_support_violations(bundles, scenario) == 0


def test_stationary_bundle_is_not_an_equilibrium():
    scenario = _scenario()
    bundles = initial_bundle(scenario.m0, scenario.grid, scenario.targets)
    residual = equilibrium_residual(bundles, scenario)
    assert residual.flagged[0] == 2
    assert residual.value > 1.0
    responses, value_fields, _ = best_response(bundles, scenario)
    optimal = equilibrium_residual(responses, scenario, value_fields=value_fields)
    assert optimal.flagged[0] == 0
    assert optimal.value <= 2.0 * scenario.grid.dt.value
