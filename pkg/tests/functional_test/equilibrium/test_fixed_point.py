import numpy as np
import pytest

from mfgtime.diagnostics.report import PASS
from mfgtime.diagnostics.runner import run_diagnostics
from mfgtime.equilibrium.iteration import best_response, fixed_point_iterate
from mfgtime.equilibrium.residuals import equilibrium_residual
from mfgtime.model.scenario import Scenario


def _corridor(a_self, a_cross, count=200, h=0.05, directions=32):
    def population(name, lo, hi, center):
        return {"id": name,
                "target": [{"type": "ball", "center": center, "radius": 0.15}],
                "m0": {"sampler": "uniform", "lo": lo, "hi": hi, "count": count}}

    data = {
        "seed": 11,
        "populations": [population("east", [0.6, -0.2], [0.9, 0.2], [-0.75, 0.0]),
                        population("west", [-0.9, -0.2], [-0.6, 0.2], [0.75, 0.0])],
        "speed_model": {"type": "exponential", "k_min": 0.2, "k_max": 1.0, "sigma": 0.1,
                        "a_self": a_self, "a_cross": a_cross},
        "grid": {"box": [[-1.0, 1.0], [-0.25, 0.25]], "h": h, "dt": h},
        "solver": {"directions": directions},
    }
    return Scenario.from_dict(data)


def test_without_congestion_the_first_response_is_a_fixed_point() -> None:
    scenario = _corridor(0.0, 0.0, count=20, h=0.1, directions=16)
    state, converged = fixed_point_iterate(scenario, max_iters=5, tol=1e-12, verbose=False)
    assert converged
    assert state.iterations == 1
    assert state.last_residual <= 1e-12

    again, _, _ = best_response(state.bundles, scenario)
    for first, second in zip(state.bundles, again):
        np.testing.assert_array_equal(first.paths, second.paths)


@pytest.mark.slow
def test_corridor_swap_equilibrium() -> None:
    scenario = _corridor(1.0, 3.0)
    state, _ = fixed_point_iterate(scenario, max_iters=60, tol=1e-3, verbose=False)

    residuals = np.array(state.residuals)
    assert residuals.min() <= residuals[0] / 10.0
    assert not any(state.support_violations)

    result = equilibrium_residual(state.bundles, scenario)
    assert result.value <= 0.05 * result.mean_exit_time

    report = run_diagnostics(state.bundles, scenario, history=state.support_violations)
    for name in ("asymptotics", "support_bound", "mfg_system", "equilibrium_residual"):
        assert report[name].status == PASS, (name, report[name].measured)


if __name__ == '__main__':
    test_without_congestion_the_first_response_is_a_fixed_point()
    test_corridor_swap_equilibrium()
