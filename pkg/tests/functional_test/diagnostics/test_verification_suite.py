import numpy as np

from mfgtime.congestion.speed_field import static_speed_field
from mfgtime.congestion.speed_models import SinusoidalLandscape
from mfgtime.diagnostics.direction_checks import check_normalized_gradient, check_U_equals_W
from mfgtime.diagnostics.mfg_system import TensorBump, flow_velocities, weak_residual
from mfgtime.diagnostics.report import PASS
from mfgtime.diagnostics.sampling import check_rng
from mfgtime.diagnostics.value_checks import check_dpp, dpp_residuals
from mfgtime.model.grid import SpaceTimeGrid
from mfgtime.model.targets import Ball, PointCloud, TargetSet
from mfgtime.model.trajectories import TrajectoryBundle
from mfgtime.ocp.semi_lagrangian import solve_value_function
from mfgtime.ocp.tracing import trace_many


def _analytic(h=0.05, dt=0.05):
    grid = SpaceTimeGrid([[-1.0, 1.0], [-1.0, 1.0]], h, dt, 1.5)
    target = TargetSet([PointCloud([[0.0, 0.0]])])
    field = static_speed_field(SinusoidalLandscape(1.0, 0.0), 1, 2, dt, grid.n_steps + 1)
    return solve_value_function(field, target, grid, n_directions=64), field


def _varying(h=0.1, dt=0.05):
    grid = SpaceTimeGrid([[-2.0, 2.0], [-2.0, 2.0]], h, dt, 0.5)
    target = TargetSet([PointCloud([[0.0, 0.0]])])
    field = static_speed_field(SinusoidalLandscape(1.0, 0.5), 1, 2, dt, grid.n_steps + 1)
    return solve_value_function(field, target, grid, n_directions=64), field


def test_dpp_holds_along_traced_optimal_paths() -> None:
    phi, field = _analytic()
    rng = check_rng(0, "dpp")
    starts = rng.uniform(-0.7, 0.7, size=(200, 2))
    starts = starts[phi.target.distance(starts) > 2 * phi.h]
    paths, exits = trace_many(phi, field, phi.target, 0.0, starts)
    bundle = TrajectoryBundle.from_arrays(paths, None, phi.dt, exit_times=exits)
    assert np.all(np.isfinite(exits))

    equality, stuck = dpp_residuals(phi, bundle.paths, bundle.t0s, bundle.exit_times)
    assert stuck.size == 0
    assert np.abs(equality).max() <= 2 * (phi.h + phi.dt)

    result = check_dpp(phi, bundle, field, rng, samples=200)
    assert result.status == PASS, result.measured


def test_traced_directions_are_directions_of_maximal_descent() -> None:
    phi, field = _varying()
    result = check_U_equals_W(phi, field, check_rng(0, "u_equals_w"), samples=100,
                              tracing_options={"n_directions": 64})
    assert result.details["unique_samples"] > 50
    assert result.status == PASS, result.measured


def test_normalized_gradient_matches_finite_differences() -> None:
    phi, field = _varying()
    result = check_normalized_gradient(phi, field, check_rng(0, "normalized_gradient"), samples=200,
                                       tracing_options={"n_directions": 64})
    assert result.details["smooth_samples"] > 50
    assert result.status == PASS, result.measured


def _stopping_atom_residual(step):
    grid = SpaceTimeGrid([[-1.0, 1.0], [-1.0, 1.0]], step, step, 1.0)
    target = TargetSet([Ball([0.0, 0.0], 0.2)])
    field = static_speed_field(SinusoidalLandscape(1.0, 0.0), 1, 2, step, grid.n_steps + 1)
    phi = solve_value_function(field, target, grid, n_directions=64)
    paths, exits = trace_many(phi, field, target, 0.0, [[0.61, 0.0]], n_directions=64)
    bundle = TrajectoryBundle.from_arrays(paths, None, step, exit_times=exits)
    zeta = TensorBump(0.4, [0.3, 0.05], 0.3, 0.4)
    velocities = flow_velocities(phi, field, bundle, [zeta], {"n_directions": 64})
    return weak_residual(bundle, velocities, zeta), exits[0]


def test_weak_residual_halves_with_the_grid() -> None:
    coarse, coarse_exit = _stopping_atom_residual(0.05)
    fine, fine_exit = _stopping_atom_residual(0.025)
    np.testing.assert_allclose([coarse_exit, fine_exit], 0.4, atol=1e-9)
    assert coarse > 1e-3
    assert 0.35 <= fine / coarse <= 0.65


if __name__ == '__main__':
    test_dpp_holds_along_traced_optimal_paths()
    test_traced_directions_are_directions_of_maximal_descent()
    test_weak_residual_halves_with_the_grid()
