import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from mfgtime.congestion.speed_field import static_speed_field
from mfgtime.congestion.speed_models import SinusoidalLandscape
from mfgtime.core.errors import TracingError
from mfgtime.model.bounds import psi_T_bounds
from mfgtime.model.grid import SpaceTimeGrid
from mfgtime.model.targets import Ball, PointCloud, TargetSet
from mfgtime.model.trajectories import TrajectoryBundle
from mfgtime.ocp.semi_lagrangian import solve_value_function
from mfgtime.ocp.tracing import flow_velocity, trace_many, trace_optimal_trajectory
from mfgtime.ocp.value_field import ValueField


def _distance_field(t_max=1.5):
    grid = SpaceTimeGrid([[-1.0, 1.0], [-1.0, 1.0]], 0.1, 0.1, t_max)
    target = TargetSet([PointCloud([[0.0, 0.0]])])
    distances = target.distance(grid.nodes()).reshape(grid.shape)
    values = np.broadcast_to(distances, (grid.n_steps + 1,) + grid.shape).copy()
    field = static_speed_field(SinusoidalLandscape(1.0, 0.0), 1, 2, grid.dt.value, grid.n_steps + 1)
    return ValueField(grid, values, distances <= grid.h.value, target), field, target


def test_traced_path_exits_near_the_distance():
    phi, field, target = _distance_field()
    trajectory = trace_optimal_trajectory(phi, field, target, 0.0, [0.8, 0.0])
    tolerance = 3.0 * (phi.h + phi.dt)
    assert abs(trajectory.exit_time - 0.8) <= tolerance
    assert target.distance(trajectory.final_point.reshape(1, -1))[0] <= phi.h
    assert trajectory.is_admissible(1.0)


def test_exit_time_is_relative_to_the_start_time():
    phi, field, target = _distance_field()
    paths, exits = trace_many(phi, field, target, 0.3, [[0.8, 0.0], [0.05, 0.0]])
    assert_allclose(paths[0, :4], [[0.8, 0.0]] * 4)
    assert abs(exits[0] - 0.8) <= 3.0 * (phi.h + phi.dt)
    assert exits[1] == 0.0
    assert_allclose(paths[1], [[0.05, 0.0]] * paths.shape[1])


def test_short_horizon_raises_tracing_error():
    phi, field, target = _distance_field(t_max=0.3)
    with pytest.raises(TracingError, match="did not reach the target"):
        trace_optimal_trajectory(phi, field, target, 0.0, [0.9, 0.0])
    _, exits = trace_many(phi, field, target, 0.0, [[0.9, 0.0]])
    assert math.isinf(exits[0])


def test_start_outside_the_box_is_rejected():
    phi, field, target = _distance_field()
    with pytest.raises(ValueError, match="outside the grid box"):
        trace_optimal_trajectory(phi, field, target, 0.0, [3.0, 0.0])


def test_flow_velocity_prefers_the_previous_direction():
    phi, field, _ = _distance_field()
    directions, valid = flow_velocity(phi, field, 0.0, np.array([[0.5, 0.0]]))
    assert valid.all()
    assert_allclose(directions[0], [-1.0, 0.0], atol=1e-6)
    steered, _ = flow_velocity(phi, field, 0.0, np.array([[0.5, 0.0]]), previous=np.array([[0.0, 1.0]]))
    assert steered[0, 0] < 0.0


def test_traced_paths_respect_the_exit_and_confinement_bounds():
    grid = SpaceTimeGrid([[-1.0, 1.0], [-1.0, 1.0]], 0.1, 0.05, 4.0)
    model = SinusoidalLandscape(1.0, 0.5)
    field = static_speed_field(model, 1, 2, grid.dt.value, grid.n_steps + 1)
    target = TargetSet([Ball([0.5, 0.5], 0.1)])
    phi = solve_value_function(field, target, grid, n_directions=32)

    rng = np.random.default_rng(5)
    starts = rng.uniform(-0.8, 0.8, size=(40, 2))
    starts = starts[target.distance(starts) > 2.0 * grid.h.value]
    paths, exits = trace_many(phi, field, target, 0.0, starts, n_directions=32)
    assert np.all(np.isfinite(exits))

    exit_bound, confinement = psi_T_bounds(target, model.k_min, model.k_max, np.linalg.norm(starts, axis=1))
    assert np.all(exits <= exit_bound + 3.0 * (grid.h.value + grid.dt.value))
    reach = np.linalg.norm(paths, axis=2).max(axis=1)
    assert np.all(reach <= confinement)
    bundle = TrajectoryBundle.from_arrays(paths, None, grid.dt.value, exit_times=exits)
    assert np.all(bundle.admissible(model.k_max))
