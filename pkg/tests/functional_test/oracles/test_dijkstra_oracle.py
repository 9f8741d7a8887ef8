import numpy as np

from mfgtime.congestion.speed_field import static_speed_field
from mfgtime.congestion.speed_models import SinusoidalLandscape
from mfgtime.model.grid import SpaceTimeGrid
from mfgtime.model.measures import EmpiricalMeasure
from mfgtime.model.targets import PointCloud, TargetSet
from mfgtime.ocp.oracles import dijkstra_oracle
from mfgtime.ocp.semi_lagrangian import solve_value_function


def test_varying_speed_matches_shortest_paths() -> None:
    # 41 x 41 nodes, k(x) = 1 + sin(x1) sin(x2) / 2
    h, dt = 0.1, 0.05
    grid = SpaceTimeGrid([[-2.0, 2.0], [-2.0, 2.0]], h, dt, 2 * dt)
    assert grid.shape == (41, 41)
    model = SinusoidalLandscape(1.0, 0.5)
    target = TargetSet([PointCloud([[0.0, 0.0]])])
    field = static_speed_field(model, 1, 2, dt, grid.n_steps + 1)

    phi = solve_value_function(field, target, grid, n_directions=64)
    zero = EmpiricalMeasure.zero(2)
    oracle = dijkstra_oracle(lambda points: model.speed(zero, zero, points), target, grid)

    assert np.all(np.isfinite(oracle))
    assert np.abs(phi.values[0] - oracle).max() <= 5 * (h + dt)


if __name__ == '__main__':
    test_varying_speed_matches_shortest_paths()
