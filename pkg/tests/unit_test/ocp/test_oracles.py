import numpy as np
from numpy.testing import assert_allclose

from mfgtime.model.grid import SpaceTimeGrid
from mfgtime.model.targets import PointCloud, TargetSet
from mfgtime.ocp.lipschitz import empirical_lipschitz
from mfgtime.ocp.oracles import dijkstra_oracle, grid_graph
from mfgtime.ocp.value_field import ValueField


def test_graph_has_all_neighbour_edges():
    grid = SpaceTimeGrid([[0.0, 0.2], [0.0, 0.2]], 0.1, 0.1, 1.0)
    graph = grid_graph(grid, lambda points: np.ones(points.shape[0]))
    # 3x3 nodes: 12 axis edges and 8 diagonals
    assert graph.number_of_edges() == 20


def test_dijkstra_on_a_line_is_exact():
    grid = SpaceTimeGrid([[-1.0, 1.0]], 0.1, 0.1, 1.0)
    target = TargetSet([PointCloud([[0.0]])])
    times = dijkstra_oracle(lambda points: np.full(points.shape[0], 2.0), target, grid)
    expected = np.maximum(np.abs(grid.axes[0]) - 0.1, 0.0) / 2.0
    assert_allclose(times, expected, atol=1e-12)


def test_empirical_lipschitz_of_a_distance_field():
    grid = SpaceTimeGrid([[-1.0, 1.0], [-1.0, 1.0]], 0.1, 0.1, 0.3)
    distances = np.linalg.norm(grid.nodes(), axis=1).reshape(grid.shape)
    values = np.broadcast_to(distances, (grid.n_steps + 1,) + grid.shape).copy()
    phi = ValueField(grid, values, distances <= 0.1, TargetSet([PointCloud([[0.0, 0.0]])]))
    spatial, temporal = empirical_lipschitz(phi, 0.9)
    assert_allclose(spatial, 1.0, atol=1e-9)
    assert temporal == 0.0
