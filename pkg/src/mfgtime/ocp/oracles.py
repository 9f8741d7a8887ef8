import itertools

import networkx as nx
import numpy as np

from mfgtime.ocp.semi_lagrangian import target_mask

_SOURCE = "target"


def grid_graph(grid, speed_fn) -> nx.Graph:
    """
    Graph on the grid nodes with an edge to each of the 3^d - 1 neighbours
    (8 in the plane). The weight of an edge is its length divided by the
    speed at its midpoint.

    Args:
        grid: SpaceTimeGrid.
        speed_fn: Vectorised speed, (n, d) positions -> (n,) speeds.
    """
    shape = grid.shape
    nodes = grid.nodes()
    flat = np.arange(nodes.shape[0]).reshape(shape)
    graph = nx.Graph()
    graph.add_nodes_from(range(nodes.shape[0]))
    for offset in itertools.product((-1, 0, 1), repeat=grid.dim):
        offset = np.array(offset)
        # each undirected edge once: first nonzero component positive
        nonzero = np.flatnonzero(offset)
        if nonzero.size == 0 or offset[nonzero[0]] < 0:
            continue
        source = flat[tuple(slice(max(0, -o), n - max(0, o)) for o, n in zip(offset, shape))].reshape(-1)
        target = flat[tuple(slice(max(0, o), n - max(0, -o)) for o, n in zip(offset, shape))].reshape(-1)
        length = grid.h.value * np.linalg.norm(offset)
        midpoints = 0.5 * (nodes[source] + nodes[target])
        weights = length / speed_fn(midpoints)
        graph.add_weighted_edges_from(zip(source.tolist(), target.tolist(), weights.tolist()))
    return graph


def dijkstra_oracle(speed_fn, target, grid) -> np.ndarray:
    """
    Travel time to the target on the neighbour graph of the grid, a
    shortest-path reference for stationary value functions.

    Nodes within h of the target are sources at distance 0.

    Returns:
        np.ndarray: Travel times shaped like the grid (+inf if unreachable).
    """
    graph = grid_graph(grid, speed_fn)
    sources = np.flatnonzero(target_mask(target, grid).reshape(-1)).tolist()
    graph.add_node(_SOURCE)
    graph.add_weighted_edges_from((_SOURCE, node, 0.0) for node in sources)
    lengths = nx.single_source_dijkstra_path_length(graph, _SOURCE)
    result = np.full(grid.n_nodes, np.inf)
    for node, length in lengths.items():
        if node != _SOURCE:
            result[node] = length
    return result.reshape(grid.shape)
