"""
Tabular and binary exports of run artifacts, and loading of stored
bundles.

CSV files are written by pandas with 17 significant digits so that a
stored bundle reloads bit for bit.
"""

import struct

import numpy as np
import pandas as pd

from mfgtime.congestion.kernel_density import density_grid
from mfgtime.core.errors import ConfigError
from mfgtime.model.trajectories import TrajectoryBundle
from mfgtime.transport.pushforward import measure_at_node
from mfgtime.transport.wasserstein import transport_plan_frame

FLOAT_FORMAT = "%.17g"
BINARY_MAGIC = b"MFGV"


def _space_columns(dim):
    return [f"x{j + 1}" for j in range(dim)]


def write_csv(frame: pd.DataFrame, path) -> str:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return str(path)


# Value fields

def write_value_field_csv(phi, path) -> str:
    return write_csv(phi.as_frame(), path)


def write_value_field_binary(phi, path) -> str:
    """
    Little-endian dump: b"MFGV", uint32 d, uint32 nt, uint32 n_1..n_d,
    float64 h, float64 dt, float64 lo_1..lo_d, then the values in
    row-major (time, x_1, .., x_d) order.
    """
    grid = phi.grid
    header = BINARY_MAGIC
    header += struct.pack(f"<II{grid.dim}I", grid.dim, phi.n_steps + 1, *grid.shape)
    header += struct.pack(f"<dd{grid.dim}d", grid.h.value, grid.dt.value, *grid.lo)
    with open(path, "wb") as handle:
        handle.write(header)
        handle.write(np.ascontiguousarray(phi.values, dtype="<f8").tobytes())
    return str(path)


def read_value_field_binary(path):
    """
    Reads a binary value dump.

    Returns:
        dict: with keys dim, shape, h, dt, lo and values.
    """
    with open(path, "rb") as handle:
        data = handle.read()
    if data[:4] != BINARY_MAGIC:
        raise ConfigError(f"'{path}' is not a value-field dump.")
    offset = 4
    dim, nt = struct.unpack_from("<II", data, offset)
    offset += 8
    shape = struct.unpack_from(f"<{dim}I", data, offset)
    offset += 4 * dim
    h, dt = struct.unpack_from("<dd", data, offset)
    offset += 16
    lo = struct.unpack_from(f"<{dim}d", data, offset)
    offset += 8 * dim
    values = np.frombuffer(data, dtype="<f8", offset=offset).reshape((nt,) + tuple(shape))
    return {"dim": dim, "shape": tuple(shape), "h": h, "dt": dt, "lo": np.array(lo), "values": values.copy()}


# Bundles

def bundle_frame(bundle, population=None) -> pd.DataFrame:
    """
    One row per member and node with columns
    (population, trajectory, weight, t0, exit_time, t, x1..xd).
    """
    m, n_nodes, dim = bundle.paths.shape
    columns = {}
    if population is not None:
        columns["population"] = np.full(m * n_nodes, population, dtype=object)
    columns["trajectory"] = np.repeat(np.arange(m), n_nodes)
    columns["weight"] = np.repeat(bundle.weights, n_nodes)
    columns["t0"] = np.repeat(bundle.t0s, n_nodes)
    columns["exit_time"] = np.repeat(bundle.exit_times, n_nodes)
    columns["t"] = np.tile(bundle.times, m)
    points = bundle.paths.reshape(-1, dim)
    for j, name in enumerate(_space_columns(dim)):
        columns[name] = points[:, j]
    return pd.DataFrame(columns)


def write_bundles_csv(bundles, ids, path) -> str:
    frame = pd.concat([bundle_frame(bundle, population) for bundle, population in zip(bundles, ids)],
                      ignore_index=True)
    return write_csv(frame, path)


def write_trajectories_csv(bundle, path) -> str:
    return write_csv(bundle_frame(bundle), path)


def read_bundles_csv(path, dt):
    """
    Bundles stored by `write_bundles_csv`, in file order of populations.

    Returns:
        tuple: (ids, bundles)
    """
    frame = pd.read_csv(path, dtype={"population": str}, float_precision="round_trip")
    required = {"population", "trajectory", "weight", "t0", "exit_time", "t"}
    if not required.issubset(frame.columns):
        raise ConfigError(f"Bundle file '{path}' misses columns {sorted(required - set(frame.columns))}.")
    space = [column for column in frame.columns if column.startswith("x")]
    ids, bundles = [], []
    for population, rows in frame.groupby("population", sort=False):
        rows = rows.sort_values(["trajectory", "t"], kind="stable")
        members = rows["trajectory"].unique()
        n_nodes = len(rows) // len(members)
        paths = rows[space].to_numpy().reshape(len(members), n_nodes, len(space))
        firsts = rows.groupby("trajectory", sort=True).first()
        bundles.append(TrajectoryBundle.from_arrays(paths, firsts["weight"].to_numpy(), dt,
                                                    t0s=firsts["t0"].to_numpy(),
                                                    exit_times=firsts["exit_time"].to_numpy()))
        ids.append(population)
    return ids, bundles


# Measures and plans

def measure_flow_frame(bundles, ids, every=1) -> pd.DataFrame:
    """Node measures e_t#Q_i as rows (population, t, x1..xd, weight)."""
    frames = []
    for bundle, population in zip(bundles, ids):
        for k in range(0, bundle.n_nodes, max(int(every), 1)):
            measure = measure_at_node(bundle, k)
            frame = pd.DataFrame(measure.points, columns=_space_columns(bundle.dim))
            frame.insert(0, "t", bundle.times[k])
            frame.insert(0, "population", population)
            frame["weight"] = measure.weights
            frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def density_frame(bundles, ids, grid, sigma, nodes=None) -> pd.DataFrame:
    """Kernel densities of the node measures on the grid, rows (population, t, x1..xd, density)."""
    coordinates = grid.nodes()
    frames = []
    for bundle, population in zip(bundles, ids):
        for k in (range(bundle.n_nodes) if nodes is None else nodes):
            frame = pd.DataFrame(coordinates, columns=_space_columns(grid.dim))
            frame.insert(0, "t", bundle.times[k])
            frame.insert(0, "population", population)
            frame["density"] = density_grid(measure_at_node(bundle, k), grid, sigma).reshape(-1)
            frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def write_plan_csv(plan, path, mu=None, nu=None) -> str:
    return write_csv(transport_plan_frame(plan, mu, nu), path)


def write_iteration_log(state, path) -> str:
    return write_csv(state.history_frame(), path)
