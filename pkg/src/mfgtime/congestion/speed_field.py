import math

import numpy as np

from mfgtime.model.measures import EmpiricalMeasure
from mfgtime.transport.pushforward import measure_at_node


def hat_measure(measures, i) -> EmpiricalMeasure:
    """
    Uniform mixture of all populations except `i`. With a single population
    there is nobody else and the zero measure is returned.
    """
    measures = list(measures)
    if not 0 <= i < len(measures):
        raise IndexError(f"Population index {i} out of range for {len(measures)} populations.")
    if len(measures) == 1:
        return EmpiricalMeasure.zero(measures[0].dim)
    others = [measure for j, measure in enumerate(measures) if j != i]
    return EmpiricalMeasure.mixture(others, [1.0 / len(others)] * len(others))


class SpeedField:
    """
    The speed k_i(t, x) = K(m_t^i, hat m_t^i, x) seen by each population,
    built from per-time snapshots of the population measures.

    Snapshot n is used on [t_n, t_{n+1}); past the last snapshot the field
    is frozen. A time-independent field keeps a single snapshot.
    """

    def __init__(self, model, own_snapshots, other_snapshots, dt, n_nodes, time_independent=False):
        self._model = model
        self._own = own_snapshots
        self._other = other_snapshots
        self._dt = float(dt)
        self._n_nodes = int(n_nodes)
        self._time_independent = bool(time_independent)
        self._node_cache = {}

    # Properties

    @property
    def model(self):
        return self._model

    @property
    def k_min(self) -> float:
        return self._model.k_min

    @property
    def k_max(self) -> float:
        return self._model.k_max

    @property
    def n_populations(self) -> int:
        return len(self._own[0])

    @property
    def dt(self) -> float:
        return self._dt

    @property
    def n_nodes(self) -> int:
        return self._n_nodes

    @property
    def horizon(self) -> float:
        return (self._n_nodes - 1) * self._dt

    @property
    def time_independent(self) -> bool:
        return self._time_independent

    def snapshot(self, i, n):
        """(own, other) measures used by population i at time index n."""
        n = self._snapshot_index(n)
        return self._own[n][i], self._other[n][i]

    # Evaluation

    def _snapshot_index(self, n):
        if self._time_independent:
            return 0
        return min(max(int(n), 0), len(self._own) - 1)

    def time_index(self, t) -> int:
        """Nearest-earlier snapshot index of time t."""
        return self._snapshot_index(math.floor(float(t) / self._dt + 1e-9))

    def evaluate_at_index(self, i, n, points) -> np.ndarray:
        own, other = self.snapshot(i, n)
        return self._model.speed(own, other, points)

    def evaluate(self, i, t, points) -> np.ndarray:
        """k_i(t, x) at each position."""
        return self.evaluate_at_index(i, self.time_index(t), points)

    def node_speeds(self, i, n, grid) -> np.ndarray:
        """k_i(t_n, .) on the grid nodes, shaped like the grid. Cached per snapshot."""
        key = (i, self._snapshot_index(n), grid.shape)
        if key not in self._node_cache:
            values = self.evaluate_at_index(i, key[1], grid.nodes()).reshape(grid.shape)
            values.setflags(write=False)
            self._node_cache[key] = values
        return self._node_cache[key]

    def __repr__(self):
        mode = "static" if self._time_independent else f"{len(self._own)} snapshots"
        return f"SpeedField(populations={self.n_populations}, {mode})"


def build_speed_field(bundles, model, grid=None) -> SpeedField:
    """
    Speed field induced by one trajectory bundle per population.

    Snapshots are the node measures e_{t_n}#Q_i. When the model ignores the
    crowd or no member ever moves, the field is stored as time independent.
    """
    bundles = list(bundles)
    if not bundles:
        raise ValueError("Need at least one population bundle.")
    reference = bundles[0]
    for bundle in bundles[1:]:
        if not reference.same_grid(bundle):
            raise ValueError("All population bundles must share the same time grid.")
    if grid is not None and (abs(grid.dt.value - reference.dt) > 1e-12 or grid.n_steps + 1 != reference.n_nodes):
        raise ValueError("Bundles do not match the solver's time grid.")
    model.validate()

    static = not model.depends_on_measures or all(bundle.settled_node() == 0 for bundle in bundles)
    n_snapshots = 1 if static else reference.n_nodes
    own_snapshots = []
    other_snapshots = []
    for n in range(n_snapshots):
        measures = [measure_at_node(bundle, n) for bundle in bundles]
        own_snapshots.append(measures)
        other_snapshots.append([hat_measure(measures, i) for i in range(len(measures))])
    return SpeedField(model, own_snapshots, other_snapshots, reference.dt, reference.n_nodes, static)


def static_speed_field(model, n_populations, dim, dt, n_nodes) -> SpeedField:
    """A field for a crowd-independent model, without any bundle."""
    if model.depends_on_measures:
        raise ValueError("A static speed field needs a model that ignores the crowd.")
    model.validate()
    zero = EmpiricalMeasure.zero(dim)
    snapshots = [[zero] * n_populations]
    return SpeedField(model, snapshots, snapshots, dt, n_nodes, time_independent=True)
