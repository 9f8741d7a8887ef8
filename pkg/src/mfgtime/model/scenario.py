import json
import math
from pathlib import Path

from mfgtime.congestion.speed_model_factory import SpeedModelFactory
from mfgtime.core.collection import Collection
from mfgtime.core.component import StandardComponent
from mfgtime.core.constants import (
    DEFAULT_CLUSTER_ANGLE,
    DEFAULT_COMPACTION_TOL,
    DEFAULT_DIRECTIONS,
    DEFAULT_HORIZON_FACTOR,
    DEFAULT_MAX_SWEEPS,
    DEFAULT_PROBE_FACTOR,
    DEFAULT_SEED,
    DEFAULT_SIGMA_FACTOR,
    DEFAULT_STATIONARY_TOL_FACTOR,
    DEFAULT_WASSERSTEIN_ORDER
)
from mfgtime.core.errors import ConfigError
from mfgtime.core.parameter import Descriptor, Parameter
from mfgtime.model.bounds import origin_distance, psi_T_bounds
from mfgtime.model.grid import SpaceTimeGrid
from mfgtime.model.samplers import SamplerFactory, population_rng
from mfgtime.model.targets import TargetSet
from mfgtime.utils.formatting import paragraph, table
from mfgtime.utils.utils import sha256_bytes


def default_select_tol(directions) -> float:
    """Selection slack 2 (1 - cos(2 pi / M)): the ratio spread of two neighbouring directions."""
    return 2.0 * (1.0 - math.cos(2.0 * math.pi / directions))


class Population:
    """One population: its target set and its sampled initial measure."""

    def __init__(self, population_id, target: TargetSet, sampler, m0):
        self.id = population_id
        self.target = target
        self.sampler = sampler
        self.m0 = m0

    def as_dict(self):
        return {"id": self.id, "target": self.target.as_config(), "m0": self.sampler.as_dict()}


class Populations(Collection):
    """
    Ordered collection of populations, keyed by id.
    """

    def add(self, population: Population):
        self._add_item(population.id, population)

    def summary_rows(self):
        return [{"id": p.id,
                 "target": repr(p.target),
                 "atoms": p.m0.n_atoms,
                 "support radius": round(p.m0.support_radius(), 6)}
                for p in self]


class SolverSettings(StandardComponent):
    """Discretisation choices of the direction search, tracing and compaction."""

    @property
    def category_name(self):
        return "solver"

    def __init__(self,
                 dt,
                 directions=DEFAULT_DIRECTIONS,
                 probe=None,
                 select_tol=None,
                 cluster_angle=DEFAULT_CLUSTER_ANGLE,
                 compaction_tol=DEFAULT_COMPACTION_TOL,
                 max_sweeps=DEFAULT_MAX_SWEEPS,
                 stationary_tol=None):
        super().__init__()
        self.directions = Parameter(value=directions,
                                    name="directions",
                                    pretty_name="sampled directions M",
                                    min_value=2,
                                    integer=True)
        self.probe = Parameter(value=DEFAULT_PROBE_FACTOR * dt if probe is None else probe,
                               name="probe",
                               pretty_name="descent-ratio probe step h'",
                               units="s",
                               min_value=0.0,
                               strict_min=True)
        self.select_tol = Parameter(value=default_select_tol(self.directions.value) if select_tol is None else select_tol,
                                    name="select_tol",
                                    pretty_name="direction selection tolerance",
                                    min_value=0.0)
        self.cluster_angle = Parameter(value=cluster_angle,
                                       name="cluster_angle",
                                       pretty_name="direction cluster angle",
                                       units="rad",
                                       min_value=0.0,
                                       strict_min=True)
        self.compaction_tol = Parameter(value=compaction_tol,
                                        name="compaction_tol",
                                        pretty_name="bundle compaction tolerance",
                                        min_value=0.0)
        self.max_sweeps = Parameter(value=max_sweeps,
                                    name="max_sweeps",
                                    pretty_name="stationary sweep budget",
                                    min_value=1,
                                    integer=True)
        self.stationary_tol = Parameter(value=DEFAULT_STATIONARY_TOL_FACTOR * dt if stationary_tol is None else stationary_tol,
                                        name="stationary_tol",
                                        pretty_name="stationary convergence tolerance",
                                        units="s",
                                        min_value=0.0,
                                        strict_min=True)
        self._locked = True

    def tracing_options(self):
        """Keyword arguments of the direction search and the tracer."""
        return {"n_directions": self.directions.value,
                "probe": self.probe.value,
                "select_tol": self.select_tol.value,
                "cluster_angle": self.cluster_angle.value}


class Scenario:
    """
    A complete game: populations with targets and initial measures, the
    speed law, the space-time grid, solver settings, the random seed and
    the Wasserstein order used by diagnostics.

    Values filled in from defaults are listed in `defaults_applied`.
    """

    def __init__(self, populations: Populations, speed_model, grid: SpaceTimeGrid, solver: SolverSettings,
                 seed=DEFAULT_SEED, p=DEFAULT_WASSERSTEIN_ORDER, path=None, sha256=None, defaults_applied=None):
        if len(populations) < 1:
            raise ConfigError("A scenario needs at least one population.")
        dims = {grid.dim}
        for population in populations:
            dims.add(population.target.dim)
            dims.add(population.m0.dim)
        if len(dims) != 1:
            raise ConfigError(f"Inconsistent dimensions across grid, targets and measures: {sorted(dims)}.")

        self.populations = populations
        self.speed_model = speed_model
        self.grid = grid
        self.solver = solver
        self.seed = Descriptor(value=int(seed), name="seed", pretty_name="random seed", editable=False)
        self.p = Parameter(value=p, name="p", pretty_name="Wasserstein order", min_value=1.0, editable=False)
        if not math.isfinite(self.p.value):
            raise ConfigError("Wasserstein order p must be finite.")
        self.path = path
        self.sha256 = sha256
        self.defaults_applied = dict(defaults_applied or {})

    # Loading

    @classmethod
    def from_json(cls, path, seed=None, solver_overrides=None):
        """
        Loads a scenario file. The SHA-256 of the raw bytes is kept for the
        run manifest.
        """
        path = Path(path)
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise ConfigError(f"Cannot read scenario file '{path}': {exc.strerror}.")
        try:
            data = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"Scenario file '{path}' is not valid JSON: {exc}")
        return cls.from_dict(data, seed=seed, solver_overrides=solver_overrides,
                             path=str(path), sha256=sha256_bytes(raw))

    @classmethod
    def from_dict(cls, data, seed=None, solver_overrides=None, path=None, sha256=None):
        if not isinstance(data, dict):
            raise ConfigError("Scenario must be a JSON object.")
        for key in ("populations", "speed_model", "grid"):
            if key not in data:
                raise ConfigError(f"Scenario is missing the '{key}' section.")
        defaults = {}

        if seed is None:
            if "seed" not in data:
                defaults["seed"] = DEFAULT_SEED
            seed = data.get("seed", DEFAULT_SEED)
        p = data.get("p", DEFAULT_WASSERSTEIN_ORDER)
        if "p" not in data:
            defaults["p"] = p

        populations = Populations()
        specs = data["populations"]
        if not isinstance(specs, list) or not specs:
            raise ConfigError("'populations' must be a nonempty list.")
        for index, spec in enumerate(specs):
            if "target" not in spec or "m0" not in spec:
                raise ConfigError(f"Population {index} needs 'target' and 'm0'.")
            target = TargetSet.from_config(spec["target"])
            sampler = SamplerFactory.create(spec["m0"])
            m0 = sampler.sample(population_rng(seed, index))
            populations.add(Population(str(spec.get("id", f"pop{index + 1}")), target, sampler, m0))

        grid_spec = dict(data["grid"])
        for key in ("box", "h", "dt"):
            if key not in grid_spec:
                raise ConfigError(f"Grid section is missing '{key}'.")
        for key in ("h", "dt", "t_max"):
            if key in grid_spec:
                grid_spec[key] = _grid_number(grid_spec, key)

        model_spec = dict(data["speed_model"])
        if model_spec.get("type", "exponential") == "exponential" and "sigma" not in model_spec:
            model_spec["sigma"] = DEFAULT_SIGMA_FACTOR * grid_spec["h"]
            defaults["speed_model.sigma"] = model_spec["sigma"]
        speed_model = SpeedModelFactory.create(model_spec)

        if "t_max" not in grid_spec:
            grid_spec["t_max"] = cls._default_horizon(populations, speed_model, grid_spec["dt"])
            defaults["grid.t_max"] = grid_spec["t_max"]
        try:
            grid = SpaceTimeGrid(grid_spec["box"], grid_spec["h"], grid_spec["dt"], grid_spec["t_max"])
        except TypeError as exc:
            raise ConfigError(f"Bad grid section: {exc}")

        solver_spec = dict(data.get("solver", {}))
        solver_spec.update(solver_overrides or {})
        for key in ("directions", "probe", "select_tol", "cluster_angle", "compaction_tol",
                    "max_sweeps", "stationary_tol"):
            if key not in solver_spec:
                defaults[f"solver.{key}"] = True
        try:
            solver = SolverSettings(grid.dt.value, **solver_spec)
        except TypeError as exc:
            raise ConfigError(f"Bad solver section: {exc}")
        for key in [k for k in defaults if k.startswith("solver.")]:
            defaults[key] = getattr(solver, key.split(".", 1)[1]).value

        return cls(populations, speed_model, grid, solver, seed, p, path, sha256, defaults)

    @staticmethod
    def _default_horizon(populations, speed_model, dt):
        """DEFAULT_HORIZON_FACTOR * max_i T_i(psi_i(R0)), rounded up to whole steps."""
        radius = max(p.m0.support_radius() for p in populations)
        horizons = []
        for population in populations:
            _, confinement = psi_T_bounds(population.target, speed_model.k_min, speed_model.k_max, radius)
            exit_bound, _ = psi_T_bounds(population.target, speed_model.k_min, speed_model.k_max, confinement)
            horizons.append(exit_bound)
        t_max = DEFAULT_HORIZON_FACTOR * max(horizons)
        return max(dt, math.ceil(t_max / dt - 1e-9) * dt)

    # Accessors

    @property
    def n_populations(self) -> int:
        return len(self.populations)

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def ids(self):
        return self.populations.ids

    @property
    def targets(self):
        return [population.target for population in self.populations]

    @property
    def m0(self):
        return [population.m0 for population in self.populations]

    def origin_distance(self, i) -> float:
        """D0: distance from the origin to the target of population i."""
        return origin_distance(self.targets[i])

    def initial_support_radius(self) -> float:
        """R0 = max |x| over the atoms of all initial measures."""
        return max(measure.support_radius() for measure in self.m0)

    def bounds(self, i, radius):
        """(T(R), psi(R)) for population i."""
        return psi_T_bounds(self.targets[i], self.speed_model.k_min, self.speed_model.k_max, radius)

    def certified_radius(self) -> float:
        """max_i psi_i(R0): every optimal path stays inside this ball."""
        radius = self.initial_support_radius()
        return max(self.bounds(i, radius)[1] for i in range(self.n_populations))

    def box_is_certified(self) -> bool:
        return self.grid.contains_ball(self.certified_radius())

    def as_dict(self):
        """The scenario with every default expanded."""
        return {
            "populations": [population.as_dict() for population in self.populations],
            "speed_model": self.speed_model.as_config(),
            "grid": {"box": self.grid.box.value,
                     "h": self.grid.h.value,
                     "dt": self.grid.dt.value,
                     "t_max": self.grid.t_max.value},
            "solver": self.solver.as_dict(),
            "seed": self.seed.value,
            "p": self.p.value,
        }

    def show(self):
        self.populations.show_table()
        self.speed_model.show()
        self.grid.show()
        self.solver.show()
        if self.defaults_applied:
            rows = [[key, value] for key, value in sorted(self.defaults_applied.items())]
            print(paragraph("Defaults applied"))
            print(table(rows, headers=["setting", "value"]))

    def __repr__(self):
        return (f"Scenario(populations={self.n_populations}, d={self.dim}, "
                f"model={self.speed_model.type_name}, seed={self.seed.value})")


def _grid_number(grid_spec, key) -> float:
    value = grid_spec[key]
    if isinstance(value, bool):
        raise ConfigError(f"Grid '{key}' must be a number, got {value!r}.")
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"Grid '{key}' must be a number, got {value!r}.") from None
