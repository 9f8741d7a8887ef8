import math

import numpy as np
import pandas as pd

from mfgtime.congestion.speed_field import build_speed_field
from mfgtime.core.constants import DEFAULT_DAMPING_MODE, DEFAULT_MAX_ITERS, DEFAULT_TOL
from mfgtime.core.errors import TracingError
from mfgtime.equilibrium.compaction import compact_bundle
from mfgtime.equilibrium.damping import DampingFactory
from mfgtime.equilibrium.progress_tracker import IterationProgressTracker
from mfgtime.equilibrium.support import count_support_violations
from mfgtime.model.trajectories import TrajectoryBundle
from mfgtime.ocp.semi_lagrangian import solve_value_function
from mfgtime.ocp.tracing import trace_many
from mfgtime.transport.pushforward import flow_distance
from mfgtime.utils.formatting import info, paragraph, warning
from mfgtime.utils.utils import parallel_map


class IterationState:
    """
    Bookkeeping of the best-response iteration.

    `bundles` is the current iterate. Residuals, damping weights and
    per-population residuals are stored for n = 1, 2, ...; the warm start
    Q^1 = BR(Q^0) has no residual. `support_violations` holds one count per
    iterate, starting with the stationary bundle Q^0.
    """

    def __init__(self, bundles, ids, mode=DEFAULT_DAMPING_MODE):
        self.n = 0
        self.bundles = list(bundles)
        self.ids = list(ids)
        self.mode = mode
        self.residuals = []
        self.population_residuals = []
        self.weights = []
        self.support_violations = []
        self.bundle_sizes = []
        self.value_fields = None
        self.speed_field = None
        self.converged = False
        self.iteration_times = []
        self.elapsed = None

    def record(self, weight, population_residuals):
        population_residuals = np.asarray(population_residuals, dtype=float)
        self.n += 1
        self.weights.append(float(weight))
        self.population_residuals.append(population_residuals)
        self.residuals.append(float(population_residuals.max()))
        return self.residuals[-1]

    @property
    def last_residual(self):
        return self.residuals[-1] if self.residuals else math.inf

    @property
    def iterations(self) -> int:
        return len(self.residuals)

    def history_frame(self) -> pd.DataFrame:
        """Iteration log: n, lambda, residual, one residual column per population, bundle sizes."""
        data = {
            "n": np.arange(1, self.iterations + 1),
            "lambda": self.weights,
            "residual": self.residuals,
        }
        per_population = np.array(self.population_residuals).reshape(self.iterations, len(self.ids))
        for index, population_id in enumerate(self.ids):
            data[f"residual_{population_id}"] = per_population[:, index]
        sizes = np.array(self.bundle_sizes[-self.iterations:] if self.iterations else []).reshape(
            self.iterations, len(self.ids))
        for index, population_id in enumerate(self.ids):
            data[f"members_{population_id}"] = sizes[:, index].astype(int)
        return pd.DataFrame(data)

    def __repr__(self):
        return (f"IterationState(n={self.n}, mode='{self.mode}', "
                f"residual={self.last_residual:.3e}, converged={self.converged})")


def initial_bundle(m0s, grid, targets):
    """
    The stationary bundles b#m0: every atom stays where it starts.

    Atoms within h of their target have exit time 0, all others never exit.
    """
    bundles = []
    for measure, target in zip(m0s, targets):
        on_target = target.distance(measure.points) <= grid.h.value
        exit_times = np.where(on_target, 0.0, math.inf)
        bundles.append(TrajectoryBundle.stationary(measure, grid.dt.value, grid.n_steps + 1, exit_times))
    return bundles


def _solve_population(scenario, field, i, verbose=False):
    solver = scenario.solver
    return solve_value_function(field, scenario.targets[i], scenario.grid, population=i,
                                n_directions=solver.directions.value,
                                max_sweeps=solver.max_sweeps.value,
                                stationary_tol=solver.stationary_tol.value,
                                certified_radius=scenario.certified_radius(),
                                verbose=verbose)


def solve_all(field, scenario, workers=1, verbose=False):
    """Value fields of every population under one speed field, in population order."""
    return parallel_map(lambda i: _solve_population(scenario, field, i, verbose),
                        range(scenario.n_populations), workers)


def _trace_population(scenario, field, phi, i):
    solver = scenario.solver
    m0 = scenario.m0[i]
    paths, exit_times = trace_many(phi, field, scenario.targets[i], 0.0, m0.points, **solver.tracing_options())
    missing = np.flatnonzero(~np.isfinite(exit_times))
    if missing.size:
        atom = int(missing[0])
        raise TracingError(f"Population '{scenario.ids[i]}': atom {atom} at {m0.points[atom].tolist()} "
                           f"did not reach its target within the horizon {scenario.grid.horizon:g} "
                           f"({missing.size} atoms in total); enlarge the box or t_max.",
                           population=scenario.ids[i], atom=atom)
    return TrajectoryBundle.from_arrays(paths, m0.weights, scenario.grid.dt.value, exit_times=exit_times)


def best_response(bundles, scenario, workers=1, verbose=False):
    """
    One element of the best-response map: the optimal paths of every
    population against the crowd described by `bundles`.

    Paths are traced from the original m0 atoms and keep their weights.

    Returns:
        tuple: (bundles, value fields, speed field)

    Raises:
        TracingError: An atom did not reach its target; carries the
            population id and atom index.
    """
    field = build_speed_field(bundles, scenario.speed_model, scenario.grid)
    value_fields = solve_all(field, scenario, workers, verbose)
    responses = parallel_map(lambda i: _trace_population(scenario, field, value_fields[i], i),
                             range(scenario.n_populations), workers)
    return responses, value_fields, field


def _last_node(first, second):
    return min(max(first.settled_node(), second.settled_node()), first.n_nodes - 1)


def update_residuals(current, response, weight):
    """
    Per-population lambda * max_t W_1(e_t#Q_i, e_t#BR_i), which equals
    max_t W_1 between the current and the next iterate.
    """
    return np.array([weight * flow_distance(q, br, p=1.0, last_node=_last_node(q, br)).max()
                     for q, br in zip(current, response)])


def fixed_point_iterate(scenario, max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL, mode=DEFAULT_DAMPING_MODE,
                        workers=1, verbose=True):
    """
    Best-response iteration Q^{n+1} = (1 - lambda_n) Q^n + lambda_n BR(Q^n)
    from the stationary bundles, with compaction after every update.

    The first step replaces the stationary bundles by their best response.
    Iterations n = 1..max_iters follow, stopping once the residual drops to
    `tol`.

    Returns:
        tuple: (IterationState, converged)
    """
    if max_iters < 0:
        raise ValueError(f"max_iters must be nonnegative, got {max_iters}.")
    if tol < 0:
        raise ValueError(f"Tolerance must be nonnegative, got {tol}.")
    damping = DampingFactory.create(mode)
    compaction_tol = scenario.solver.compaction_tol.value

    bundles = initial_bundle(scenario.m0, scenario.grid, scenario.targets)
    state = IterationState(bundles, scenario.ids, damping.name)
    state.support_violations.append(count_support_violations(bundles, scenario))
    state.bundle_sizes.append([len(bundle) for bundle in bundles])

    tracker = IterationProgressTracker(verbose=verbose)
    if verbose:
        print(paragraph("Warm start from the stationary bundles"))
    bundles, value_fields, field = best_response(bundles, scenario, workers)
    state.bundles = bundles
    state.value_fields, state.speed_field = value_fields, field
    state.support_violations.append(count_support_violations(bundles, scenario))
    state.bundle_sizes.append([len(bundle) for bundle in bundles])

    tracker.start_tracking(damping.name)
    tracker.start_timer()
    for n in range(1, max_iters + 1):
        tracker.mark_iteration_start()
        response, value_fields, field = best_response(state.bundles, scenario, workers)
        weight = damping.weight(n)
        residual = state.record(weight, update_residuals(state.bundles, response, weight))
        state.bundles = [compact_bundle(q.mix(br, weight), compaction_tol)
                         for q, br in zip(state.bundles, response)]
        state.value_fields, state.speed_field = value_fields, field
        state.support_violations.append(count_support_violations(state.bundles, scenario))
        state.bundle_sizes.append([len(bundle) for bundle in state.bundles])
        tracker.track(n, weight, residual)
        if residual <= tol:
            state.converged = True
            break
    tracker.stop_timer()
    tracker.finish_tracking(state.converged)
    state.iteration_times = list(tracker.iteration_times)
    state.elapsed = tracker.elapsed

    if verbose and any(state.support_violations):
        print(warning(f"Support bound violated in {sum(1 for v in state.support_violations if v)} iterates."))
    if verbose:
        print(info(f"Final bundle sizes: {dict(zip(state.ids, state.bundle_sizes[-1]))}"))
    return state, state.converged
