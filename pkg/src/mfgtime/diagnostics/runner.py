import numpy as np

from mfgtime.congestion.speed_field import build_speed_field
from mfgtime.diagnostics.direction_checks import check_normalized_gradient, check_U_equals_W
from mfgtime.diagnostics.measure_checks import (asymptotics_report, check_equilibrium_residual,
                                               check_support_bound, check_trajectory_admissibility)
from mfgtime.diagnostics.mfg_system import mfg_system_residual
from mfgtime.diagnostics.report import FAIL, INFO, PASS, CheckResult, DiagnosticsReport
from mfgtime.diagnostics.sampling import check_rng
from mfgtime.diagnostics.value_checks import (check_dpp, check_hj_residual, check_lipschitz,
                                             check_optimality_converse, check_ratio_sensitivity,
                                             check_time_monotonicity, check_value_bound)
from mfgtime.equilibrium.iteration import solve_all
from mfgtime.utils.utils import parallel_map


def _worst(values):
    values = [value for value in values if value is not None]
    if not values:
        return None
    if all(isinstance(value, (int, float, np.floating, np.integer)) for value in values):
        return max(values)
    return values[0]


def _tightest(tolerances):
    if not tolerances:
        return None
    if all(isinstance(tolerance, dict) for tolerance in tolerances):
        return {key: min(tolerance[key] for tolerance in tolerances if key in tolerance)
                for key in tolerances[0]}
    return min(tolerances)


def merge_results(name, results, ids) -> CheckResult:
    """
    One entry from per-population results of the same check: it fails if
    any population fails, measured values are the worst over populations.
    """
    statuses = {result.status for result in results}
    if FAIL in statuses:
        status = FAIL
    elif statuses == {INFO}:
        status = INFO
    else:
        status = PASS
    keys = []
    for result in results:
        keys.extend(key for key in result.measured if key not in keys)
    measured = {key: _worst([result.measured.get(key) for result in results]) for key in keys}
    # Agreement fractions are better when larger.
    for key in keys:
        if "fraction" in key:
            measured[key] = min(result.measured[key] for result in results if key in result.measured)
    tolerance = _tightest([result.tolerance for result in results if result.tolerance is not None])
    details = {population_id: {"status": result.status, "measured": result.measured, **result.details}
               for population_id, result in zip(ids, results)}
    return CheckResult(name, status, measured, tolerance, results[0].statement, {"populations": details})


def _population_checks(i, bundles, scenario, phi, field, samples):
    seed = scenario.seed.value
    model = scenario.speed_model
    options = scenario.solver.tracing_options()
    k_min, k_max = model.k_min, model.k_max
    bundle = bundles[i]
    radius = scenario.initial_support_radius()
    return [
        check_dpp(phi, bundle, field, check_rng(seed, "dpp", i), samples["dpp"]),
        check_hj_residual(phi, field),
        check_time_monotonicity(phi, check_rng(seed, "time_monotonicity", i), samples["time_monotonicity"]),
        check_U_equals_W(phi, field, check_rng(seed, "u_equals_w", i), samples["u_equals_w"], options),
        check_normalized_gradient(phi, field, check_rng(seed, "normalized_gradient", i),
                                  samples["normalized_gradient"], options),
        check_value_bound(phi, k_min, k_max),
        check_optimality_converse(phi, field, check_rng(seed, "optimality_converse", i),
                                  samples["optimality_converse"], options),
        check_lipschitz(phi, k_min, k_max, model.lipschitz_x(scenario.dim), radius,
                        model.lipschitz_w1(scenario.dim)),
        check_ratio_sensitivity(phi, field, check_rng(seed, "ratio_sensitivity", i), samples["ratio_sensitivity"],
                                options["n_directions"], options["probe"]),
    ]


DEFAULT_SAMPLES = {
    "dpp": 200,
    "time_monotonicity": 200,
    "u_equals_w": 100,
    "normalized_gradient": 200,
    "optimality_converse": 30,
    "ratio_sensitivity": 50,
}


def run_diagnostics(bundles, scenario, value_fields=None, field=None, workers=1, history=None,
                    samples=None, metadata=None) -> DiagnosticsReport:
    """
    Every check of the verification suite on a set of population bundles.

    Value functions and the speed field are rebuilt from the bundles unless
    given. Random draws come from per-check streams of the scenario seed,
    so the report does not depend on the order or parallelism of checks.

    Args:
        history: Support-bound violation counts of earlier iterates.
        samples: Overrides of the per-check sample counts.
    """
    counts = dict(DEFAULT_SAMPLES)
    counts.update(samples or {})
    if field is None:
        field = build_speed_field(bundles, scenario.speed_model, scenario.grid)
        value_fields = None
    if value_fields is None:
        value_fields = solve_all(field, scenario, workers)

    per_population = parallel_map(
        lambda i: _population_checks(i, bundles, scenario, value_fields[i], field, counts),
        range(scenario.n_populations), workers)

    report = DiagnosticsReport(metadata=metadata)
    for position, first in enumerate(per_population[0]):
        results = [checks[position] for checks in per_population]
        report.add(merge_results(first.name, results, scenario.ids))
    report.add(asymptotics_report(bundles, scenario))
    report.add(check_support_bound(bundles, scenario, history))
    report.add(mfg_system_residual(bundles, value_fields, field, scenario,
                                   check_rng(scenario.seed.value, "mfg_system")))
    report.add(check_equilibrium_residual(bundles, scenario, workers, value_fields))
    report.add(check_trajectory_admissibility(bundles, scenario))
    return report
