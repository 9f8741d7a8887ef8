"""
Checks on the measure flows of trajectory bundles: long-time behaviour,
support confinement, admissibility of members and the equilibrium
residual.
"""

import numpy as np

from mfgtime.core.constants import EQUILIBRIUM_RESIDUAL_FRACTION, SUPPORT_BOUND_TOL
from mfgtime.diagnostics.report import CheckResult
from mfgtime.diagnostics.sampling import scheme_tolerance
from mfgtime.equilibrium.residuals import equilibrium_residual
from mfgtime.equilibrium.support import support_table
from mfgtime.model.bounds import origin_distance, psi_T_bounds
from mfgtime.transport.pushforward import final_measure, measure_at_node
from mfgtime.transport.wasserstein import wasserstein_distance


def distance_to_limit(bundle, p=1.0):
    """W_p(e_t#Q, e_inf#Q) at every grid time; exactly zero once no member moves."""
    limit = final_measure(bundle)
    distances = np.zeros(bundle.n_nodes)
    for k in range(min(bundle.settled_node(), bundle.n_nodes - 1)):
        distances[k] = wasserstein_distance(measure_at_node(bundle, k), limit, p)
    return distances


def decay_bound(bundle, target, k_min, k_max, p=1.0):
    """
    2 (integral over |x| > alpha (t - t0) of psi(|x|)^p dm0)^(1/p) at every
    grid time, with alpha = K_min and t0 = D0 / K_min.
    """
    starts = bundle.paths[:, 0, :]
    radii = np.linalg.norm(starts, axis=1)
    _, psi = psi_T_bounds(target, k_min, k_max, radii)
    alpha = k_min
    t0 = origin_distance(target) / k_min
    outside = radii[None, :] > alpha * (bundle.times[:, None] - t0)
    tail = (outside * (np.atleast_1d(psi) ** p)[None, :]) @ bundle.weights
    return 2.0 * tail ** (1.0 / p)


def asymptotics_report(bundles, scenario) -> CheckResult:
    """
    m_t converges to m_inf: W_p(m_t, m_inf) decays up to jitter, stays
    under the tail bound, and vanishes from T(R0) + 2 dt on.
    """
    grid = scenario.grid
    h = grid.h.value
    dt = grid.dt.value
    jitter = 2.0 * scheme_tolerance(grid)
    bound_tol = h + scenario.speed_model.k_max * dt
    p = scenario.p.value
    k_min, k_max = scenario.speed_model.k_min, scenario.speed_model.k_max

    per_population = {}
    passed = True
    worst_rise = worst_excess = worst_tail = 0.0
    for i, bundle in enumerate(bundles):
        population_id = scenario.ids[i]
        never = int((~np.isfinite(bundle.exit_times)).sum())
        if never:
            per_population[population_id] = {"never_exit": never}
            passed = False
            continue
        distances = distance_to_limit(bundle, p)
        rise = float(np.max(np.diff(distances), initial=0.0))
        excess = float(np.max(distances - decay_bound(bundle, scenario.targets[i], k_min, k_max, p)))
        radius = float(np.linalg.norm(bundle.paths[:, 0, :], axis=1).max())
        exit_bound, _ = psi_T_bounds(scenario.targets[i], k_min, k_max, radius)
        settle = bundle.times >= exit_bound + 2.0 * dt
        tail = float(distances[settle].max()) if settle.any() else 0.0
        ok = rise <= jitter and excess <= bound_tol and tail <= h
        passed &= ok
        worst_rise, worst_excess, worst_tail = max(worst_rise, rise), max(worst_excess, excess), max(worst_tail, tail)
        per_population[population_id] = {"max_rise": rise, "bound_excess": excess, "settled_distance": tail,
                                          "settle_time": exit_bound + 2.0 * dt,
                                          "initial_distance": float(distances[0])}
    measured = {"max_rise": worst_rise, "bound_excess": worst_excess, "settled_distance": worst_tail}
    return CheckResult.decide("asymptotics", passed, measured, h,
                              "Each population's distribution converges to its final distribution, under "
                              "the tail bound with alpha = K_min, t0 = D0 / K_min, and reaches it by "
                              "T(R0) + 2 dt.",
                              {"populations": per_population, "jitter": jitter, "bound_tolerance": bound_tol})


def check_support_bound(bundles, scenario, history=None, tol=SUPPORT_BOUND_TOL) -> CheckResult:
    """
    e_t#Q_i(B_psi(R)) >= min_j m0^j(B_R) on a grid of radii and all grid
    times. `history` adds the violation counts recorded for earlier iterates.
    """
    table = support_table(bundles, scenario)
    violations = int((table["margin"] < -tol).sum())
    earlier = int(sum(history)) if history else 0
    measured = {"violations": violations + earlier, "min_margin": float(table["margin"].min())}
    return CheckResult.decide("support_bound", violations + earlier == 0, measured, tol,
                              "The mass inside B_psi(R) never drops below the initial mass inside B_R.",
                              {"final_iterate_violations": violations, "earlier_iterate_violations": earlier,
                               "rows": int(len(table))})


def check_trajectory_admissibility(bundles, scenario) -> CheckResult:
    """Members move at most K_max dt per step and stay within B_psi(|gamma(0)|)."""
    grid = scenario.grid
    k_min, k_max = scenario.speed_model.k_min, scenario.speed_model.k_max
    tol = k_max * (grid.h.value + 2.0 * grid.dt.value)
    too_fast = 0
    excess = -np.inf
    for i, bundle in enumerate(bundles):
        too_fast += int((~bundle.admissible(k_max)).sum())
        starts = np.linalg.norm(bundle.paths[:, 0, :], axis=1)
        _, psi = psi_T_bounds(scenario.targets[i], k_min, k_max, starts)
        reach = np.linalg.norm(bundle.paths, axis=2).max(axis=1)
        excess = max(excess, float((reach - psi).max()))
    measured = {"too_fast_members": too_fast, "max_radius_excess": excess}
    return CheckResult.decide("trajectory_admissibility", too_fast == 0 and excess <= tol, measured, tol,
                              "Every member respects the speed cap and stays inside B_psi(|x0|).")


def check_equilibrium_residual(bundles, scenario, workers=1, value_fields=None) -> CheckResult:
    """Mass-weighted suboptimality within a fixed fraction of the mean exit time."""
    residual = equilibrium_residual(bundles, scenario, workers, value_fields)
    tol = EQUILIBRIUM_RESIDUAL_FRACTION * residual.mean_exit_time
    flagged = int(residual.flagged.sum())
    measured = {"residual": residual.value, "mean_exit_time": residual.mean_exit_time, "never_exit": flagged}
    return CheckResult.decide("equilibrium_residual", residual.value <= tol and flagged == 0, measured, tol,
                              "Almost every member is optimal for the speed field the bundles induce.",
                              residual.as_dict())
