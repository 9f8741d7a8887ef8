"""
A-priori bounds of the minimal-time problem that depend only on the
target geometry, the speed bounds and the initial measures.
"""

import numpy as np

from mfgtime.model.targets import TargetSet, target_distance


def _check_speeds(k_min, k_max):
    if k_min <= 0:
        raise ValueError(f"K_min must be positive, got {k_min}.")
    if k_max < k_min:
        raise ValueError(f"K_max must be at least K_min, got K_min={k_min}, K_max={k_max}.")


def origin_distance(target: TargetSet) -> float:
    """D0: distance from the origin to the target set."""
    return target_distance(target, np.zeros(target.dim))


def psi_T_bounds(target: TargetSet, k_min, k_max, radius):
    """
    Exit-time and confinement bounds for starting points in B_R.

    Moving at speed K_min along the straight segment towards the target
    point nearest to the origin reaches the target within
    T(R) = (R + D0) / K_min. No admissible path leaves B_psi(R) before then,
    where psi(R) = R + K_max * T(R).

    Args:
        target: Target set.
        k_min, k_max: Speed bounds, 0 < k_min <= k_max.
        radius: R >= 0 (scalar or array).

    Returns:
        tuple: (T(R), psi(R)), scalars or arrays like `radius`.
    """
    _check_speeds(k_min, k_max)
    radius_array = np.asarray(radius, dtype=float)
    if np.any(radius_array < 0):
        raise ValueError(f"Radius must be nonnegative, got {radius}.")
    d0 = origin_distance(target)
    exit_bound = (radius_array + d0) / k_min
    confinement = radius_array + k_max * exit_bound
    if radius_array.ndim == 0:
        return float(exit_bound), float(confinement)
    return exit_bound, confinement


def phi_support_profile(m0, radius):
    """min_i m0^i(B_R): the mass every population is guaranteed to have within radius R."""
    if radius < 0:
        raise ValueError(f"Radius must be nonnegative, got {radius}.")
    return min(measure.mass_in_ball(radius) for measure in m0)


def lipschitz_bounds(target: TargetSet, k_min, k_max, speed_lipschitz, radius):
    """
    A-priori Lipschitz constants of the value function on B_R.

    C_R = exp(L * T(R)) / K_min bounds the spatial constant, and
    M_R = C_psi(R) * K_max + 1 bounds the temporal one, where L is the
    spatial Lipschitz constant of the speed.

    Returns:
        tuple: (C_R, M_R)
    """
    exit_bound, confinement = psi_T_bounds(target, k_min, k_max, radius)
    spatial = np.exp(speed_lipschitz * exit_bound) / k_min
    exit_outer, _ = psi_T_bounds(target, k_min, k_max, confinement)
    temporal = np.exp(speed_lipschitz * exit_outer) / k_min * k_max + 1.0
    return float(spatial), float(temporal)
