"""
Checks on optimal directions: traced initial directions against
maximal-descent directions, and the normalised gradient against finite
differences.
"""

import math

import numpy as np

from mfgtime.core.constants import DEFAULT_ANGLE_TOL_DEG, DEFAULT_PASS_FRACTION
from mfgtime.diagnostics.report import CheckResult
from mfgtime.diagnostics.sampling import angle_between, fd_probe, sample_points
from mfgtime.ocp.directions import NON_UNIQUE, descent_directions, normalized_gradient
from mfgtime.ocp.tracing import trace_many

CHORD_STEPS = 2
SMOOTH_GRADIENT = 0.2


def _agreement(gaps_deg, angle_tol, pass_fraction):
    gaps_deg = np.asarray(gaps_deg, dtype=float)
    if gaps_deg.size == 0:
        return 1.0, True
    fraction = float(np.mean(gaps_deg <= angle_tol))
    return fraction, fraction >= pass_fraction


def initial_directions(phi, field, points, tracing_options=None, steps=CHORD_STEPS):
    """
    Unit chord of the traced optimal path over its first `steps` steps (or
    up to exit), one row per start point; NaN rows for paths that do not move.
    """
    options = dict(tracing_options or {})
    paths, exit_times = trace_many(phi, field, phi.target, 0.0, points, **options)
    dt = phi.dt
    finite = np.isfinite(exit_times)
    exit_nodes = np.where(finite, np.rint(np.where(finite, exit_times, 0.0) / dt), paths.shape[1] - 1)
    end = np.clip(np.minimum(exit_nodes, steps), 1, paths.shape[1] - 1).astype(int)
    chords = paths[np.arange(len(points)), end] - paths[:, 0]
    norms = np.linalg.norm(chords, axis=1)
    result = np.full_like(chords, np.nan)
    moving = norms > 0
    result[moving] = chords[moving] / norms[moving, None]
    return result


def check_U_equals_W(phi, field, rng=None, samples=100, tracing_options=None,
                     angle_tol=DEFAULT_ANGLE_TOL_DEG, pass_fraction=DEFAULT_PASS_FRACTION) -> CheckResult:
    """
    At random off-target points the initial direction of the traced
    optimal path (an optimal direction) agrees with the minimiser of the
    descent ratio (a direction of maximal descent). Points with several
    separated minimisers are counted as multi-valued and left out.
    """
    options = dict(tracing_options or {})
    rng = np.random.default_rng(0) if rng is None else rng
    points = sample_points(phi, rng, samples, min_distance=3.0 * phi.h)
    gaps, multi_valued = [], 0
    if points.shape[0]:
        traced = initial_directions(phi, field, points, options)
        for x, direction in zip(points, traced):
            dset = descent_directions(phi, field, 0.0, x, **options)
            if dset.is_empty or not np.all(np.isfinite(direction)):
                continue
            if not dset.unique:
                multi_valued += 1
                continue
            gaps.append(math.degrees(angle_between(direction[None], dset.argmin_direction[None])[0]))
    fraction, passed = _agreement(gaps, angle_tol, pass_fraction)
    measured = {"agreement_fraction": fraction,
                "median_gap_deg": float(np.median(gaps)) if gaps else 0.0,
                "max_gap_deg": float(np.max(gaps)) if gaps else 0.0}
    return CheckResult.decide("u_equals_w", passed, measured, angle_tol,
                              f"Initial directions of optimal paths coincide with directions of maximal "
                              f"descent within {angle_tol:g} degrees at {pass_fraction:.0%} of points.",
                              {"unique_samples": len(gaps), "multi_valued": multi_valued})


def check_normalized_gradient(phi, field, rng=None, samples=200, tracing_options=None,
                              angle_tol=DEFAULT_ANGLE_TOL_DEG, pass_fraction=DEFAULT_PASS_FRACTION) -> CheckResult:
    """
    Where phi is smooth (finite-difference gradient above 0.2, no kink),
    the normalised gradient points along the finite-difference gradient.
    """
    options = dict(tracing_options or {})
    rng = np.random.default_rng(0) if rng is None else rng
    points = sample_points(phi, rng, samples, min_distance=3.0 * phi.h)
    gaps, non_unique, rough = [], 0, 0
    if points.shape[0]:
        gradients, kinks, finite = fd_probe(phi, 0.0, points, field.k_max)
        smooth = finite & ~kinks & (np.linalg.norm(gradients, axis=1) > SMOOTH_GRADIENT)
        rough = int((~smooth).sum())
        for x, gradient in zip(points[smooth], gradients[smooth]):
            try:
                value = normalized_gradient(phi, field, 0.0, x, **options)
            except ValueError:
                continue
            if isinstance(value, str) and value == NON_UNIQUE:
                non_unique += 1
                continue
            gaps.append(math.degrees(angle_between(value[None], gradient[None])[0]))
    fraction, passed = _agreement(gaps, angle_tol, pass_fraction)
    measured = {"agreement_fraction": fraction,
                "median_gap_deg": float(np.median(gaps)) if gaps else 0.0,
                "max_gap_deg": float(np.max(gaps)) if gaps else 0.0}
    return CheckResult.decide("normalized_gradient", passed, measured, angle_tol,
                              f"At smooth points the normalised gradient is grad phi / |grad phi| within "
                              f"{angle_tol:g} degrees at {pass_fraction:.0%} of points.",
                              {"smooth_samples": len(gaps), "non_unique": non_unique, "excluded_rough": rough})
