import numpy as np
import pandas as pd

from mfgtime.core.constants import DEFAULT_SUPPORT_RADII, SUPPORT_BOUND_TOL
from mfgtime.model.bounds import phi_support_profile


def support_radii(scenario, count=DEFAULT_SUPPORT_RADII) -> np.ndarray:
    """`count` radii spread evenly over [0, R0]."""
    return np.linspace(0.0, scenario.initial_support_radius(), int(count))


def support_table(bundles, scenario, radii=None) -> pd.DataFrame:
    """
    Mass of e_t#Q_i inside B_psi_i(R) against the guaranteed profile
    min_j m0^j(B_R), for every population, radius and grid time.

    Returns:
        pd.DataFrame: One row per (population, R, t) with columns
        population, R, psi, t, mass, profile, margin.
    """
    radii = support_radii(scenario) if radii is None else np.asarray(radii, dtype=float)
    profile = np.array([phi_support_profile(scenario.m0, radius) for radius in radii])
    frames = []
    for i, bundle in enumerate(bundles):
        _, psi = scenario.bounds(i, radii)
        psi = np.atleast_1d(psi)
        norms = np.linalg.norm(bundle.paths, axis=2)
        for radius, confinement, guaranteed in zip(radii, psi, profile):
            mass = bundle.weights @ (norms <= confinement)
            frames.append(pd.DataFrame({
                "population": scenario.ids[i],
                "R": radius,
                "psi": confinement,
                "t": bundle.times,
                "mass": mass,
                "profile": guaranteed,
                "margin": mass - guaranteed,
            }))
    return pd.concat(frames, ignore_index=True)


def count_support_violations(bundles, scenario, radii=None, tol=SUPPORT_BOUND_TOL) -> int:
    table = support_table(bundles, scenario, radii)
    return int((table["margin"] < -tol).sum())
