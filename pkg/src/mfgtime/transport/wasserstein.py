import math

import numpy as np
import ot
import pandas as pd
from scipy.spatial.distance import cdist

from mfgtime.core.constants import MARGINAL_TOL
from mfgtime.model.measures import EmpiricalMeasure

EMD_MAX_ITERATIONS = 10_000_000


class TransportPlan:
    """
    Sparse coupling between two empirical measures: each entry moves
    `mass` from atom `source` of the first measure to atom `target` of
    the second. `cost` is the total p-cost sum(mass * |x - y|^p).
    """

    def __init__(self, sources, targets, masses, cost, n_sources, n_targets):
        self.sources = np.asarray(sources, dtype=int)
        self.targets = np.asarray(targets, dtype=int)
        self.masses = np.asarray(masses, dtype=float)
        self.cost = float(cost)
        self.n_sources = int(n_sources)
        self.n_targets = int(n_targets)
        if np.any(self.masses < 0):
            raise ValueError("Transport plan masses must be nonnegative.")

    @property
    def pairs(self):
        return list(zip(self.sources.tolist(), self.targets.tolist(), self.masses.tolist()))

    def marginals(self):
        """Row and column sums of the plan."""
        rows = np.bincount(self.sources, weights=self.masses, minlength=self.n_sources)
        cols = np.bincount(self.targets, weights=self.masses, minlength=self.n_targets)
        return rows, cols

    def check_marginals(self, mu: EmpiricalMeasure, nu: EmpiricalMeasure, tol=MARGINAL_TOL) -> bool:
        rows, cols = self.marginals()
        return bool(np.abs(rows - mu.weights).max(initial=0.0) <= tol
                    and np.abs(cols - nu.weights).max(initial=0.0) <= tol)

    def as_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"source": self.sources, "target": self.targets, "mass": self.masses})

    def __len__(self):
        return self.masses.size

    def __repr__(self):
        return f"TransportPlan(pairs={len(self)}, cost={self.cost:.6g})"


def transport_plan_frame(plan: TransportPlan, mu=None, nu=None) -> pd.DataFrame:
    """
    Rows (source, target, mass) of a plan, with the atom positions
    (source_x1.., target_x1..) appended when the two measures are given.
    """
    frame = plan.as_frame()
    for side, measure, rows in (("source", mu, plan.sources), ("target", nu, plan.targets)):
        if measure is None:
            continue
        for j in range(measure.dim):
            frame[f"{side}_x{j + 1}"] = measure.points[rows, j]
    return frame


def _check_order(p):
    if not (isinstance(p, (int, float, np.integer, np.floating)) and math.isfinite(p)):
        raise ValueError(f"Wasserstein order must be a finite number >= 1, got {p}.")
    if p < 1:
        raise ValueError(f"Wasserstein order must satisfy p >= 1, got {p}.")


def wasserstein(mu: EmpiricalMeasure, nu: EmpiricalMeasure, p=1.0):
    """
    Exact Wasserstein distance of order p between two discrete measures.

    Solves the transport linear program with cost |x - y|^p by the network
    simplex of POT (`ot.emd`). No regularisation is applied.

    Args:
        mu, nu: Normalised measures of the same dimension.
        p: Order, finite and >= 1.

    Returns:
        tuple: (distance, TransportPlan)
    """
    _check_order(p)
    if mu.dim != nu.dim:
        raise ValueError(f"Dimension mismatch: {mu.dim} vs {nu.dim}.")
    if mu.is_zero or nu.is_zero:
        raise ValueError("Wasserstein distance needs two nonempty probability measures.")

    distances = cdist(mu.points, nu.points)
    cost_matrix = distances if p == 1 else distances ** p
    plan = ot.emd(np.ascontiguousarray(mu.weights),
                  np.ascontiguousarray(nu.weights),
                  np.ascontiguousarray(cost_matrix),
                  numItermax=EMD_MAX_ITERATIONS)
    sources, targets = np.nonzero(plan > 0)
    masses = plan[sources, targets]
    cost = max(float(np.sum(masses * cost_matrix[sources, targets])), 0.0)
    result = TransportPlan(sources, targets, masses, cost, mu.n_atoms, nu.n_atoms)
    return cost ** (1.0 / p), result


def wasserstein_distance(mu: EmpiricalMeasure, nu: EmpiricalMeasure, p=1.0) -> float:
    """Only the distance of `wasserstein`."""
    return wasserstein(mu, nu, p)[0]
