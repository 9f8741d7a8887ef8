import numpy as np

from mfgtime.congestion.speed_field import build_speed_field
from mfgtime.equilibrium.iteration import solve_all
from mfgtime.utils.formatting import paragraph, table


class EquilibriumResidual:
    """
    Mass-weighted suboptimality of each population's bundle, in seconds.

    `flagged` counts members that never reach their target; their exit
    time is capped at the horizon. `mean_exit_times` are the mass-weighted
    exit times of each population with the same cap.
    """

    def __init__(self, ids, values, flagged, mean_exit_times):
        self.ids = list(ids)
        self.values = np.asarray(values, dtype=float)
        self.flagged = np.asarray(flagged, dtype=int)
        self.mean_exit_times = np.asarray(mean_exit_times, dtype=float)

    @property
    def value(self) -> float:
        return float(self.values.max())

    @property
    def mean_exit_time(self) -> float:
        """Exit time averaged over all populations, each of unit mass."""
        return float(self.mean_exit_times.mean())

    def as_dict(self):
        return {
            "residual": self.value,
            "mean_exit_time": self.mean_exit_time,
            "populations": {population_id: {"residual": float(value),
                                            "flagged": int(flagged),
                                            "mean_exit_time": float(mean)}
                            for population_id, value, flagged, mean
                            in zip(self.ids, self.values, self.flagged, self.mean_exit_times)},
        }

    def show(self):
        rows = [[population_id, f"{value:.4e}", flagged, f"{mean:.4f}"]
                for population_id, value, flagged, mean
                in zip(self.ids, self.values, self.flagged, self.mean_exit_times)]
        print(paragraph("Equilibrium residual"))
        print(table(rows, headers=["population", "residual [s]", "never exit", "mean exit time [s]"]))

    def __repr__(self):
        return f"EquilibriumResidual(residual={self.value:.3e}, flagged={int(self.flagged.sum())})"


def member_suboptimality(bundle, phi):
    """
    Per-member gap max(0, tau - phi(t0, gamma(t0))) and the capped exit times.

    Returns:
        tuple: (gaps, exit times, never-exit mask)
    """
    horizon = phi.grid.horizon
    never = ~np.isfinite(bundle.exit_times)
    exit_times = np.where(never, np.maximum(horizon - bundle.t0s, 0.0), bundle.exit_times)
    starts = bundle.paths[:, 0, :]
    values = np.empty(len(bundle))
    for t0 in np.unique(bundle.t0s):
        members = bundle.t0s == t0
        values[members] = phi.evaluate(t0, starts[members])
    gaps = np.where(np.isfinite(values), np.maximum(exit_times - values, 0.0), 0.0)
    return gaps, exit_times, never | ~np.isfinite(values)


def equilibrium_residual(bundles, scenario, workers=1, value_fields=None) -> EquilibriumResidual:
    """
    How far `bundles` are from a Lagrangian equilibrium.

    The speed field is rebuilt from the bundles themselves and every value
    function solved against it, unless `value_fields` already holds them.
    The result is the Q_i-weighted mean of the members' suboptimality.
    """
    if value_fields is None:
        field = build_speed_field(bundles, scenario.speed_model, scenario.grid)
        value_fields = solve_all(field, scenario, workers)
    values, flagged, means = [], [], []
    for bundle, phi in zip(bundles, value_fields):
        gaps, exit_times, never = member_suboptimality(bundle, phi)
        values.append(float(bundle.weights @ gaps))
        flagged.append(int(never.sum()))
        means.append(float(bundle.weights @ exit_times))
    return EquilibriumResidual(scenario.ids, values, flagged, means)
