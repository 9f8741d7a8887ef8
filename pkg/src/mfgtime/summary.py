import numpy as np

from mfgtime.diagnostics.measure_checks import decay_bound, distance_to_limit
from mfgtime.utils.chart_plotter import ChartPlotter
from mfgtime.utils.formatting import paragraph, section, table


class Summary:
    """
    Console report of a run: the scenario, the equilibrium search, the
    bundles it produced and the diagnostics verdict.
    """

    def __init__(self, run):
        self.run = run

    # ------------------------------------------
    #  Report Generation
    # ------------------------------------------

    def show_report(self):
        run = self.run
        scenario = run.scenario

        # ------------------------------------------
        print(section("Scenario"))
        scenario.populations.show_table()

        print(paragraph("Speed model"))
        print(f"{scenario.speed_model.type_name}, K in [{scenario.speed_model.k_min:g}, "
              f"{scenario.speed_model.k_max:g}]")

        print(paragraph("Grid"))
        grid = scenario.grid
        print(f"h = {grid.h.value:g}, dt = {grid.dt.value:g}, {grid.n_steps} steps to t = {grid.horizon:g}, "
              f"{grid.n_nodes} nodes")
        print(f"certified radius psi(R0) = {scenario.certified_radius():.4g}, box contains it: "
              f"{'yes' if scenario.box_is_certified() else 'no'}")

        # ------------------------------------------
        if run.state is not None:
            self.show_equilibrium()

        if run.bundles is not None:
            self.show_bundles()

        if run.report is not None:
            print(section("Diagnostics"))
            run.report.display()

    def show_equilibrium(self):
        state = self.run.state
        print(section("Equilibrium search"))
        rows = [["damping", state.mode],
                ["iterations", state.iterations],
                ["final residual", f"{state.last_residual:.3e}"],
                ["converged", "yes" if state.converged else "no"],
                ["iterates violating the support bound", sum(1 for v in state.support_violations if v)]]
        print(table(rows, headers=["", "value"]))
        if state.iterations > 1:
            ChartPlotter().plot(state.residuals, x_values=np.arange(1, state.iterations + 1),
                                title="Residual per iteration", labels=["residual"], log_scale=True)

    def show_bundles(self):
        run = self.run
        scenario = run.scenario
        model = scenario.speed_model
        print(section("Trajectory bundles"))
        rows = []
        for population_id, bundle in zip(scenario.ids, run.bundles):
            exits = bundle.exit_times[np.isfinite(bundle.exit_times)]
            mean_exit = float(bundle.weights[np.isfinite(bundle.exit_times)] @ exits) if exits.size else np.nan
            rows.append([population_id, len(bundle), int((~np.isfinite(bundle.exit_times)).sum()),
                         f"{mean_exit:.4f}"])
        print(table(rows, headers=["population", "members", "never exit", "mean exit time [s]"]))

        for i, bundle in enumerate(run.bundles):
            distances = distance_to_limit(bundle, scenario.p.value)
            if not np.any(distances > 0):
                continue
            bound = decay_bound(bundle, scenario.targets[i], model.k_min, model.k_max, scenario.p.value)
            ChartPlotter().plot([distances, np.minimum(bound, distances.max() * 2.0)], x_values=bundle.times,
                                title=f"Distance to the final distribution, population '{scenario.ids[i]}'",
                                labels=["distance", "bound"])
