import datetime
import os

import numpy as np

from mfgtime.congestion.speed_field import build_speed_field
from mfgtime.core.constants import DEFAULT_DAMPING_MODE, DEFAULT_MAX_ITERS, DEFAULT_SIGMA_FACTOR, DEFAULT_TOL
from mfgtime.core.errors import ArtifactMismatchError
from mfgtime.diagnostics.runner import run_diagnostics
from mfgtime.equilibrium.iteration import fixed_point_iterate, initial_bundle, solve_all
from mfgtime.io.exports import (density_frame, measure_flow_frame, read_bundles_csv, write_bundles_csv, write_csv,
                                write_iteration_log, write_plan_csv, write_trajectories_csv, write_value_field_binary,
                                write_value_field_csv)
from mfgtime.io.manifest import RunManifest
from mfgtime.model.scenario import Scenario
from mfgtime.model.trajectories import TrajectoryBundle
from mfgtime.ocp.tracing import trace_many
from mfgtime.transport.pushforward import final_measure, measure_at_node
from mfgtime.transport.wasserstein import wasserstein
from mfgtime.summary import Summary
from mfgtime.utils.formatting import paragraph, warning
from mfgtime.utils.utils import ensure_dir

BUNDLES_FILE = "bundles.csv"
ITERATION_LOG_FILE = "iteration_log.csv"
MEASURE_FLOW_FILE = "measure_flow.csv"
DENSITY_FILE = "densities.csv"
PLAN_FILE = "plan_{}.csv"
# Time nodes of the density dump, spread evenly over the horizon.
DENSITY_SNAPSHOTS = 11
REPORT_FILE = "report.json"


class RunInfo:
    """Where a run writes and when it started."""

    def __init__(self, command, out_dir):
        self._command = command
        self._out_dir = ensure_dir(out_dir)
        self._created = datetime.datetime.now()

    @property
    def command(self):
        return self._command

    @property
    def out_dir(self):
        return self._out_dir

    @property
    def created(self):
        return self._created

    def path(self, name):
        return os.path.join(self._out_dir, name)


class Run:
    """
    One command over one scenario: solve for a fixed crowd, search for an
    equilibrium, or verify stored artifacts. Artifacts go to `out_dir`
    together with a RunManifest.
    """

    def __init__(self, scenario: Scenario, out_dir, command="solve", workers=1, verbose=True):
        self.scenario = scenario
        self.info = RunInfo(command, out_dir)
        self.workers = workers
        self.verbose = verbose
        self.manifest = None
        self.bundles = None
        self.value_fields = None
        self.field = None
        self.state = None
        self.converged = None
        self.report = None
        self.summary = Summary(self)

    @property
    def out_dir(self):
        return self.info.out_dir

    def _new_manifest(self, parameters=None):
        self.manifest = RunManifest.for_scenario(self.info.command, self.scenario, parameters)
        return self.manifest

    def _save(self, writer, name, *args):
        writer(*args, self.info.path(name))
        self.manifest.add_artifact(self.out_dir, name)
        if self.verbose:
            print(f"✅ {name}")

    def _finish(self):
        path = self.manifest.save(self.out_dir)
        if self.verbose:
            print(f"✅ {os.path.basename(path)}")

    def _check_cfl(self):
        self.scenario.grid.check_cfl(self.scenario.speed_model.k_max)

    def _density_sigma(self):
        sigma = getattr(self.scenario.speed_model, "sigma", None)
        if sigma is None:
            return DEFAULT_SIGMA_FACTOR * self.scenario.grid.h.value
        return sigma.value

    # ------------------------------------------
    #  Commands
    # ------------------------------------------

    def solve(self, bundle_path=None):
        """
        Value functions and optimal paths of every population against a fixed
        crowd: the stationary initial bundles, or the bundles stored in
        `bundle_path`.
        """
        scenario = self.scenario
        self._check_cfl()
        self._new_manifest({"bundle": os.path.abspath(bundle_path) if bundle_path else None,
                            "workers": self.workers})
        if bundle_path is None:
            bundles = initial_bundle(scenario.m0, scenario.grid, scenario.targets)
        else:
            _, bundles = read_bundles_csv(bundle_path, scenario.grid.dt.value)

        self.manifest.start("solve")
        self.field = build_speed_field(bundles, scenario.speed_model, scenario.grid)
        self.value_fields = solve_all(self.field, scenario, self.workers, self.verbose)
        self.manifest.stop("solve")

        self.manifest.start("trace")
        options = scenario.solver.tracing_options()
        traced = []
        for i, phi in enumerate(self.value_fields):
            m0 = scenario.m0[i]
            paths, exit_times = trace_many(phi, self.field, scenario.targets[i], 0.0, m0.points, **options)
            never = int((~np.isfinite(exit_times)).sum())
            if never and self.verbose:
                print(warning(f"Population '{scenario.ids[i]}': {never} atoms did not reach the target."))
            traced.append(TrajectoryBundle.from_arrays(paths, m0.weights, scenario.grid.dt.value,
                                                       exit_times=exit_times))
        self.bundles = traced
        self.manifest.stop("trace")

        if self.verbose:
            print(paragraph("Saving solve artifacts to"))
            print(self.out_dir)
        for population_id, phi, bundle in zip(scenario.ids, self.value_fields, traced):
            self._save(write_value_field_csv, f"value_{population_id}.csv", phi)
            self._save(write_value_field_binary, f"value_{population_id}.bin", phi)
            self._save(write_trajectories_csv, f"trajectories_{population_id}.csv", bundle)
        self._finish()
        return self.value_fields

    def equilibrium(self, max_iters=DEFAULT_MAX_ITERS, tol=DEFAULT_TOL, mode=DEFAULT_DAMPING_MODE):
        """
        Runs the damped best-response iteration and stores the iteration log,
        the final bundles, their measure flows, kernel densities at a few
        time nodes and the W_1 plan from each initial to its final measure.

        Returns:
            bool: Whether the residual reached `tol` within `max_iters`.
        """
        self._check_cfl()
        self._new_manifest({"max_iters": max_iters, "tol": tol, "mode": mode, "workers": self.workers})
        self.manifest.start("equilibrium")
        self.state, self.converged = fixed_point_iterate(self.scenario, max_iters, tol, mode,
                                                         self.workers, self.verbose)
        self.manifest.stop("equilibrium")
        self.manifest.record_iteration_times(self.state.iteration_times)
        self.bundles = self.state.bundles
        self.value_fields = self.state.value_fields
        self.field = self.state.speed_field
        self.manifest.results = {"converged": self.converged,
                                 "iterations": self.state.iterations,
                                 "final_residual": self.state.last_residual,
                                 "support_violations": self.state.support_violations,
                                 "bundle_sizes": self.state.bundle_sizes[-1]}

        if self.verbose:
            print(paragraph("Saving equilibrium artifacts to"))
            print(self.out_dir)
        self._save(write_iteration_log, ITERATION_LOG_FILE, self.state)
        self._save(write_bundles_csv, BUNDLES_FILE, self.bundles, self.scenario.ids)
        self._save(write_csv, MEASURE_FLOW_FILE,
                   measure_flow_frame(self.bundles, self.scenario.ids))
        self._save(write_csv, DENSITY_FILE,
                   density_frame(self.bundles, self.scenario.ids, self.scenario.grid, self._density_sigma(),
                                 density_nodes(self.scenario.grid.n_steps + 1)))
        for bundle, population in zip(self.bundles, self.scenario.ids):
            start, end = measure_at_node(bundle, 0), final_measure(bundle)
            _, plan = wasserstein(start, end, 1)
            self._save(lambda plan, mu, nu, path: write_plan_csv(plan, path, mu, nu),
                       PLAN_FILE.format(population), plan, start, end)
        self._finish()
        return self.converged

    def verify(self, artifacts_dir):
        """
        Checks the stored artifacts against their manifest, rebuilds the
        bundles and runs every diagnostic. The report goes to `out_dir`.

        Raises:
            ArtifactMismatchError: The scenario or an artifact changed.
        """
        stored = RunManifest.load(artifacts_dir)
        stored.verify(artifacts_dir, self.scenario.path)
        if self.scenario.sha256 is not None and stored.scenario_sha256 not in (None, self.scenario.sha256):
            raise ArtifactMismatchError("The scenario differs from the one the artifacts were produced with.")
        ids, bundles = read_bundles_csv(os.path.join(artifacts_dir, BUNDLES_FILE), self.scenario.grid.dt.value)
        if list(ids) != list(self.scenario.ids):
            raise ArtifactMismatchError(f"Stored populations {ids} do not match the scenario {self.scenario.ids}.")
        self.bundles = bundles
        self._check_cfl()

        self._new_manifest({"artifacts": os.path.abspath(artifacts_dir), "workers": self.workers})
        self.manifest.start("diagnostics")
        history = stored.results.get("support_violations")
        self.report = run_diagnostics(bundles, self.scenario, workers=self.workers, history=history,
                                      metadata={"artifacts": stored.artifacts, "seed": self.scenario.seed.value})
        self.manifest.stop("diagnostics")
        self.manifest.results = {"passed": self.report.passed, "failed": self.report.failed}
        if self.verbose:
            self.report.display()
            print(paragraph("Saving diagnostics report to"))
            print(self.out_dir)
        self._save(lambda report, path: report.to_json(path), REPORT_FILE, self.report)
        self._finish()
        return self.report


def density_nodes(n_nodes, count=DENSITY_SNAPSHOTS):
    """Evenly spread node indices, first and last included."""
    return np.unique(np.linspace(0, n_nodes - 1, min(count, n_nodes)).round().astype(int))
