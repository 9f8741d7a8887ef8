import json
import os
import time

from mfgtime.core.errors import ArtifactMismatchError, ConfigError
from mfgtime.utils.formatting import paragraph, table
from mfgtime.utils.utils import dump_json, file_sha256, to_builtin

MANIFEST_NAME = "manifest.json"
ARTIFACT_VERSION = 1


class RunManifest:
    """
    What is needed to re-run a command and to check that stored artifacts
    are the ones it wrote: the scenario and its hash, the seed, the
    parameters after defaults, artifact hashes and wall times.
    """

    def __init__(self, command, scenario_path, scenario_sha256, seed, parameters, version=None):
        self.command = command
        self.scenario_path = str(scenario_path) if scenario_path is not None else None
        self.scenario_sha256 = scenario_sha256
        self.seed = int(seed)
        self.parameters = dict(parameters)
        self.version = version
        self.artifact_version = ARTIFACT_VERSION
        self.artifacts = {}
        self.results = {}
        self.timings = {}
        self._phase_start = {}

    @classmethod
    def for_scenario(cls, command, scenario, parameters=None):
        from mfgtime import __version__
        merged = {"scenario": scenario.as_dict()}
        merged.update(parameters or {})
        path = os.path.abspath(scenario.path) if scenario.path else None
        return cls(command, path, scenario.sha256, scenario.seed.value, merged, __version__)

    # Timing

    def start(self, phase):
        self._phase_start[phase] = time.perf_counter()

    def stop(self, phase):
        self.timings[phase] = time.perf_counter() - self._phase_start.pop(phase)

    def record_iteration_times(self, times):
        self.timings["iterations"] = list(times)

    # Artifacts

    def add_artifact(self, directory, name):
        self.artifacts[name] = file_sha256(os.path.join(directory, name))

    def verify(self, directory, scenario_path=None):
        """
        Recomputes the hashes of the scenario and of every listed artifact.

        Raises:
            ArtifactMismatchError: A file is missing or its content changed.
        """
        scenario_path = scenario_path or self.scenario_path
        if scenario_path is not None and self.scenario_sha256 is not None:
            if not os.path.exists(scenario_path):
                raise ArtifactMismatchError(f"Scenario file '{scenario_path}' named in the manifest is missing.")
            if file_sha256(scenario_path) != self.scenario_sha256:
                raise ArtifactMismatchError(f"Scenario file '{scenario_path}' does not match the manifest hash.")
        for name, digest in sorted(self.artifacts.items()):
            path = os.path.join(directory, name)
            if not os.path.exists(path):
                raise ArtifactMismatchError(f"Artifact '{name}' listed in the manifest is missing.")
            if file_sha256(path) != digest:
                raise ArtifactMismatchError(f"Artifact '{name}' does not match the manifest hash.")

    # I/O

    def as_dict(self):
        return to_builtin({
            "command": self.command,
            "scenario_path": self.scenario_path,
            "scenario_sha256": self.scenario_sha256,
            "seed": self.seed,
            "parameters": self.parameters,
            "version": self.version,
            "artifact_version": self.artifact_version,
            "artifacts": self.artifacts,
            "results": self.results,
            "timings": self.timings,
        })

    def save(self, directory) -> str:
        path = os.path.join(directory, MANIFEST_NAME)
        dump_json(self.as_dict(), path)
        return path

    @classmethod
    def load(cls, directory):
        path = os.path.join(directory, MANIFEST_NAME)
        if not os.path.exists(path):
            raise ConfigError(f"No {MANIFEST_NAME} in '{directory}'.")
        with open(path) as handle:
            data = json.load(handle)
        manifest = cls(data["command"], data.get("scenario_path"), data.get("scenario_sha256"),
                       data.get("seed", 0), data.get("parameters", {}), data.get("version"))
        manifest.artifact_version = data.get("artifact_version", ARTIFACT_VERSION)
        manifest.artifacts = dict(data.get("artifacts", {}))
        manifest.results = dict(data.get("results", {}))
        manifest.timings = dict(data.get("timings", {}))
        return manifest

    def show(self):
        print(paragraph(f"Run manifest for '{self.command}'"))
        rows = [[name, digest[:16]] for name, digest in sorted(self.artifacts.items())]
        print(table(rows, headers=["artifact", "sha256"]))

    def __repr__(self):
        return f"RunManifest('{self.command}', artifacts={len(self.artifacts)})"
