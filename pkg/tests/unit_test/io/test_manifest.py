import pytest

from mfgtime.core.errors import ArtifactMismatchError, ConfigError
from mfgtime.io.manifest import MANIFEST_NAME, RunManifest
from mfgtime.utils.utils import file_sha256


def _manifest(tmp_path):
    scenario = tmp_path / "scenario.json"
    scenario.write_text('{"populations": []}')
    (tmp_path / "bundles.csv").write_text("population,trajectory\n")
    manifest = RunManifest("equilibrium", scenario, file_sha256(scenario), 3, {"tol": 1e-3})
    manifest.add_artifact(tmp_path, "bundles.csv")
    return manifest, scenario


def test_manifest_round_trip(tmp_path):
    manifest, scenario = _manifest(tmp_path)
    manifest.results = {"converged": True, "support_violations": [0, 0]}
    manifest.start("equilibrium")
    manifest.stop("equilibrium")
    path = manifest.save(tmp_path)
    assert path.endswith(MANIFEST_NAME)

    loaded = RunManifest.load(tmp_path)
    assert loaded.command == "equilibrium"
    assert loaded.seed == 3
    assert loaded.parameters == {"tol": 1e-3}
    assert loaded.artifacts == manifest.artifacts
    assert loaded.results["support_violations"] == [0, 0]
    assert "equilibrium" in loaded.timings
    loaded.verify(tmp_path)


def test_changed_artifact_is_detected(tmp_path):
    manifest, _ = _manifest(tmp_path)
    (tmp_path / "bundles.csv").write_text("population,trajectory\nx,0\n")
    with pytest.raises(ArtifactMismatchError, match="bundles.csv"):
        manifest.verify(tmp_path)


def test_missing_artifact_is_detected(tmp_path):
    manifest, _ = _manifest(tmp_path)
    (tmp_path / "bundles.csv").unlink()
    with pytest.raises(ArtifactMismatchError, match="missing"):
        manifest.verify(tmp_path)


def test_changed_scenario_is_detected(tmp_path):
    manifest, scenario = _manifest(tmp_path)
    scenario.write_text('{"populations": [1]}')
    with pytest.raises(ArtifactMismatchError, match="does not match"):
        manifest.verify(tmp_path)


def test_missing_manifest_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError, match=MANIFEST_NAME):
        RunManifest.load(tmp_path)
