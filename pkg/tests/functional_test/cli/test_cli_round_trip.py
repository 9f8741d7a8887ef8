import json

import numpy as np
import pandas as pd

from mfgtime.cli import EXIT_ARTIFACT_MISMATCH, EXIT_CHECK_FAILED, EXIT_NOT_CONVERGED, EXIT_OK, main


def _scenario(path):
    data = {
        "seed": 4,
        "populations": [
            {"id": "east", "target": [{"type": "ball", "center": [-0.6, 0.0], "radius": 0.15}],
             "m0": {"sampler": "uniform", "lo": [0.4, -0.2], "hi": [0.7, 0.2], "count": 12}},
            {"id": "west", "target": [{"type": "ball", "center": [0.6, 0.0], "radius": 0.15}],
             "m0": {"sampler": "uniform", "lo": [-0.7, -0.2], "hi": [-0.4, 0.2], "count": 12}},
        ],
        "speed_model": {"type": "exponential", "k_min": 0.5, "k_max": 1.0, "a_self": 0.0, "a_cross": 0.0},
        "grid": {"box": [[-1.0, 1.0], [-0.5, 0.5]], "h": 0.05, "dt": 0.05},
        "solver": {"directions": 32},
    }
    path.write_text(json.dumps(data))
    return str(path)


def _equilibrium(scenario, out):
    return main(["equilibrium", "--scenario", scenario, "--out", str(out), "--max-iters", "5",
                 "--tol", "1e-9", "--workers", "2", "--quiet"])


def _verify(scenario, artifacts, out):
    return main(["verify", "--scenario", scenario, "--out", str(out), "--artifacts", str(artifacts),
                 "--workers", "2", "--quiet"])


def test_equilibrium_then_verify(tmp_path) -> None:
    scenario = _scenario(tmp_path / "scenario.json")
    assert _equilibrium(scenario, tmp_path / "run") == EXIT_OK
    assert _verify(scenario, tmp_path / "run", tmp_path / "check") == EXIT_OK
    with open(tmp_path / "check" / "report.json") as handle:
        report = json.load(handle)
    assert report["passed"]
    assert all(entry["tolerance"] is not None for entry in report["checks"].values())
    assert report["checks"]["ratio_sensitivity"]["tolerance"] == {"angle_deg": 10.0}

    densities = pd.read_csv(tmp_path / "run" / "densities.csv", dtype={"population": str})
    assert list(densities.columns) == ["population", "t", "x1", "x2", "density"]
    assert set(densities["population"]) == {"east", "west"}
    assert densities["t"].iloc[0] == 0.0
    assert (densities["density"] >= 0.0).all()
    for population in ("east", "west"):
        plan = pd.read_csv(tmp_path / "run" / f"plan_{population}.csv")
        assert list(plan.columns[:3]) == ["source", "target", "mass"]
        np.testing.assert_allclose(plan["mass"].sum(), 1.0)
        assert (plan["target_x1"] * (1.0 if population == "west" else -1.0) > 0.3).all()


def test_repeated_runs_are_byte_identical(tmp_path) -> None:
    scenario = _scenario(tmp_path / "scenario.json")
    for name in ("first", "second"):
        assert _equilibrium(scenario, tmp_path / name) == EXIT_OK
        _verify(scenario, tmp_path / name, tmp_path / f"{name}_check")
    for artifact in ("iteration_log.csv", "bundles.csv", "measure_flow.csv", "densities.csv", "plan_east.csv"):
        assert (tmp_path / "first" / artifact).read_bytes() == (tmp_path / "second" / artifact).read_bytes()
    assert (tmp_path / "first_check" / "report.json").read_bytes() == \
        (tmp_path / "second_check" / "report.json").read_bytes()


def test_tampered_artifacts_are_refused(tmp_path) -> None:
    scenario = _scenario(tmp_path / "scenario.json")
    assert _equilibrium(scenario, tmp_path / "run") == EXIT_OK
    bundles = tmp_path / "run" / "bundles.csv"
    bundles.write_text(bundles.read_text().replace("east", "eats", 1))
    assert _verify(scenario, tmp_path / "run", tmp_path / "check") == EXIT_ARTIFACT_MISMATCH



def _blocked_scenario(path):
    # the gate population stands in the way of the walkers only until it leaves
    data = {
        "seed": 2,
        "populations": [
            {"id": "walkers", "target": [{"type": "ball", "center": [-0.3, 0.0], "radius": 0.15}],
             "m0": {"sampler": "uniform", "lo": [0.8, -0.1], "hi": [0.95, 0.1], "count": 8}},
            {"id": "gate", "target": [{"type": "ball", "center": [-0.85, 0.0], "radius": 0.15}],
             "m0": {"sampler": "uniform", "lo": [-0.05, -0.5], "hi": [0.05, 0.5], "count": 12}},
        ],
        "speed_model": {"type": "exponential", "k_min": 0.2, "k_max": 1.0, "sigma": 0.1,
                        "a_self": 0.0, "a_cross": 3.0},
        "grid": {"box": [[-1.0, 1.0], [-0.5, 0.5]], "h": 0.05, "dt": 0.05, "t_max": 4.0},
        "solver": {"directions": 32},
    }
    path.write_text(json.dumps(data))
    return str(path)


def test_unconverged_run_fails_verification(tmp_path) -> None:
    scenario = _blocked_scenario(tmp_path / "scenario.json")
    code = main(["equilibrium", "--scenario", scenario, "--out", str(tmp_path / "run"), "--max-iters", "0",
                 "--quiet"])
    assert code == EXIT_NOT_CONVERGED
    assert _verify(scenario, tmp_path / "run", tmp_path / "check") == EXIT_CHECK_FAILED
    with open(tmp_path / "check" / "report.json") as handle:
        report = json.load(handle)
    assert not report["passed"]
    residual = report["checks"]["equilibrium_residual"]
    assert residual["status"] == "fail"
    assert residual["measured"]["residual"] > residual["tolerance"]


if __name__ == '__main__':
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as directory:
        test_equilibrium_then_verify(Path(directory))
    with tempfile.TemporaryDirectory() as directory:
        test_unconverged_run_fails_verification(Path(directory))
