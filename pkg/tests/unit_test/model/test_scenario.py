import json

import pytest
from numpy.testing import assert_allclose

from mfgtime.core.errors import ConfigError
from mfgtime.model.scenario import Scenario


def _single_population():
    return {
        "populations": [{"target": [{"type": "ball", "center": [0.0, 0.0], "radius": 0.25}],
                         "m0": {"sampler": "explicit", "atoms": [[0.8, 0.0, 1.0]]}}],
        "speed_model": {"type": "exponential", "k_min": 0.5, "k_max": 1.0, "a_self": 0.0, "a_cross": 0.0},
        "grid": {"box": [[-2.0, 2.0], [-2.0, 2.0]], "h": 0.1, "dt": 0.1},
    }


def test_defaults_are_filled_in_and_reported():
    scenario = Scenario.from_dict(_single_population())
    assert scenario.ids == ["pop1"]
    assert scenario.seed.value == 0
    assert_allclose(scenario.speed_model.sigma.value, 0.2)
    assert "grid.t_max" in scenario.defaults_applied
    assert "solver.directions" in scenario.defaults_applied
    assert_allclose(scenario.solver.probe.value, 0.1)


def test_default_horizon_covers_the_exit_bound():
    scenario = Scenario.from_dict(_single_population())
    radius = scenario.initial_support_radius()
    _, confinement = scenario.bounds(0, radius)
    exit_bound, _ = scenario.bounds(0, confinement)
    assert scenario.grid.horizon >= 1.5 * exit_bound - 1e-9


def test_certified_radius_and_box_report():
    scenario = Scenario.from_dict(_single_population())
    assert_allclose(scenario.initial_support_radius(), 0.8)
    # T(0.8) = 0.8 / 0.5, psi = 0.8 + 1.0 * 1.6
    assert_allclose(scenario.certified_radius(), 2.4)
    assert not scenario.box_is_certified()


def test_missing_sections_raise_config_error():
    data = _single_population()
    del data["grid"]
    with pytest.raises(ConfigError, match="missing the 'grid' section"):
        Scenario.from_dict(data)


def test_non_numeric_grid_steps_raise_config_error():
    for key, value in (("h", "fine"), ("dt", None), ("dt", True)):
        data = _single_population()
        data["grid"][key] = value
        with pytest.raises(ConfigError, match=f"Grid '{key}' must be a number"):
            Scenario.from_dict(data)


def test_dimension_mismatch_is_a_config_error():
    data = _single_population()
    data["grid"]["box"] = [[-2.0, 2.0]]
    with pytest.raises(ConfigError, match="Inconsistent dimensions"):
        Scenario.from_dict(data)


def test_from_json_hashes_the_file_and_applies_overrides(tmp_path):
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(_single_population()))
    scenario = Scenario.from_json(path, seed=5, solver_overrides={"directions": 16})
    assert scenario.seed.value == 5
    assert scenario.solver.directions.value == 16
    assert len(scenario.sha256) == 64
    assert scenario.as_dict()["solver"]["directions"] == 16


def test_unreadable_scenario_file(tmp_path):
    with pytest.raises(ConfigError, match="Cannot read scenario file"):
        Scenario.from_json(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        Scenario.from_json(broken)
