import json

import pytest

from mfgtime.diagnostics.report import FAIL, INFO, PASS, REQUIRED_CHECKS, CheckResult, DiagnosticsReport
from mfgtime.diagnostics.runner import merge_results


def _all_passing():
    return [CheckResult(name, PASS, {"value": 0.0}, 1.0, "holds") for name in REQUIRED_CHECKS]


def test_complete_passing_report_passes():
    report = DiagnosticsReport(_all_passing())
    assert report.passed
    assert report.failed == []
    assert report.missing == []


def test_missing_required_check_fails_the_report():
    report = DiagnosticsReport(_all_passing()[1:])
    assert not report.passed
    assert report.failed == [REQUIRED_CHECKS[0]]


def test_info_entries_never_fail():
    report = DiagnosticsReport(_all_passing() + [CheckResult("lipschitz", INFO, {"spatial": 1.0}, None, "info")])
    assert report.passed
    assert report["lipschitz"].passed is None


def test_failing_entry_is_listed():
    results = _all_passing()
    results[2] = CheckResult(results[2].name, FAIL, {"value": 3.0}, 1.0, "broken")
    report = DiagnosticsReport(results)
    assert report.failed == [results[2].name]


def test_json_is_deterministic(tmp_path):
    report = DiagnosticsReport(_all_passing(), metadata={"seed": 3})
    path = tmp_path / "report.json"
    text = report.to_json(path)
    assert text == DiagnosticsReport(_all_passing(), metadata={"seed": 3}).to_json()
    data = json.loads(path.read_text())
    assert data["passed"] is True
    assert data["metadata"]["seed"] == 3
    assert set(data["checks"]) == set(REQUIRED_CHECKS)


def test_unknown_status_is_rejected():
    with pytest.raises(ValueError, match="Unknown check status"):
        CheckResult("dpp", "maybe", {}, None, "")


def test_merge_takes_the_worst_population():
    first = CheckResult("u_equals_w", PASS, {"agreement_fraction": 0.99, "max_gap_deg": 3.0}, 10.0, "s")
    second = CheckResult("u_equals_w", FAIL, {"agreement_fraction": 0.80, "max_gap_deg": 12.0}, 10.0, "s")
    merged = merge_results("u_equals_w", [first, second], ["a", "b"])
    assert merged.status == FAIL
    assert merged.measured == {"agreement_fraction": 0.80, "max_gap_deg": 12.0}
    assert merged.details["populations"]["a"]["status"] == PASS


def test_merge_of_info_entries_stays_info():
    results = [CheckResult("lipschitz", INFO, {"spatial": s}, {"spatial": 3.0 - s, "temporal": 4.0}, "s")
               for s in (1.0, 2.0)]
    merged = merge_results("lipschitz", results, ["a", "b"])
    assert merged.status == INFO
    assert merged.measured["spatial"] == 2.0
    assert merged.tolerance == {"spatial": 1.0, "temporal": 4.0}
    assert "spatial=1" in DiagnosticsReport([merged]).summary_rows()[0]["tolerance"]
