import json

from mfgtime.core.collection import Collection
from mfgtime.utils.formatting import paragraph, status_icon, table
from mfgtime.utils.utils import dump_json, to_builtin

PASS = "pass"
FAIL = "fail"
INFO = "info"

# Entries every report must carry; a missing one fails the report.
REQUIRED_CHECKS = [
    "dpp",
    "hj_residual",
    "time_monotonicity",
    "u_equals_w",
    "normalized_gradient",
    "asymptotics",
    "support_bound",
    "mfg_system",
    "equilibrium_residual",
    "value_bound",
    "trajectory_admissibility",
    "optimality_converse",
]


class CheckResult:
    """
    Outcome of one numerical check.

    Args:
        name: Report key.
        status: PASS, FAIL or INFO.
        measured: Dict of measured values.
        tolerance: The tolerance the status was decided with.
        statement: The verified property in plain words.
        details: Optional extra counts or per-item values.
    """

    def __init__(self, name, status, measured, tolerance, statement, details=None):
        if status not in (PASS, FAIL, INFO):
            raise ValueError(f"Unknown check status: '{status}'.")
        self.name = name
        self.status = status
        self.measured = dict(measured)
        self.tolerance = tolerance
        self.statement = statement
        self.details = dict(details or {})

    @classmethod
    def decide(cls, name, passed, measured, tolerance, statement, details=None):
        return cls(name, PASS if passed else FAIL, measured, tolerance, statement, details)

    @property
    def passed(self):
        """True, False, or None for info entries."""
        if self.status == INFO:
            return None
        return self.status == PASS

    def as_dict(self):
        return to_builtin({
            "status": self.status,
            "measured": self.measured,
            "tolerance": self.tolerance,
            "statement": self.statement,
            "details": self.details,
        })

    def __repr__(self):
        return f"CheckResult('{self.name}', {self.status})"


def _short(value):
    if isinstance(value, dict):
        return ", ".join(f"{key}={_short(item)}" for key, item in value.items())
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


class DiagnosticsReport(Collection):
    """
    Ordered set of check results. The report fails when any entry fails
    or when a required entry is missing.
    """

    def __init__(self, results=None, metadata=None):
        super().__init__()
        self.metadata = dict(metadata or {})
        for result in results or []:
            self.add(result)

    def add(self, result: CheckResult):
        self._add_item(result.name, result)

    @property
    def missing(self):
        return [name for name in REQUIRED_CHECKS if name not in self._items]

    @property
    def failed(self):
        return [result.name for result in self if result.status == FAIL] + self.missing

    @property
    def passed(self) -> bool:
        return not self.failed

    def summary_rows(self):
        rows = []
        for result in self:
            measured = ", ".join(f"{key}={_short(value)}" for key, value in result.measured.items())
            rows.append({"": status_icon(result.passed),
                         "check": result.name,
                         "measured": measured,
                         "tolerance": _short(result.tolerance)})
        for name in self.missing:
            rows.append({"": status_icon(False), "check": name, "measured": "missing", "tolerance": ""})
        return rows

    def as_dict(self):
        return {
            "passed": self.passed,
            "failed": self.failed,
            "checks": {result.name: result.as_dict() for result in self},
            "metadata": to_builtin(self.metadata),
        }

    def to_json(self, path=None) -> str:
        """Deterministic JSON text of the report, also written to `path` when given."""
        if path is not None:
            dump_json(self.as_dict(), path)
        return json.dumps(to_builtin(self.as_dict()), indent=2, sort_keys=True)

    def display(self):
        rows = self.summary_rows()
        print(paragraph("Diagnostics report"))
        print(table([list(row.values()) for row in rows], headers=["", "check", "measured", "tolerance"]))
        for result in self:
            if result.status == FAIL:
                print(f"❌ {result.name}: {result.statement}")
        verdict = "✅ All required checks passed." if self.passed else f"❌ Failed: {', '.join(self.failed)}"
        print(verdict)
