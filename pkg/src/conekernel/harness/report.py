"""Verification reports: one record per check plus an environment stamp."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

RUNTIME_FIELDS = ("runtime",)


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: object
    threshold: object
    runtime: float = 0.0
    detail: str = ""

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["status"] = self.status
        del d["passed"]
        d["measured"] = _jsonable(self.measured)
        d["threshold"] = _jsonable(self.threshold)
        return d


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "tolist"):
        return _jsonable(v.tolist())
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


@dataclass
class VerificationReport:
    """Ordered check records, free-form diagnostics and an environment stamp.

    ``passed`` is the conjunction of all checks; a report without checks
    does not pass.
    """

    experiment: str
    environment: dict
    checks: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    artifacts: list = field(default_factory=list)

    def add(self, name: str, passed: bool, measured, threshold, runtime: float = 0.0,
            detail: str = "") -> CheckResult:
        if any(c.name == name for c in self.checks):
            raise ValueError(f"duplicate check {name!r}")
        c = CheckResult(name, bool(passed), measured, threshold, float(runtime), detail)
        self.checks.append(c)
        return c

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def to_dict(self, with_runtime: bool = True) -> dict:
        checks = [c.to_dict() for c in self.checks]
        if not with_runtime:
            for c in checks:
                for k in RUNTIME_FIELDS:
                    c.pop(k, None)
        return {
            "experiment": self.experiment,
            "status": "pass" if self.passed else "fail",
            "environment": dict(self.environment),
            "checks": checks,
            "diagnostics": _jsonable(self.diagnostics),
            "artifacts": list(self.artifacts),
        }

    def content(self) -> str:
        """Canonical JSON without runtime fields, for determinism comparisons."""
        return json.dumps(self.to_dict(with_runtime=False), sort_keys=True)

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    def summary_lines(self) -> list[str]:
        lines = []
        for c in self.checks:
            lines.append(f"[{c.status.upper()}] {self.experiment}:{c.name} measured={_short(c.measured)} "
                         f"threshold={_short(c.threshold)} ({c.runtime:.1f}s)")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return lines


def _short(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)) and len(v) > 4:
        return "[" + ", ".join(_short(x) for x in v[:4]) + ", ...]"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


def load_report(path) -> dict:
    return json.loads(Path(path).read_text())

