"""Check reports shared by all verifiers."""

from __future__ import annotations

from dataclasses import dataclass, field

from .exactfield import format_scalar


def _plain(w):
    """Convert a witness into JSON-friendly data."""
    if w is None or isinstance(w, (str, bool, int)):
        return w
    if isinstance(w, dict):
        return {str(k): _plain(v) for k, v in w.items()}
    if isinstance(w, (list, tuple)):
        return [_plain(v) for v in w]
    if hasattr(w, "tolist"):
        return _plain(w.tolist())
    try:
        return format_scalar(w)
    except (TypeError, ValueError):
        return repr(w)


@dataclass(frozen=True)
class Check:
    label: str
    passed: bool
    witness: object = None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {"label": self.label, "status": self.status, "witness": _plain(self.witness)}


@dataclass(frozen=True)
class Report:
    method: str
    checks: tuple = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def check(self, label: str) -> Check:
        for c in self.checks:
            if c.label == label:
                return c
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "method": self.method,
            "checks": [c.to_dict() for c in self.checks],
        }

    def __bool__(self) -> bool:
        return self.passed


class ReportBuilder:
    """Accumulate checks, then freeze them into a Report."""

    def __init__(self, method: str):
        self.method = method
        self.checks: list[Check] = []

    def add(self, label: str, passed: bool, witness=None) -> bool:
        self.checks.append(Check(label, bool(passed), witness))
        return bool(passed)

    def extend(self, report: Report, prefix: str = "") -> bool:
        for c in report.checks:
            self.checks.append(Check(prefix + c.label, c.passed, c.witness))
        return report.passed

    def build(self) -> Report:
        return Report(self.method, tuple(self.checks))
