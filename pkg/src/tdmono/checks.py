from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class CheckFailure:
    code: str
    location: str
    message: str
    data: Any = None

    def to_json(self) -> dict:
        out = {"code": self.code, "location": self.location, "message": self.message}
        if self.data is not None:
            out["data"] = self.data
        return out

    def __str__(self) -> str:
        return f"[{self.code}] {self.location}: {self.message}"


@dataclass
class CheckReport:
    """Outcome of one validator: a list of failures plus optional certificates."""

    name: str
    failures: list[CheckFailure] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, code: str, location: str, message: str, data: Any = None) -> None:
        self.failures.append(CheckFailure(code, location, message, data))

    def codes(self) -> set[str]:
        return {f.code for f in self.failures}

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "failures": [f.to_json() for f in self.failures],
            "details": self.details,
        }

    def summary(self) -> str:
        head = f"{self.name}: {'PASS' if self.passed else 'FAIL'}"
        return "\n".join([head] + [f"  {f}" for f in self.failures])


def merge(name: str, reports: list[CheckReport]) -> CheckReport:
    out = CheckReport(name)
    for r in reports:
        out.failures.extend(r.failures)
        if r.details:
            out.details[r.name] = r.details
    return out
