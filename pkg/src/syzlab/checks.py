"""Named pass/fail records and the report that collects them."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Check:
    name: str
    passed: bool
    expected: str = ""
    computed: str = ""
    reference: str = ""
    informational: bool = False  # recorded but never fails a report

    @property
    def status(self) -> str:
        if self.informational:
            return "info"
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        out = {"name": self.name, "status": self.status, "expected": self.expected, "computed": self.computed}
        if self.reference:
            out["reference"] = self.reference
        return out


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, name, passed, expected="", computed="", reference="", informational=False) -> Check:
        chk = Check(name, bool(passed), str(expected), str(computed), reference, informational)
        self.checks.append(chk)
        return chk

    def extend(self, other: "Report", prefix: str = "") -> None:
        for chk in other.checks:
            self.checks.append(Check(prefix + chk.name, chk.passed, chk.expected, chk.computed,
                                     chk.reference, chk.informational))
        if other.data:
            self.data[other.title] = other.data

    @property
    def failures(self) -> list:
        return [c for c in self.checks if not c.informational and not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "n_checks": sum(not c.informational for c in self.checks),
            "n_failed": len(self.failures),
            "checks": [c.to_json() for c in self.checks],
            "data": self.data,
        }

    def summary(self) -> str:
        counted = [c for c in self.checks if not c.informational]
        lines = [f"{self.title}: {'PASS' if self.passed else 'FAIL'} "
                 f"({len(counted) - len(self.failures)}/{len(counted)} checks passed)"]
        for c in self.failures:
            lines.append(f"  [fail] {c.name}: expected {c.expected}, computed {c.computed}")
        return "\n".join(lines)
