"""Shared validation-report type used by every checker in the package."""

from __future__ import annotations

from dataclasses import dataclass, field

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class Violation:
    """A single broken law, tagged with a stable kind string."""

    kind: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.detail}"


@dataclass
class ValidationReport:
    """Accumulates violations; empty report means the checked laws all hold."""

    violations: list[Violation] = field(default_factory=list)

    def add(self, kind: str, detail: str) -> None:
        self.violations.append(Violation(kind, detail))

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)
