"""Shared report containers for the consistency checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional


@dataclass
class ConditionResult:
    name: str
    max_residual: float
    worst_point: Optional[dict]
    passed: bool
    note: str = ""

    def __repr__(self):
        flag = "pass" if self.passed else "FAIL"
        return f"<{self.name}: {flag} max={self.max_residual:.3e}>"


@dataclass
class ConsistencyReport:
    conditions: list[ConditionResult] = field(default_factory=list)
    seed: int = 42
    tolerance: float = 1e-9
    vacuous: bool = False
    note: str = ""
    extra: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    @property
    def max_residual(self) -> float:
        return max((c.max_residual for c in self.conditions), default=0.0)

    @property
    def worst(self) -> Optional[ConditionResult]:
        return max(self.conditions, key=lambda c: c.max_residual, default=None)

    def failures(self) -> list[ConditionResult]:
        return [c for c in self.conditions if not c.passed]

    def add(self, name, max_residual, worst_point, note="") -> ConditionResult:
        cond = ConditionResult(
            name=name,
            max_residual=float(max_residual),
            worst_point=worst_point,
            passed=float(max_residual) <= self.tolerance,
            note=note,
        )
        self.conditions.append(cond)
        return cond

    def summary(self) -> str:
        flag = "VACUOUS" if self.vacuous else ("PASS" if self.passed else "FAIL")
        return (
            f"{flag}: {len(self.conditions)} conditions, "
            f"max residual {self.max_residual:.3e} (seed {self.seed})"
        )
