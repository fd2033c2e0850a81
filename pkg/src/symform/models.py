"""Result and report models shared across checks, probes and the CLI."""

from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any


class Verdict(StrEnum):
    PASS = "pass"
    FAIL = "fail"
    NOT_RUN = "not-run"


@dataclass
class FormPropertyReport:
    """Outcome of a sampling check of symmetric-form properties."""

    form: str
    n: int
    trials: int
    seed: int
    axioms_pass: bool | None = None
    hoelder_verdict: Verdict = Verdict.NOT_RUN
    concave_verdict: Verdict = Verdict.NOT_RUN
    witness: dict[str, Any] | None = None

    @property
    def passed(self) -> bool:
        return self.witness is None


@dataclass
class IneqResult:
    """One evaluated inequality lhs <= rhs."""

    name: str
    lhs: float
    rhs: float
    tol: float
    inputs_digest: str = ""
    details: dict[str, Any] = field(default_factory=dict)
    # side conditions beyond lhs <= rhs, e.g. monotone convergence
    conditions_met: bool = True

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.slack >= -self.tol and self.conditions_met


@dataclass
class ViolationRecord:
    """A trial whose gap exceeded tolerance, with what is needed to regenerate it."""

    trial: int
    trial_seed: int
    kind: str
    lhs: float
    rhs: float
    gap: float
    tau: float | None = None
    step: float | None = None
    params: dict[str, Any] = field(default_factory=dict)
    inputs_digest: str = ""
    confirmed: bool = False


@dataclass
class ProbeReport:
    """Aggregate of a seeded multi-trial run; violations sorted by trial index."""

    tool_version: str
    command: str
    seed: int
    trials_attempted: int = 0
    trials_completed: int = 0
    trials_skipped: int = 0
    violations: list[ViolationRecord] = field(default_factory=list)
    min_slack: float | None = None
    max_gap: float | None = None
    details: dict[str, Any] = field(default_factory=dict)
    wall_time_ms: float = 0.0

    @property
    def confirmed_violations(self) -> list[ViolationRecord]:
        return [violation for violation in self.violations if violation.confirmed]


@dataclass
class PropertyCheck:
    """Maximum relative deviation of one identity over a run."""

    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


@dataclass
class CheckReport:
    """A named list of identity checks, e.g. the compound-matrix algebra."""

    name: str
    seed: int
    checks: list[PropertyCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)
