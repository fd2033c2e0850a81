"""Seeded concavity probes, the k-smallest-sum search and the majorization reduction check.

Every trial draws from its own generator seeded by derive_trial_seed(seed, index), so a trial can be
regenerated from its record alone and reports do not depend on the thread count.
"""

import math
import time
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field, replace
from functools import partial
from typing import Any, Literal

import numpy as np
import structlog

from symform import __version__, hermitian, majorization
from symform.errors import InvalidInput, NumericalFailure, PreconditionFailed, SymformError
from symform.forms import FormDescriptor, FormKind, eval_form
from symform.hermitian import ComplexMatrix, RealVector
from symform.inequalities import inequality_check, sample_inputs, sample_params
from symform.models import ProbeReport, ViolationRecord
from symform.quadrature import QuadratureSpec
from symform.target import ProbeTarget, eval_target
from symform.targets import LiebTarget, TargetDescriptor
from symform.trials import inputs_digest, run_trials

logger = structlog.get_logger()

TauMode = Literal["fixed_half", "uniform"]

BASE_MARGIN = 0.1
EIGEN_GAP = 1e-8
SECOND_DIFF_ABS = 1e-7
SECOND_DIFF_REL = 1e-5
WITNESS_TOL = 1e-9


@dataclass(frozen=True)
class ProbeConfig:
    """Dimensions, trial budget and tolerances of a probe run.

    For the lieb target m is the column dimension of K (default n); for exp_log it is the number of
    arguments when the weights are drawn (default 1).
    """

    n: int = 3
    m: int | None = None
    trials: int = 100
    seed: int = 0
    tau_mode: TauMode = "fixed_half"
    tol_abs: float = 1e-9
    tol_rel: float = 1e-8
    h_steps: tuple[float, ...] = (1e-2, 1e-3)
    confirm_tol: float = 1e-6
    enforce_hoelder: bool = True
    threads: int | None = None
    max_retries: int = 10

    def __post_init__(self) -> None:
        if self.n < 1 or (self.m is not None and self.m < 1):
            raise InvalidInput(f"Dimensions must be positive, got n={self.n}, m={self.m}")
        if self.trials < 1:
            raise InvalidInput(f"trials must be >= 1, got {self.trials}")
        if self.tau_mode not in ("fixed_half", "uniform"):
            raise InvalidInput(f"tau_mode must be fixed_half or uniform, got {self.tau_mode!r}")
        if not (self.tol_abs > 0 and self.tol_rel > 0 and self.confirm_tol > 0):
            raise InvalidInput("Tolerances must be positive")
        if not self.h_steps or any(not h > 0 for h in self.h_steps):
            raise InvalidInput(f"Second-difference steps must be positive, got {self.h_steps}")

    def tolerance(self, value: float) -> float:
        return self.tol_abs + self.tol_rel * abs(value)


@dataclass
class TrialOutcome:
    """What one trial contributes to a report."""

    index: int
    seed: int
    skipped: bool = False
    slack: float | None = None
    gap: float | None = None
    violations: list[ViolationRecord] = field(default_factory=list)
    extras: dict[str, Any] = field(default_factory=dict)
    error: SymformError | None = None


def _skip(index: int, seed: int, error: SymformError) -> TrialOutcome:
    logger.warning("Trial skipped", trial=index, trial_seed=seed, error_type=type(error).__name__, error=str(error))
    return TrialOutcome(index=index, seed=seed, skipped=True, error=error)


def _aggregate(
    command: str,
    config: ProbeConfig,
    outcomes: Sequence[TrialOutcome],
    started: float,
    details: dict[str, Any],
) -> ProbeReport:
    completed = [outcome for outcome in outcomes if not outcome.skipped]
    if outcomes and not completed:
        # a run without one completed trial fails with the first trial error
        first = next(outcome.error for outcome in outcomes if outcome.error is not None)
        logger.error("Every trial failed", command=command, trials=len(outcomes), error=str(first))
        raise first
    violations = sorted(
        (violation for outcome in outcomes for violation in outcome.violations),
        key=lambda v: (v.trial, v.kind, v.step or 0.0),
    )
    passing = [o.slack for o in completed if not o.violations and o.slack is not None]
    gaps = [o.gap for o in completed if o.gap is not None]
    report = ProbeReport(
        tool_version=__version__,
        command=command,
        seed=config.seed,
        trials_attempted=len(outcomes),
        trials_completed=len(completed),
        trials_skipped=len(outcomes) - len(completed),
        violations=violations,
        min_slack=min(passing) if passing else None,
        max_gap=max(gaps) if gaps else None,
        details=details,
        wall_time_ms=(time.perf_counter() - started) * 1000.0,
    )
    logger.info(
        "Probe finished",
        command=command,
        completed=report.trials_completed,
        skipped=report.trials_skipped,
        violations=len(violations),
        confirmed=len(report.confirmed_violations),
    )
    return report


def _gate(descriptor: TargetDescriptor, phi: FormDescriptor, config: ProbeConfig) -> None:
    dim = descriptor.output_dim(config.n, config.m)
    if phi.k is not None and phi.k > dim:
        raise InvalidInput(f"{phi} is undefined on {dim}x{dim} outputs")
    if config.enforce_hoelder and not phi.is_hoelder(dim):
        raise PreconditionFailed(f"{phi} is not a Hölder form in dimension {dim}; concavity is not guaranteed")


def _base_details(descriptor: TargetDescriptor, phi: FormDescriptor, config: ProbeConfig) -> dict[str, Any]:
    fixed = {
        key: value
        for key, value in (
            ("r", descriptor.r),
            ("s", descriptor.s),
            ("p", descriptor.p),
            ("q", descriptor.q),
            ("weights", list(descriptor.weights) if descriptor.weights else None),
        )
        if value is not None
    }
    return {
        "target": descriptor.kind,
        "strict": descriptor.strict,
        "form": str(phi),
        "n": config.n,
        "m": config.m,
        "tau_mode": config.tau_mode,
        "fixed_params": fixed,
    }


# midpoint


@dataclass(frozen=True)
class MidpointSample:
    target: ProbeTarget
    first: list[ComplexMatrix]
    second: list[ComplexMatrix]
    tau: float

    @property
    def mixed(self) -> list[ComplexMatrix]:
        return [self.tau * a + (1 - self.tau) * b for a, b in zip(self.first, self.second, strict=True)]

    @property
    def digest(self) -> str:
        return inputs_digest([*self.first, *self.second])


def draw_midpoint(descriptor: TargetDescriptor, config: ProbeConfig, trial_seed: int) -> MidpointSample:
    """Regenerate a midpoint trial's target, input pair and tau from its seed."""
    rng = np.random.default_rng(trial_seed)
    target = descriptor.resolve(config.n, config.m, rng)
    first, second = target.sample_inputs(rng), target.sample_inputs(rng)
    tau = 0.5 if config.tau_mode == "fixed_half" else float(rng.uniform())
    return MidpointSample(target=target, first=first, second=second, tau=tau)


def midpoint_values(sample: MidpointSample, phi: FormDescriptor) -> tuple[float, float]:
    """(tau f(A) + (1 - tau) f(B), f(tau A + (1 - tau) B)) with f = phi o F."""
    lhs = sample.tau * eval_target(sample.target, phi, sample.first)
    lhs += (1 - sample.tau) * eval_target(sample.target, phi, sample.second)
    return lhs, eval_target(sample.target, phi, sample.mixed)


def _midpoint_trial(
    descriptor: TargetDescriptor, phi: FormDescriptor, config: ProbeConfig, index: int, seed: int
) -> TrialOutcome:
    try:
        sample = draw_midpoint(descriptor, config, seed)
        lhs, rhs = midpoint_values(sample, phi)
    except SymformError as e:
        return _skip(index, seed, e)

    gap = lhs - rhs
    outcome = TrialOutcome(index=index, seed=seed, slack=rhs - lhs, gap=gap)
    if gap > config.tolerance(rhs):
        regenerated = midpoint_values(draw_midpoint(descriptor, config, seed), phi)
        outcome.violations.append(
            ViolationRecord(
                trial=index,
                trial_seed=seed,
                kind="midpoint",
                lhs=lhs,
                rhs=rhs,
                gap=gap,
                tau=sample.tau,
                params=sample.target.params(),
                inputs_digest=sample.digest,
                confirmed=regenerated[0] - regenerated[1] > config.confirm_tol,
            )
        )
    return outcome


def probe_midpoint(descriptor: TargetDescriptor, phi: FormDescriptor, config: ProbeConfig) -> ProbeReport:
    """tau phi(F(A)) + (1 - tau) phi(F(B)) <= phi(F(tau A + (1 - tau) B)) on seeded trials."""
    _gate(descriptor, phi, config)
    started = time.perf_counter()
    outcomes = run_trials(partial(_midpoint_trial, descriptor, phi, config), config.trials, config.seed, config.threads)
    command = f"probe midpoint target={descriptor.kind} form={phi}"
    return _aggregate(command, config, outcomes, started, _base_details(descriptor, phi, config))


# second differences


@dataclass(frozen=True)
class SecondDifferenceSample:
    target: ProbeTarget
    base: list[ComplexMatrix]
    direction: list[ComplexMatrix]
    attempts: int

    def shifted(self, h: float) -> list[ComplexMatrix]:
        return [c + h * d for c, d in zip(self.base, self.direction, strict=True)]


def _admissible(base: Sequence[ComplexMatrix], direction: Sequence[ComplexMatrix], h: float) -> bool:
    for c, d in zip(base, direction, strict=True):
        values = hermitian.spectrum(c)
        if values.size > 1 and np.min(-np.diff(values)) < EIGEN_GAP * max(1.0, values[0]):
            return False
        if values[-1] - h * float(np.max(np.abs(hermitian.spectrum(d)))) < BASE_MARGIN / 2:
            return False
    return True


def draw_second_difference(
    descriptor: TargetDescriptor, config: ProbeConfig, trial_seed: int
) -> SecondDifferenceSample | None:
    """Base point with a PD margin and unit max-norm Hermitian directions; None after max_retries."""
    rng = np.random.default_rng(trial_seed)
    target = descriptor.resolve(config.n, config.m, rng)
    h = max(config.h_steps)
    for attempt in range(1, config.max_retries + 1):
        base = [hermitian.sample("psd", dim, rng) + BASE_MARGIN * np.eye(dim) for dim in target.input_dims]
        direction = []
        for dim in target.input_dims:
            delta = hermitian.sample("hermitian", dim, rng)
            direction.append(delta / np.max(np.abs(delta)))
        if _admissible(base, direction, h):
            return SecondDifferenceSample(target=target, base=base, direction=direction, attempts=attempt)
    return None


def second_differences(
    sample: SecondDifferenceSample, phi: FormDescriptor, steps: Iterable[float]
) -> list[tuple[float, float, float, float]]:
    """(h, f(C+h D), f(C), f(C-h D)) per step."""
    def f(inputs: list[ComplexMatrix]) -> float:
        return eval_target(sample.target, phi, inputs)

    center = f(sample.base)
    return [(h, f(sample.shifted(h)), center, f(sample.shifted(-h))) for h in steps]


def second_difference_tolerance(h: float, center: float) -> float:
    return SECOND_DIFF_ABS + SECOND_DIFF_REL * h * h * abs(center)


def _second_difference_trial(
    descriptor: TargetDescriptor, phi: FormDescriptor, config: ProbeConfig, index: int, seed: int
) -> TrialOutcome:
    try:
        sample = draw_second_difference(descriptor, config, seed)
        if sample is None:
            raise NumericalFailure(f"No admissible base point after {config.max_retries} draws")
        rows = second_differences(sample, phi, config.h_steps)
    except SymformError as e:
        return _skip(index, seed, e)

    outcome = TrialOutcome(index=index, seed=seed, extras={"attempts": sample.attempts})
    for h, plus, center, minus in rows:
        d2 = plus - 2 * center + minus
        outcome.slack = -d2 if outcome.slack is None else min(outcome.slack, -d2)
        outcome.gap = d2 if outcome.gap is None else max(outcome.gap, d2)
        if d2 > second_difference_tolerance(h, center):
            outcome.violations.append(
                ViolationRecord(
                    trial=index,
                    trial_seed=seed,
                    kind="second_difference",
                    lhs=(plus + minus) / 2,
                    rhs=center,
                    gap=d2,
                    step=h,
                    params=sample.target.params(),
                    inputs_digest=inputs_digest([*sample.base, *sample.direction]),
                )
            )
    if outcome.violations:
        regenerated = draw_second_difference(descriptor, config, seed)
        rows = second_differences(regenerated, phi, config.h_steps)
        again = {h: plus - 2 * center + minus for h, plus, center, minus in rows}
        for violation in outcome.violations:
            violation.confirmed = again[violation.step] > config.confirm_tol
    return outcome


def probe_second_difference(descriptor: TargetDescriptor, phi: FormDescriptor, config: ProbeConfig) -> ProbeReport:
    """f(C + h D) - 2 f(C) + f(C - h D) <= 1e-7 + 1e-5 h^2 |f(C)| for every h in config.h_steps."""
    _gate(descriptor, phi, config)
    started = time.perf_counter()
    task = partial(_second_difference_trial, descriptor, phi, config)
    outcomes = run_trials(task, config.trials, config.seed, config.threads)
    details = _base_details(descriptor, phi, config)
    details["h_steps"] = list(config.h_steps)
    details["resampled_trials"] = sum(1 for o in outcomes if o.extras.get("attempts", 1) > 1)
    command = f"probe second_difference target={descriptor.kind} form={phi}"
    return _aggregate(command, config, outcomes, started, details)


# conjecture


def merge_reports(command: str, seed: int, reports: Mapping[str, ProbeReport]) -> ProbeReport:
    """Combine reports of one seed; per-part summaries go under details."""
    violations = sorted(
        (v for report in reports.values() for v in report.violations),
        key=lambda v: (v.trial, v.kind, v.step or 0.0),
    )
    slacks = [r.min_slack for r in reports.values() if r.min_slack is not None]
    gaps = [r.max_gap for r in reports.values() if r.max_gap is not None]
    return ProbeReport(
        tool_version=__version__,
        command=command,
        seed=seed,
        trials_attempted=sum(r.trials_attempted for r in reports.values()),
        trials_completed=sum(r.trials_completed for r in reports.values()),
        trials_skipped=sum(r.trials_skipped for r in reports.values()),
        violations=violations,
        min_slack=min(slacks) if slacks else None,
        max_gap=max(gaps) if gaps else None,
        details={
            name: {
                "trials_completed": r.trials_completed,
                "violations": len(r.violations),
                "confirmed": len(r.confirmed_violations),
                "min_slack": r.min_slack,
                "max_gap": r.max_gap,
                **r.details,
            }
            for name, r in reports.items()
        },
        wall_time_ms=sum(r.wall_time_ms for r in reports.values()),
    )


def conjecture_search(k: int, n: int, descriptor: TargetDescriptor, config: ProbeConfig) -> ProbeReport:
    """Search for concavity violations of the sum of the k smallest eigenvalues, 1 <= k < n.

    Only confirmed violations count as candidate counterexamples. For the lieb target K is n x n.
    """
    if not 1 <= k < n:
        raise InvalidInput(f"Need 1 <= k < n, got k={k}, n={n}")
    phi = FormDescriptor(FormKind.MINSUM, k=k)
    m = n if descriptor.kind == LiebTarget.kind else config.m
    cfg = replace(config, n=n, m=m, enforce_hoelder=False)
    parts = {
        "midpoint": probe_midpoint(descriptor, phi, cfg),
        "second_difference": probe_second_difference(descriptor, phi, cfg),
    }
    report = merge_reports(f"conjecture k={k} n={n} target={descriptor.kind}", config.seed, parts)
    report.details["candidate_counterexamples"] = len(report.confirmed_violations)
    return report


# reduction


@dataclass(frozen=True)
class SpectrumTriple:
    """Descending spectra of F(A), F(B) and F(tau A + (1 - tau) B)."""

    first: RealVector
    second: RealVector
    mixed: RealVector
    tau: float


@dataclass
class ReductionOutcome:
    weak_majorization: bool
    min_prefix_slack: float
    witness: bool
    witness_residual: float | None
    form_lhs: float
    form_rhs: float
    tol: float

    @property
    def form_gap(self) -> float:
        return self.form_lhs - self.form_rhs

    @property
    def failed_steps(self) -> list[str]:
        steps = []
        if not self.weak_majorization:
            steps.append("weak_majorization")
        if self.weak_majorization and not self.witness:
            steps.append("witness")
        if self.form_gap > self.tol:
            steps.append("form_inequality")
        return steps

    @property
    def passed(self) -> bool:
        return not self.failed_steps


def reduction_check(triple: SpectrumTriple, phi: FormDescriptor, tol_rel: float = 1e-8) -> ReductionOutcome:
    """Chain from k-smallest-sum concavity to concavity of phi on one triple.

    With a = tau lambda(F(A)) + (1 - tau) lambda(F(B)): first -lambda(F(C)) is weakly majorized by -a; then a
    bridge v with -lambda(F(C)) <= v and a doubly stochastic D with v = -D a exist; finally
    phi(F(C)) >= tau phi(F(A)) + (1 - tau) phi(F(B)) is asserted directly.
    """
    tau = triple.tau
    average = tau * np.sort(triple.first)[::-1] + (1 - tau) * np.sort(triple.second)[::-1]
    lower = -np.asarray(triple.mixed, dtype=np.float64)
    result = majorization.verdict(lower, -average)

    witness, residual = False, None
    if result.weak:
        v = majorization.bridge(lower, -average)
        d = majorization.ds_from_majorization(v, -average)
        residual = float(np.max(np.abs(d.matrix @ -average - v)))
        dominated = bool(np.all(lower <= v + majorization.SLACK_TOL * result.scale))
        witness = dominated and residual <= WITNESS_TOL * result.scale

    form_lhs = tau * eval_form(phi, triple.first) + (1 - tau) * eval_form(phi, triple.second)
    form_rhs = eval_form(phi, triple.mixed)
    return ReductionOutcome(
        weak_majorization=result.weak,
        min_prefix_slack=float(np.min(result.prefix_slacks)),
        witness=witness,
        witness_residual=residual,
        form_lhs=form_lhs,
        form_rhs=form_rhs,
        tol=tol_rel * max(1.0, abs(form_rhs)),
    )


def sample_triple(sample: MidpointSample) -> SpectrumTriple:
    target = sample.target
    return SpectrumTriple(
        first=target.spectrum(sample.first),
        second=target.spectrum(sample.second),
        mixed=target.spectrum(sample.mixed),
        tau=sample.tau,
    )


def _reduction_trial(
    descriptor: TargetDescriptor, phi: FormDescriptor, config: ProbeConfig, index: int, seed: int
) -> TrialOutcome:
    try:
        sample = draw_midpoint(descriptor, config, seed)
        outcome = reduction_check(sample_triple(sample), phi, config.tol_rel)
    except SymformError as e:
        return _skip(index, seed, e)

    result = TrialOutcome(index=index, seed=seed, slack=-outcome.form_gap, gap=outcome.form_gap)
    result.extras["failed_steps"] = outcome.failed_steps
    if not outcome.passed:
        confirmed = outcome.form_gap > config.confirm_tol or outcome.min_prefix_slack < -config.confirm_tol
        result.violations.append(
            ViolationRecord(
                trial=index,
                trial_seed=seed,
                kind="reduction",
                lhs=outcome.form_lhs,
                rhs=outcome.form_rhs,
                gap=outcome.form_gap,
                tau=sample.tau,
                params={**sample.target.params(), "failed_steps": outcome.failed_steps},
                inputs_digest=sample.digest,
                confirmed=confirmed,
            )
        )
    return result


def probe_reduction(descriptor: TargetDescriptor, phi: FormDescriptor, config: ProbeConfig) -> ProbeReport:
    """reduction_check on seeded triples drawn like midpoint trials."""
    _gate(descriptor, phi, config)
    started = time.perf_counter()
    task = partial(_reduction_trial, descriptor, phi, config)
    outcomes = run_trials(task, config.trials, config.seed, config.threads)
    details = _base_details(descriptor, phi, config)
    for step in ("weak_majorization", "witness", "form_inequality"):
        details[f"{step}_failures"] = sum(1 for o in outcomes if step in o.extras.get("failed_steps", ()))
    command = f"probe reduction target={descriptor.kind} form={phi}"
    return _aggregate(command, config, outcomes, started, details)


# named inequalities


def _inequality_trial(
    name: str,
    phi: FormDescriptor,
    config: ProbeConfig,
    params: Mapping[str, Any],
    spec: QuadratureSpec,
    index: int,
    seed: int,
) -> TrialOutcome:
    def evaluate() -> Any:
        rng = np.random.default_rng(seed)
        drawn = sample_params(name, rng, params)
        return drawn, inequality_check(name, phi, sample_inputs(name, rng, config.n, config.m, drawn), drawn, spec)

    try:
        drawn, result = evaluate()
    except SymformError as e:
        return _skip(index, seed, e)

    outcome = TrialOutcome(index=index, seed=seed, slack=result.slack, gap=-result.slack)
    if not result.passed:
        _, again = evaluate()
        widened = again.tol + config.confirm_tol * max(1.0, abs(again.rhs))
        outcome.violations.append(
            ViolationRecord(
                trial=index,
                trial_seed=seed,
                kind=name,
                lhs=result.lhs,
                rhs=result.rhs,
                gap=-result.slack,
                params=_plain(drawn),
                inputs_digest=result.inputs_digest,
                confirmed=again.slack < -widened or not again.conditions_met,
            )
        )
    return outcome


def _plain(params: Mapping[str, Any]) -> dict[str, Any]:
    return {key: ("inf" if isinstance(value, float) and math.isinf(value) else value) for key, value in params.items()}


def verify_inequality(
    name: str,
    phi: FormDescriptor,
    config: ProbeConfig,
    params: Mapping[str, Any] | None = None,
    spec: QuadratureSpec | None = None,
) -> ProbeReport:
    """Run a named inequality on seeded random inputs; params fix values that would otherwise be drawn."""
    params = dict(params or {})
    started = time.perf_counter()
    task: Callable[[int, int], TrialOutcome] = partial(
        _inequality_trial, name, phi, config, params, spec or QuadratureSpec()
    )
    outcomes = run_trials(task, config.trials, config.seed, config.threads)
    details = {"ineq": name, "form": str(phi), "n": config.n, "m": config.m, "fixed_params": _plain(params)}
    return _aggregate(f"verify ineq={name} form={phi}", config, outcomes, started, details)
