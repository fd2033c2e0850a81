"""Symmetric forms on R_+^n, their matrix extension and property detectors."""

import math
from dataclasses import dataclass, field
from enum import StrEnum
from itertools import combinations, islice
from typing import Any

import numpy as np
import structlog
from numpy.typing import ArrayLike

from symform import hermitian
from symform.errors import InvalidInput, ResourceLimit
from symform.hermitian import RealVector
from symform.models import FormPropertyReport, Verdict

logger = structlog.get_logger()

GK_ENUMERATION_CAP = 2_000_000
_GK_CHUNK = 65_536
HOELDER_GRID = (1.25, 2.0, 4.0)
STRICT_MARGIN = 1e-3


class FormKind(StrEnum):
    TRACE = "trace"
    KTRACE = "ktrace"
    GK = "gk"
    SEMINORM = "seminorm"
    MINSUM = "minsum"


@dataclass(frozen=True)
class FormDescriptor:
    """One of the built-in symmetric forms.

    String grammar: ``trace | ktrace:k=K | gk:k=K | seminorm:p=P | minsum:k=K``.
    ``minsum`` is the sum of the k smallest entries.
    """

    kind: FormKind
    k: int | None = None
    p: float | None = None

    def __post_init__(self) -> None:
        if self.kind in (FormKind.KTRACE, FormKind.GK, FormKind.MINSUM):
            if self.k is None or self.k < 1:
                raise InvalidInput(f"{self.kind} needs an integer k >= 1")
        if self.kind == FormKind.SEMINORM:
            if self.p is None or not 0.0 < self.p <= 1.0:
                raise InvalidInput(f"seminorm needs p in (0, 1], got {self.p}")

    @classmethod
    def parse(cls, text: str) -> "FormDescriptor":
        name, _, params = text.strip().partition(":")
        try:
            kind = FormKind(name.strip())
        except ValueError as e:
            raise InvalidInput(f"Unknown form: {name!r}") from e

        values: dict[str, str] = {}
        for item in filter(None, (part.strip() for part in params.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise InvalidInput(f"Malformed form parameter: {item!r}")
            values[key.strip()] = value.strip()

        expected = {FormKind.TRACE: set(), FormKind.SEMINORM: {"p"}}.get(kind, {"k"})
        if set(values) != expected:
            raise InvalidInput(f"Form {kind} takes parameters {sorted(expected)}, got {sorted(values)}")
        try:
            if kind == FormKind.SEMINORM:
                return cls(kind, p=float(values["p"]))
            if "k" in values:
                return cls(kind, k=int(values["k"]))
        except ValueError as e:
            raise InvalidInput(f"Bad parameter value in {text!r}") from e
        return cls(kind)

    def __str__(self) -> str:
        if self.kind == FormKind.TRACE:
            return "trace"
        if self.kind == FormKind.SEMINORM:
            return f"seminorm:p={self.p:g}"
        return f"{self.kind}:k={self.k}"

    def is_hoelder(self, n: int) -> bool:
        # minsum with k = n is the trace
        return self.kind != FormKind.MINSUM or self.k == n


def as_spectrum(x: ArrayLike) -> RealVector:
    vector = np.asarray(x, dtype=np.float64)
    if vector.ndim != 1 or vector.size == 0:
        raise InvalidInput(f"Expected a non-empty vector, got shape {vector.shape}")
    if not np.all(np.isfinite(vector)) or np.any(vector < 0):
        raise InvalidInput("Spectrum vector entries must be finite and nonnegative")
    return vector


def esp(x: ArrayLike, k: int) -> float:
    """k-th elementary symmetric polynomial via the prefix recurrence."""
    x = as_spectrum(x)
    if not 1 <= k <= x.size:
        raise InvalidInput(f"k must be in [1, {x.size}], got {k}")
    partial = np.zeros(k + 1)
    partial[0] = 1.0
    for i, value in enumerate(x):
        for j in range(min(i + 1, k), 0, -1):
            partial[j] += value * partial[j - 1]
    return float(partial[k])


def _gk(x: RealVector, k: int) -> float:
    count = math.comb(x.size, k)
    if count > GK_ENUMERATION_CAP:
        raise ResourceLimit(f"gk enumeration of C({x.size},{k}) = {count} subsets exceeds {GK_ENUMERATION_CAP}")
    subsets = combinations(range(x.size), k)
    total = 0.0
    while chunk := list(islice(subsets, _GK_CHUNK)):
        products = np.prod(x[np.array(chunk)], axis=1)
        total += float(np.sum(products ** (1.0 / k)))
    return total


def eval_form(phi: FormDescriptor, x: ArrayLike) -> float:
    """Evaluate phi on a nonnegative vector."""
    x = as_spectrum(x)
    if phi.k is not None and not 1 <= phi.k <= x.size:
        raise InvalidInput(f"{phi} is undefined in dimension {x.size}")
    match phi.kind:
        case FormKind.TRACE:
            return float(np.sum(x))
        case FormKind.KTRACE:
            return esp(x, phi.k) ** (1.0 / phi.k)
        case FormKind.GK:
            return _gk(x, phi.k)
        case FormKind.SEMINORM:
            return float(np.sum(x**phi.p) ** (1.0 / phi.p))
        case FormKind.MINSUM:
            return float(np.sum(np.sort(x)[: phi.k]))


def eval_form_matrix(phi: FormDescriptor, a: ArrayLike | hermitian.HermitianMatrix) -> float:
    """phi(A) = phi(lambda(A)) on the clamped spectrum of a PSD matrix."""
    return eval_form(phi, hermitian.as_psd(a).eigen.values)


def form_of_power(phi: FormDescriptor, x: ArrayLike, p: float) -> float:
    """phi(x^p)^{1/p}; p = inf gives its limit as p grows.

    The limit is max(x) for trace and seminorm, the geometric mean of the k largest entries for ktrace and
    gk, and the k-th smallest entry for minsum.
    """
    x = as_spectrum(x)
    if math.isinf(p):
        return _power_limit(phi, x)
    return eval_form(phi, x**p) ** (1.0 / p)


def _power_limit(phi: FormDescriptor, x: RealVector) -> float:
    if phi.k is not None and not 1 <= phi.k <= x.size:
        raise InvalidInput(f"{phi} is undefined in dimension {x.size}")
    ordered = np.sort(x)[::-1]
    match phi.kind:
        case FormKind.KTRACE | FormKind.GK:
            return float(np.prod(ordered[: phi.k]) ** (1.0 / phi.k))
        case FormKind.MINSUM:
            return float(ordered[-phi.k])
    return float(ordered[0])


def _tolerance(rhs: float) -> float:
    return 1e-9 + 1e-8 * abs(rhs)


@dataclass
class _Tracker:
    """Collects the first violation seen by a sampling check."""

    witness: dict[str, Any] | None = None
    worst: float = -math.inf
    checks: int = 0
    extras: dict[str, Any] = field(default_factory=dict)

    def record(self, lhs: float, rhs: float, **witness: Any) -> None:
        """Record a check of lhs <= rhs."""
        self.checks += 1
        gap = lhs - rhs
        self.worst = max(self.worst, gap)
        if gap > _tolerance(rhs) and self.witness is None:
            self.witness = {"lhs": lhs, "rhs": rhs, **_listify(witness)}

    @property
    def verdict(self) -> Verdict:
        return Verdict.FAIL if self.witness is not None else Verdict.PASS


def _listify(values: dict[str, Any]) -> dict[str, Any]:
    return {key: value.tolist() if isinstance(value, np.ndarray) else value for key, value in values.items()}


def check_axioms(phi: FormDescriptor, n: int, trials: int, seed: int) -> FormPropertyReport:
    """Sample homogeneity, monotonicity (weak and strict with margin) and symmetry."""
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    rng = np.random.default_rng(seed)
    tracker = _Tracker()
    for _ in range(trials):
        x = rng.uniform(0.0, 2.0, n)
        base = eval_form(phi, x)

        for t in (0.0, 0.5, 3.0, float(rng.uniform(0.0, 5.0))):
            scaled = eval_form(phi, t * x)
            tracker.record(abs(scaled - t * base), 1e-10 * max(1.0, t * base), axiom="homogeneity", x=x, t=t)

        increment = rng.uniform(0.0, 1.0, n)
        tracker.record(base, eval_form(phi, x + increment), axiom="monotonicity", x=x, y=x + increment)
        margin = increment + STRICT_MARGIN
        if not eval_form(phi, x + margin) > base:
            tracker.record(1.0, 0.0, axiom="strict-monotonicity", x=x, y=x + margin)

        permuted = rng.permutation(x)
        tracker.record(abs(eval_form(phi, permuted) - base), 1e-12 * max(1.0, base), axiom="symmetry", x=x, y=permuted)

    logger.debug("Axiom check finished", form=str(phi), n=n, trials=trials, verdict=tracker.verdict)
    return FormPropertyReport(
        form=str(phi),
        n=n,
        trials=trials,
        seed=seed,
        axioms_pass=tracker.witness is None,
        witness=tracker.witness,
    )


def check_hoelder(phi: FormDescriptor, n: int, trials: int, seed: int) -> FormPropertyReport:
    """Midpoint convexity of phi∘exp and the direct Hölder inequality.

    The first Hölder trial uses the anti-aligned pair x = (1,..,1,10,..,10), y = reversed x with p = q = 2,
    which separates concave non-Hölder forms such as minsum from Hölder ones.
    """
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    rng = np.random.default_rng(seed)
    tracker = _Tracker()

    if phi.k is not None and phi.k < n:
        x = np.where(np.arange(n) < phi.k, 1.0, 10.0)
        y = x[::-1].copy()
        _record_hoelder(tracker, phi, x, y, 2.0)

    for _ in range(trials):
        u, v = rng.normal(0.0, 2.0, n), rng.normal(0.0, 2.0, n)
        lhs = eval_form(phi, np.exp((u + v) / 2))
        rhs = (eval_form(phi, np.exp(u)) + eval_form(phi, np.exp(v))) / 2
        tracker.record(lhs, rhs, test="exp-convexity", u=u, v=v)

        x, y = rng.uniform(0.01, 3.0, n), rng.uniform(0.01, 3.0, n)
        for p in (*HOELDER_GRID, math.inf):
            _record_hoelder(tracker, phi, x, y, p)

    return FormPropertyReport(
        form=str(phi),
        n=n,
        trials=trials,
        seed=seed,
        hoelder_verdict=tracker.verdict,
        witness=tracker.witness,
    )


def _record_hoelder(tracker: _Tracker, phi: FormDescriptor, x: RealVector, y: RealVector, p: float) -> None:
    q = 1.0 if math.isinf(p) else p / (p - 1.0)
    lhs = eval_form(phi, x * y)
    rhs = form_of_power(phi, x, p) * form_of_power(phi, y, q)
    tracker.record(lhs, rhs, test="hoelder", x=x, y=y, p="inf" if math.isinf(p) else p)


def check_concavity_vector(phi: FormDescriptor, n: int, trials: int, seed: int) -> FormPropertyReport:
    """Midpoint and random-tau concavity on nonnegative vectors."""
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    rng = np.random.default_rng(seed)
    tracker = _Tracker()
    for _ in range(trials):
        x, y = rng.uniform(0.0, 3.0, n), rng.uniform(0.0, 3.0, n)
        for tau in (0.5, float(rng.uniform())):
            mixed = eval_form(phi, tau * x + (1 - tau) * y)
            average = tau * eval_form(phi, x) + (1 - tau) * eval_form(phi, y)
            tracker.record(average, mixed, x=x, y=y, tau=tau)

    return FormPropertyReport(
        form=str(phi),
        n=n,
        trials=trials,
        seed=seed,
        concave_verdict=tracker.verdict,
        witness=tracker.witness,
    )


def check_concavity_matrix(phi: FormDescriptor, n: int, trials: int, seed: int, r: float = 1.0) -> FormPropertyReport:
    """Midpoint concavity of A -> phi(A^r) on random PSD pairs, r in (0, 1]."""
    if not 0.0 < r <= 1.0:
        raise InvalidInput(f"r must be in (0, 1], got {r}")
    rng = np.random.default_rng(seed)
    tracker = _Tracker()
    for _ in range(trials):
        a, b = hermitian.sample("psd", n, rng), hermitian.sample("psd", n, rng)
        mixed = eval_form_matrix(phi, hermitian.power((a + b) / 2, r))
        average = (eval_form_matrix(phi, hermitian.power(a, r)) + eval_form_matrix(phi, hermitian.power(b, r))) / 2
        tracker.record(average, mixed, r=r)

    return FormPropertyReport(
        form=str(phi),
        n=n,
        trials=trials,
        seed=seed,
        concave_verdict=tracker.verdict,
        witness=tracker.witness,
    )


def check_matrix_hoelder(phi: FormDescriptor, n: int, trials: int, seed: int) -> FormPropertyReport:
    """phi(|AB|) <= phi(A^p)^{1/p} phi(B^q)^{1/q} on random PSD pairs."""
    rng = np.random.default_rng(seed)
    tracker = _Tracker()
    for _ in range(trials):
        a, b = hermitian.sample("psd", n, rng), hermitian.sample("psd", n, rng)
        lhs = eval_form(phi, hermitian.matrix_abs(a @ b).eigen.values)
        spec_a, spec_b = hermitian.psd_spectrum(a), hermitian.psd_spectrum(b)
        for p in HOELDER_GRID:
            rhs = form_of_power(phi, spec_a, p) * form_of_power(phi, spec_b, p / (p - 1.0))
            tracker.record(lhs, rhs, p=p)

    return FormPropertyReport(
        form=str(phi),
        n=n,
        trials=trials,
        seed=seed,
        hoelder_verdict=tracker.verdict,
        witness=tracker.witness,
    )
