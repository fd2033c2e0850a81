"""Majorization verdicts and their constructive witnesses."""

import math
from dataclasses import dataclass

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray

from symform import hermitian
from symform.errors import InvalidInput, NumericalFailure, PreconditionFailed, ResourceLimit
from symform.forms import FormDescriptor, eval_form
from symform.hermitian import RealVector
from symform.models import IneqResult

logger = structlog.get_logger()

SLACK_TOL = 1e-10
LOG_FLOOR = 1e-300
BIRKHOFF_MAX_N = 12
_SUPPORT_EPS = 1e-13

PermutationVector = tuple[int, ...]


@dataclass(frozen=True)
class MajorizationVerdict:
    """Prefix-sum comparison of a against b after sorting both descending."""

    weak: bool
    strict: bool
    prefix_slacks: RealVector
    sum_gap: float
    scale: float
    det_gap: float | None = None


@dataclass(frozen=True)
class DoublyStochasticMatrix:
    matrix: NDArray[np.float64]

    def __post_init__(self) -> None:
        d = self.matrix
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InvalidInput(f"Doubly stochastic matrix must be square, got shape {d.shape}")
        if np.any(d < -1e-12):
            raise InvalidInput("Doubly stochastic matrix has negative entries")
        for sums in (d.sum(axis=0), d.sum(axis=1)):
            if np.any(np.abs(sums - 1.0) > 1e-10):
                raise InvalidInput("Row and column sums must equal 1")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _pair(a: ArrayLike, b: ArrayLike) -> tuple[RealVector, RealVector]:
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape or a.size == 0:
        raise InvalidInput(f"Vectors must be 1-D of equal length, got {a.shape} and {b.shape}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidInput("Vectors must be finite")
    return a, b


def _scale(a: RealVector, b: RealVector) -> float:
    return max(1.0, float(np.sum(np.abs(a))), float(np.sum(np.abs(b))))


def verdict(a: ArrayLike, b: ArrayLike, log_domain: bool = False) -> MajorizationVerdict:
    """Decide a ≺_w b and a ≺ b, optionally on entrywise logarithms."""
    a, b = _pair(a, b)
    if log_domain:
        if np.any(a <= LOG_FLOOR) or np.any(b <= LOG_FLOOR):
            raise InvalidInput("Log-domain majorization needs strictly positive entries")
        a, b = np.log(a), np.log(b)
    scale = _scale(a, b)
    slacks = np.cumsum(np.sort(b)[::-1]) - np.cumsum(np.sort(a)[::-1])
    sum_gap = float(slacks[-1])
    weak = bool(np.all(slacks >= -SLACK_TOL * scale))
    strict = weak and abs(sum_gap) <= SLACK_TOL * scale
    return MajorizationVerdict(weak=weak, strict=strict, prefix_slacks=slacks, sum_gap=sum_gap, scale=scale)


def bridge(a: ArrayLike, b: ArrayLike) -> RealVector:
    """Return c with a <= c ≺ b for a ≺_w b.

    The deficit sum(b) - sum(a) is poured onto the smallest entries of a, raising them to a common level.
    Entries above that level keep their value, so every prefix constraint of b stays satisfied.
    """
    a, b = _pair(a, b)
    if not verdict(a, b).weak:
        raise PreconditionFailed("bridge needs a weakly majorized by b")
    target = float(np.sum(b))
    if target - float(np.sum(a)) <= SLACK_TOL * _scale(a, b):
        return a.copy()

    ascending = np.sort(a)
    n = ascending.size
    above = np.concatenate([np.cumsum(ascending[::-1])[::-1][1:], [0.0]])
    for j in range(1, n + 1):
        level = (target - above[j - 1]) / j
        if level >= ascending[j - 1] and (j == n or level <= ascending[j]):
            break
    c = np.maximum(a, level)
    logger.debug("Bridge built", deficit=target - float(np.sum(a)), level=level)
    return c


def ds_from_majorization(a: ArrayLike, b: ArrayLike) -> DoublyStochasticMatrix:
    """Doubly stochastic D with D b = a, as a product of at most n-1 T-transforms."""
    a, b = _pair(a, b)
    if not verdict(a, b).strict:
        raise PreconditionFailed("ds_from_majorization needs a majorized by b")
    n = a.size
    scale = _scale(a, b)
    tol = 1e-12 * scale
    order_a = np.argsort(-a, kind="stable")
    order_b = np.argsort(-b, kind="stable")
    target = a[order_a]
    current = b[order_b].copy()
    sorted_d = np.eye(n)

    for _ in range(2 * n):
        diff = current - target
        if np.max(np.abs(diff)) <= tol:
            break
        above = np.flatnonzero(diff > tol)
        j = int(above[-1])
        below = np.flatnonzero(diff[j + 1 :] < -tol)
        if below.size == 0:
            raise NumericalFailure("No T-transform pair found while building the doubly stochastic matrix")
        k = j + 1 + int(below[0])
        delta = min(diff[j], -diff[k])
        weight = 1.0 - delta / (current[j] - current[k])
        transform = np.eye(n)
        transform[[j, k], [j, k]] = weight
        transform[[j, k], [k, j]] = 1.0 - weight
        current = transform @ current
        sorted_d = transform @ sorted_d

    d = np.zeros((n, n))
    d[np.ix_(order_a, order_b)] = sorted_d
    residual = float(np.max(np.abs(d @ b - a)))
    if residual > 1e-9 * scale:
        raise NumericalFailure(f"Doubly stochastic residual {residual:.3e} exceeds tolerance")
    return DoublyStochasticMatrix(d)


def _augment(row: int, support: NDArray[np.bool_], owner: list[int], seen: list[bool]) -> bool:
    for col in np.flatnonzero(support[row]):
        if seen[col]:
            continue
        seen[col] = True
        if owner[col] < 0 or _augment(owner[col], support, owner, seen):
            owner[col] = row
            return True
    return False


def _perfect_matching(support: NDArray[np.bool_]) -> PermutationVector | None:
    """Row -> column perfect matching by augmenting paths in lexicographic order."""
    n = support.shape[0]
    owner = [-1] * n
    for row in range(n):
        if not _augment(row, support, owner, [False] * n):
            return None
    image = [0] * n
    for col, row in enumerate(owner):
        image[row] = col
    return tuple(image)


def birkhoff(d: DoublyStochasticMatrix) -> list[tuple[float, PermutationVector]]:
    """Greedy decomposition D = sum_j tau_j P_j with (P b)_i = b[perm[i]]."""
    if d.n > BIRKHOFF_MAX_N:
        raise ResourceLimit(f"Birkhoff decomposition is capped at n = {BIRKHOFF_MAX_N}")
    residual = d.matrix.astype(np.float64, copy=True)
    rows = np.arange(d.n)
    terms: list[tuple[float, PermutationVector]] = []
    remaining = 1.0

    for _ in range(d.n * d.n):
        if remaining <= 1e-10:
            break
        perm = _perfect_matching(residual > _SUPPORT_EPS)
        if perm is None:
            if remaining <= 1e-9:
                break
            raise NumericalFailure(f"No perfect matching on the positive support, remaining weight {remaining:.3e}")
        weight = float(np.min(residual[rows, perm]))
        residual[rows, perm] -= weight
        remaining -= weight
        terms.append((weight, perm))

    logger.debug("Birkhoff decomposition", n=d.n, terms=len(terms), remaining=remaining)
    return terms


def permutation_matrix(perm: PermutationVector) -> NDArray[np.float64]:
    n = len(perm)
    matrix = np.zeros((n, n))
    matrix[np.arange(n), perm] = 1.0
    return matrix


def eigen_majorization_check(a: ArrayLike, b: ArrayLike, relation: str) -> MajorizationVerdict:
    """Spectral majorizations: λ(A+B) ≺ λ(A)+λ(B) or log λ(|AB|) ≺ log(λ(A)λ(B))."""
    if relation == "sum":
        ha, hb = hermitian.as_hermitian(a), hermitian.as_hermitian(b)
        lhs = hermitian.spectrum(ha.data + hb.data)
        return verdict(lhs, ha.eigen.values + hb.eigen.values)
    if relation == "product":
        pa, pb = hermitian.as_psd(a), hermitian.as_psd(b)
        for spec in (pa.eigen.values, pb.eigen.values):
            if spec[-1] <= 1e-8 * spec[0]:
                raise PreconditionFailed("Product relation needs lambda_min > 1e-8 lambda_max")
        lhs = hermitian.matrix_abs(pa.data @ pb.data).eigen.values
        rhs = pa.eigen.values * pb.eigen.values
        result = verdict(lhs, rhs, log_domain=True)
        det_gap = float(np.sum(np.log(lhs)) - np.sum(np.log(rhs)))
        return MajorizationVerdict(
            weak=result.weak,
            strict=result.strict,
            prefix_slacks=result.prefix_slacks,
            sum_gap=result.sum_gap,
            scale=result.scale,
            det_gap=det_gap,
        )
    raise InvalidInput(f"Unknown relation: {relation!r}")


def check_symmetric_consequence(phi: FormDescriptor, a: ArrayLike, b: ArrayLike) -> IneqResult:
    """For a ≺ b and concave phi: phi(b) <= phi(a)."""
    a, b = _pair(a, b)
    if not verdict(a, b).strict:
        raise PreconditionFailed("Symmetric consequence needs a majorized by b")
    lhs, rhs = eval_form(phi, b), eval_form(phi, a)
    return IneqResult(name="majorization-symmetry", lhs=lhs, rhs=rhs, tol=1e-9 + 1e-8 * math.fabs(rhs))
