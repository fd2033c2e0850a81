"""k-th compound matrices (the matrix of ∧^k A) and their algebraic identities."""

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray

from symform import hermitian
from symform.errors import InvalidInput, ResourceLimit
from symform.hermitian import ComplexMatrix
from symform.models import CheckReport, PropertyCheck

logger = structlog.get_logger()

COMPOUND_CAP = 5000
PROPERTY_TOL = 1e-8


@dataclass(frozen=True)
class CompoundMatrix:
    """C(n,k) x C(n,k) matrix of k x k minors, rows and columns in lexicographic subset order."""

    k: int
    base_n: int
    entries: ComplexMatrix

    @property
    def subsets(self) -> list[tuple[int, ...]]:
        return subset_indices(self.base_n, self.k)


def subset_indices(n: int, k: int) -> list[tuple[int, ...]]:
    """Sorted k-subsets of range(n) in lexicographic order; position is the canonical basis index."""
    return list(combinations(range(n), k))


def compound(a: ArrayLike, k: int) -> CompoundMatrix:
    """Entry (S, T) is det A[S, T]."""
    a = hermitian.as_matrix(a)
    n = a.shape[0]
    if not 1 <= k <= n:
        raise InvalidInput(f"Compound order k must be in [1, {n}], got {k}")
    size = math.comb(n, k)
    if size > COMPOUND_CAP:
        raise ResourceLimit(f"Compound dimension C({n},{k}) = {size} exceeds {COMPOUND_CAP}")

    index = np.array(subset_indices(n, k))
    entries = np.empty((size, size), dtype=np.complex128)
    for row, subset in enumerate(index):
        # (k, size, k) -> (size, k, k): one k x k block per column subset
        blocks = a[subset][:, index].transpose(1, 0, 2)
        entries[row] = np.linalg.det(blocks)
    return CompoundMatrix(k=k, base_n=n, entries=entries)


def _deviation(x: NDArray, y: NDArray) -> float:
    return float(np.max(np.abs(x - y)) / max(1.0, float(np.max(np.abs(y)))))


def _subset_products(values: NDArray, k: int) -> NDArray:
    return np.array([np.prod(values[list(subset)]) for subset in combinations(range(values.size), k)])


def compound_property_check(
    n: int,
    k: int,
    seed: int,
    trials: int = 1,
    a: ArrayLike | None = None,
    b: ArrayLike | None = None,
) -> CheckReport:
    """Check the compound identities on seeded random matrices.

    Covers the product, adjoint, transpose, inverse, power (t = 1/2, 2, 0.7i), spectrum-multiset,
    top-eigenvalue and absolute-value rules, plus Hermitian and PSD preservation. Explicit a, b replace
    the general random pair in the first trial.
    """
    rng = np.random.default_rng(seed)
    worst: dict[str, tuple[float, float]] = {}

    def note(name: str, value: float, tol: float = PROPERTY_TOL) -> None:
        previous = worst.get(name, (0.0, tol))[0]
        worst[name] = (max(previous, value), tol)

    for trial in range(trials):
        x = hermitian.as_matrix(a) if trial == 0 and a is not None else hermitian.sample("general", n, rng)
        y = hermitian.as_matrix(b) if trial == 0 and b is not None else hermitian.sample("general", n, rng)
        h = hermitian.sample("hermitian", n, rng)
        # imaginary powers need a spectrum bounded away from zero
        p = hermitian.sample("psd", n, rng) + 0.1 * np.eye(n)

        cx, cy = compound(x, k).entries, compound(y, k).entries
        ch, cp = compound(h, k).entries, hermitian.hermitian_part(compound(p, k).entries)

        note("product", _deviation(compound(x @ y, k).entries, cx @ cy))
        note("adjoint", _deviation(compound(hermitian.dagger(x), k).entries, hermitian.dagger(cx)))
        note("transpose", _deviation(compound(x.T, k).entries, cx.T))
        note("inverse", _deviation(compound(np.linalg.inv(x), k).entries, np.linalg.inv(cx)))
        for t in (0.5, 2.0, 0.7j):
            note(f"power[{t}]", _deviation(compound(hermitian.power(p, t), k).entries, hermitian.power(cp, t)))

        expected = np.sort(_subset_products(hermitian.spectrum(h), k))
        observed = np.sort(hermitian.spectrum(hermitian.hermitian_part(ch)))
        note("spectrum", _deviation(observed, expected))

        p_values = hermitian.psd_spectrum(p)
        top = hermitian.psd_spectrum(cp)[0]
        note("top-eigenvalue", abs(top - np.prod(p_values[:k])) / max(1.0, top))

        abs_x = hermitian.matrix_abs(x).data
        note("abs", _deviation(compound(abs_x, k).entries, hermitian.matrix_abs(cx).data))

        note("hermitian", _deviation(ch, hermitian.dagger(ch)), 1e-12)
        cp_spectrum = hermitian.spectrum(hermitian.hermitian_part(cp))
        note("psd", max(0.0, -cp_spectrum[-1] / max(1.0, cp_spectrum[0])), 1e-9)

    report = CheckReport(
        name=f"compound(n={n}, k={k})",
        seed=seed,
        checks=[PropertyCheck(name, deviation, tol) for name, (deviation, tol) in worst.items()],
    )
    logger.info("Compound properties checked", n=n, k=k, trials=trials, passed=report.passed)
    return report
