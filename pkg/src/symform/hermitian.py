"""Dense Hermitian and PSD matrices, spectral functions and seeded sampling."""

from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
import scipy.linalg
import structlog
from numpy.typing import ArrayLike, NDArray

from symform.errors import IllConditioned, InvalidInput, SingularSpectrum

logger = structlog.get_logger()

ComplexMatrix = NDArray[np.complex128]
RealVector = NDArray[np.float64]
SampleKind = Literal["psd", "hermitian", "general", "unitary"]

HERMITIAN_TOL = 1e-12
PSD_CLAMP = 1e-10
POLAR_MIN_RATIO = 1e-10
PSD_REGULARIZATION = 1e-6


def as_matrix(x: ArrayLike, square: bool = True) -> ComplexMatrix:
    """Coerce to a finite complex 2-D array."""
    if isinstance(x, HermitianMatrix):
        return x.data
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInput(f"Expected a non-empty 2-D matrix, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise InvalidInput(f"Expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("Matrix has non-finite entries")
    return arr


def dagger(x: ComplexMatrix) -> ComplexMatrix:
    return x.conj().T


def hermitian_part(x: ComplexMatrix) -> ComplexMatrix:
    """(X + X*)/2, used to shed roundoff before an eigensolve."""
    return (x + dagger(x)) / 2


@dataclass(frozen=True)
class EigenDecomposition:
    """A = U diag(values) U* with values sorted descending."""

    vectors: ComplexMatrix
    values: RealVector

    def reconstruct(self) -> ComplexMatrix:
        return (self.vectors * self.values) @ dagger(self.vectors)


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """A Hermitian matrix stored in exactly-Hermitian canonical form."""

    data: ComplexMatrix

    @classmethod
    def from_array(cls, x: ArrayLike) -> "HermitianMatrix":
        arr = as_matrix(x)
        scale = float(np.max(np.abs(arr)))
        asym = float(np.max(np.abs(arr - dagger(arr))))
        if asym > HERMITIAN_TOL * scale:
            raise InvalidInput(f"Matrix is not Hermitian: max |A - A*| = {asym:.3e}")
        data = hermitian_part(arr)
        data.setflags(write=False)
        return cls(data)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @cached_property
    def eigen(self) -> EigenDecomposition:
        return _eigh_array(self.data)


class PSDMatrix(HermitianMatrix):
    """A Hermitian matrix with certified, clamped nonnegative spectrum."""

    @classmethod
    def from_array(cls, x: ArrayLike) -> "PSDMatrix":
        matrix = super().from_array(x)
        # touching eigen certifies the spectrum
        matrix.eigen
        return matrix

    @classmethod
    def from_eigen(cls, vectors: ComplexMatrix, values: RealVector) -> "PSDMatrix":
        """Build from a known decomposition without a second eigensolve."""
        values = np.maximum(np.asarray(values, dtype=np.float64), 0.0)
        data = hermitian_part((vectors * values) @ dagger(vectors))
        data.setflags(write=False)
        matrix = cls(data)
        matrix.__dict__["eigen"] = EigenDecomposition(vectors, values)
        return matrix

    @cached_property
    def eigen(self) -> EigenDecomposition:
        decomposition = _eigh_array(self.data)
        values = decomposition.values
        floor = -PSD_CLAMP * max(1.0, float(values[0]))
        if values[-1] < floor:
            raise InvalidInput(f"Matrix is not positive semi-definite: lambda_min = {values[-1]:.3e}")
        return EigenDecomposition(decomposition.vectors, np.maximum(values, 0.0))


def as_hermitian(x: ArrayLike | HermitianMatrix) -> HermitianMatrix:
    if isinstance(x, HermitianMatrix):
        return x
    return HermitianMatrix.from_array(x)


def as_psd(x: ArrayLike | HermitianMatrix) -> PSDMatrix:
    if isinstance(x, PSDMatrix):
        return x
    if isinstance(x, HermitianMatrix):
        return PSDMatrix.from_array(x.data)
    return PSDMatrix.from_array(x)


def as_pd(x: ArrayLike | HermitianMatrix, name: str = "Matrix") -> PSDMatrix:
    """as_psd, additionally requiring a strictly positive spectrum."""
    matrix = as_psd(x)
    if not matrix.eigen.values[-1] > 0:
        raise InvalidInput(f"{name} must be strictly positive definite")
    return matrix


def _eigh_array(data: ComplexMatrix) -> EigenDecomposition:
    try:
        values, vectors = scipy.linalg.eigh(data)
    except (ValueError, np.linalg.LinAlgError) as e:
        raise InvalidInput(f"Eigendecomposition failed: {e}") from e
    # descending, ties kept in original index order
    order = np.argsort(-values, kind="stable")
    return EigenDecomposition(vectors[:, order], values[order])


def eigh(a: ArrayLike | HermitianMatrix) -> EigenDecomposition:
    """Eigendecomposition with eigenvalues sorted descending."""
    return as_hermitian(a).eigen


def spectrum(a: ArrayLike | HermitianMatrix) -> RealVector:
    return eigh(a).values


def psd_spectrum(x: ArrayLike) -> RealVector:
    """Clamped descending spectrum of the Hermitian part of a numerically PSD matrix."""
    return as_psd(hermitian_part(as_matrix(x))).eigen.values


def gram_spectrum(g: ArrayLike) -> RealVector:
    """Spectrum of G*G, i.e. of |G|^2, clamped at zero."""
    g = as_matrix(g, square=False)
    return psd_spectrum(dagger(g) @ g)


def matrix_fn(
    a: ArrayLike | HermitianMatrix,
    f: Callable[[RealVector], ArrayLike],
) -> ComplexMatrix:
    """f(A) = U diag(f(lambda)) U*.

    A PSDMatrix argument is evaluated on its clamped spectrum.
    """
    decomposition = as_hermitian(a).eigen
    with np.errstate(all="ignore"):
        mapped = np.asarray(f(decomposition.values))
    bad = ~np.isfinite(mapped)
    if np.any(bad):
        eigenvalue = float(decomposition.values[np.argmax(bad)])
        raise SingularSpectrum("Spectral function undefined", eigenvalue)
    out = (decomposition.vectors * mapped) @ dagger(decomposition.vectors)
    if not np.iscomplexobj(mapped):
        out = hermitian_part(out)
    return out


def power(a: ArrayLike | HermitianMatrix, z: complex) -> ComplexMatrix:
    """A^z for PSD A. Complex exponents need a strictly positive spectrum."""
    psd = as_psd(a)
    if isinstance(z, complex) and z.imag != 0.0:
        return matrix_fn(psd, lambda lam: np.exp(z * np.log(lam)))
    exponent = float(z.real if isinstance(z, complex) else z)
    return matrix_fn(psd, lambda lam: np.power(lam, exponent))


def log(a: ArrayLike | HermitianMatrix) -> ComplexMatrix:
    return matrix_fn(as_psd(a), np.log)


def exp(h: ArrayLike | HermitianMatrix) -> ComplexMatrix:
    return matrix_fn(h, np.exp)


def matrix_abs(x: ArrayLike) -> PSDMatrix:
    """|X| = (X*X)^{1/2}, taken from the right singular vectors of X.

    Rectangular X (n x m) gives an m x m result.
    """
    x = as_matrix(x, square=False)
    try:
        _, singular, vh = scipy.linalg.svd(x, full_matrices=True)
    except (ValueError, np.linalg.LinAlgError) as e:
        raise InvalidInput(f"Singular value decomposition failed: {e}") from e
    values = np.zeros(x.shape[1])
    values[: singular.size] = singular
    return PSDMatrix.from_eigen(dagger(vh), values)


def polar(m: ArrayLike) -> tuple[ComplexMatrix, PSDMatrix]:
    """M = Q |M| with Q unitary."""
    m = as_matrix(m)
    singular = scipy.linalg.svdvals(m)
    ratio = float(singular[-1] / singular[0]) if singular[0] > 0 else 0.0
    if ratio < POLAR_MIN_RATIO:
        raise IllConditioned("Polar decomposition needs an invertible matrix", ratio)
    q, p = scipy.linalg.polar(m, side="right")
    return q, PSDMatrix.from_array(hermitian_part(p))


def _complex_gaussian(rng: np.random.Generator, rows: int, cols: int) -> ComplexMatrix:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def sample(
    kind: SampleKind,
    n: int,
    seed: int | np.random.Generator,
    scale: float = 1.0,
    m: int | None = None,
) -> ComplexMatrix:
    """Draw a seeded random matrix of the requested kind.

    Args:
        kind: psd (G G* + 1e-6 scale I), hermitian ((G + G*)/2), general (G) or unitary.
        n: Row count (and column count unless m is given for kind=general).
        seed: Integer seed or a generator to draw from.
        scale: Magnitude of the draw.
        m: Column count for rectangular general matrices.
    """
    if n < 1:
        raise InvalidInput(f"Dimension must be positive, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if kind == "psd":
        g = np.sqrt(scale) * _complex_gaussian(rng, n, n)
        return hermitian_part(g @ dagger(g)) + PSD_REGULARIZATION * scale * np.eye(n)
    if kind == "hermitian":
        return scale * hermitian_part(_complex_gaussian(rng, n, n))
    if kind == "general":
        return scale * _complex_gaussian(rng, n, m if m is not None else n)
    if kind == "unitary":
        q, r = np.linalg.qr(_complex_gaussian(rng, n, n))
        phases = np.diagonal(r) / np.abs(np.diagonal(r))
        return q * phases
    raise InvalidInput(f"Unknown sample kind: {kind}")
