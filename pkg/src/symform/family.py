"""Holomorphic matrix families G(z) on the strip 0 <= Re z <= 1 and their interpolation exponents."""

import math
from abc import ABC, abstractmethod
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from functools import reduce
from typing import Any, ClassVar

import numpy as np
import structlog
from numpy.typing import ArrayLike

from symform import hermitian
from symform.errors import InvalidInput
from symform.hermitian import ComplexMatrix, PSDMatrix

logger = structlog.get_logger()

PARAMS_TOL = 1e-12
STRIP_TOL = 1e-12


def _reciprocal(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


@dataclass(frozen=True)
class InterpolationParams:
    """Exponents with 1/p_theta = (1 - theta)/p0 + theta/p1; p0 and p1 may be inf."""

    theta: float
    p0: float
    p1: float
    p_theta: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= 1.0:
            raise InvalidInput(f"theta must be in [0, 1], got {self.theta}")
        for name, value in (("p0", self.p0), ("p1", self.p1), ("p_theta", self.p_theta)):
            if math.isnan(value) or value <= 0:
                raise InvalidInput(f"{name} must be a positive extended real, got {value}")
        if math.isinf(self.p_theta):
            raise InvalidInput("p_theta must be finite")
        expected = (1 - self.theta) * _reciprocal(self.p0) + self.theta * _reciprocal(self.p1)
        if abs(_reciprocal(self.p_theta) - expected) > PARAMS_TOL * max(1.0, expected):
            raise InvalidInput(
                f"Inconsistent exponents: 1/p_theta = {_reciprocal(self.p_theta)!r}, expected {expected!r}"
            )

    @classmethod
    def from_endpoints(cls, theta: float, p0: float, p1: float) -> "InterpolationParams":
        inverse = (1 - theta) * _reciprocal(p0) + theta * _reciprocal(p1)
        if inverse <= 0:
            raise InvalidInput("p0 and p1 cannot both be infinite")
        return cls(theta=theta, p0=p0, p1=p1, p_theta=1.0 / inverse)

    @property
    def coefficients(self) -> tuple[float, float]:
        """Weights of the left and right boundary terms, (1-theta) p_theta/p0 and theta p_theta/p1."""
        return (
            (1 - self.theta) * self.p_theta * _reciprocal(self.p0),
            self.theta * self.p_theta * _reciprocal(self.p1),
        )


class GFamily(ABC):
    """A bounded holomorphic matrix-valued function on the closed strip."""

    kind: ClassVar[str]

    def evaluate(self, z: complex) -> ComplexMatrix:
        """G(z); raises InvalidInput when z lies outside 0 <= Re z <= 1."""
        z = complex(z)
        if not -STRIP_TOL <= z.real <= 1 + STRIP_TOL:
            raise InvalidInput(f"z = {z} is outside the strip 0 <= Re z <= 1")
        return self._evaluate(z)

    @abstractmethod
    def _evaluate(self, z: complex) -> ComplexMatrix:
        """Unchecked evaluation."""

    @abstractmethod
    def default_params(self) -> InterpolationParams:
        """The exponents under which the family is used in the concavity proofs."""


def eval_G(family: GFamily, z: complex) -> ComplexMatrix:
    return family.evaluate(z)


@dataclass(frozen=True, eq=False)
class PowerProductFamily(GFamily):
    """G(z) = A_1^z A_2^z ... A_m^z."""

    kind: ClassVar[str] = "power_product"
    factors: tuple[PSDMatrix, ...]

    @classmethod
    def from_inputs(cls, *matrices: ArrayLike) -> "PowerProductFamily":
        if not matrices:
            raise InvalidInput("power_product needs at least one matrix")
        factors = tuple(hermitian.as_pd(a, f"A_{j + 1}") for j, a in enumerate(matrices))
        if len({a.n for a in factors}) != 1:
            raise InvalidInput("power_product factors must share one dimension")
        return cls(factors)

    def _evaluate(self, z: complex) -> ComplexMatrix:
        return reduce(np.matmul, (hermitian.power(a, z) for a in self.factors))

    def default_params(self) -> InterpolationParams:
        return InterpolationParams(theta=0.5, p0=2.0, p1=2.0, p_theta=2.0)


@dataclass(frozen=True, eq=False)
class EpsteinFamily(GFamily):
    """G(z) = X^{rz/2} C^{-rz/2} Q |M|^{z/s} with M = C^{rs/2} K = Q |M|.

    G(it) is unitary and |G(s)|^{2/s} = (K* X^{rs} K)^{1/s}.
    """

    kind: ClassVar[str] = "epstein"
    x: PSDMatrix
    c: PSDMatrix
    q: ComplexMatrix
    abs_m: PSDMatrix
    r: float
    s: float

    @classmethod
    def from_inputs(cls, x: ArrayLike, c: ArrayLike, k: ArrayLike, r: float, s: float) -> "EpsteinFamily":
        _check_unit("r", r)
        _check_unit("s", s)
        x, c = hermitian.as_pd(x, "X"), hermitian.as_pd(c, "C")
        k = hermitian.as_matrix(k)
        if not x.n == c.n == k.shape[0]:
            raise InvalidInput("X, C and K must share one dimension")
        q, abs_m = hermitian.polar(hermitian.power(c, r * s / 2) @ k)
        return cls(x=x, c=c, q=q, abs_m=hermitian.as_pd(abs_m, "|M|"), r=r, s=s)

    def _evaluate(self, z: complex) -> ComplexMatrix:
        return (
            hermitian.power(self.x, self.r * z / 2)
            @ hermitian.power(self.c, -self.r * z / 2)
            @ self.q
            @ hermitian.power(self.abs_m, z / self.s)
        )

    def default_params(self) -> InterpolationParams:
        return InterpolationParams(theta=self.s, p0=math.inf, p1=2.0, p_theta=2.0 / self.s)


@dataclass(frozen=True, eq=False)
class LiebTwoVarFamily(GFamily):
    """G(z) = X_1^{rsz/2} C_1^{-rsz/2} M C_2^{-rs(1-z)/2} X_2^{rs(1-z)/2}, M = C_1^{ps/2} K C_2^{qs/2}.

    K is n x m, so G(z) is n x m and |G(z)| is m x m.
    """

    kind: ClassVar[str] = "lieb_two_var"
    x1: PSDMatrix
    x2: PSDMatrix
    c1: PSDMatrix
    c2: PSDMatrix
    m: ComplexMatrix
    p: float
    q: float
    s: float

    @classmethod
    def from_inputs(
        cls,
        x1: ArrayLike,
        x2: ArrayLike,
        c1: ArrayLike,
        c2: ArrayLike,
        k: ArrayLike,
        p: float,
        q: float,
        s: float,
    ) -> "LiebTwoVarFamily":
        _check_unit("s", s)
        if not (p > 0 and q > 0 and p + q <= 1.0):
            raise InvalidInput(f"Need p, q > 0 with p + q <= 1, got p={p}, q={q}")
        x1, c1 = hermitian.as_pd(x1, "X_1"), hermitian.as_pd(c1, "C_1")
        x2, c2 = hermitian.as_pd(x2, "X_2"), hermitian.as_pd(c2, "C_2")
        k = hermitian.as_matrix(k, square=False)
        if not (x1.n == c1.n == k.shape[0] and x2.n == c2.n == k.shape[1]):
            raise InvalidInput(f"Dimension mismatch: K is {k.shape}, X_1/C_1 are {x1.n}, X_2/C_2 are {x2.n}")
        m = hermitian.power(c1, p * s / 2) @ k @ hermitian.power(c2, q * s / 2)
        return cls(x1=x1, x2=x2, c1=c1, c2=c2, m=m, p=p, q=q, s=s)

    @property
    def r(self) -> float:
        return self.p + self.q

    def _evaluate(self, z: complex) -> ComplexMatrix:
        a = self.r * self.s / 2
        return (
            hermitian.power(self.x1, a * z)
            @ hermitian.power(self.c1, -a * z)
            @ self.m
            @ hermitian.power(self.c2, -a * (1 - z))
            @ hermitian.power(self.x2, a * (1 - z))
        )

    def default_params(self) -> InterpolationParams:
        return InterpolationParams(theta=self.p / self.r, p0=2.0 / self.s, p1=2.0 / self.s, p_theta=2.0 / self.s)


def _check_unit(name: str, value: float) -> None:
    if not 0.0 < value <= 1.0:
        raise InvalidInput(f"{name} must be in (0, 1], got {value}")


FAMILY_KINDS = ("power_product", "epstein", "lieb_two_var")


def make_family(kind: str, inputs: Sequence[ArrayLike], params: Mapping[str, Any]) -> GFamily:
    """Build a family from sampled or loaded matrices.

    power_product takes A_1..A_m. epstein takes (A, B, K) with X = A and C = tau A + (1 - tau) B.
    lieb_two_var takes (A_1, B_1, A_2, B_2, K) with X_i = A_i and C_i = tau A_i + (1 - tau) B_i.
    """
    tau = float(params.get("tau", 0.5))
    if not 0.0 <= tau <= 1.0:
        raise InvalidInput(f"tau must be in [0, 1], got {tau}")
    match kind:
        case "power_product":
            return PowerProductFamily.from_inputs(*inputs)
        case "epstein":
            if len(inputs) != 3:
                raise InvalidInput(f"epstein family takes (A, B, K), got {len(inputs)} matrices")
            a, b, k = (hermitian.as_matrix(x, square=False) for x in inputs)
            c = tau * a + (1 - tau) * b
            return EpsteinFamily.from_inputs(a, c, k, _required(params, "r"), _required(params, "s"))
        case "lieb_two_var":
            if len(inputs) != 5:
                raise InvalidInput(f"lieb_two_var family takes (A_1, B_1, A_2, B_2, K), got {len(inputs)} matrices")
            a1, b1, a2, b2, k = (hermitian.as_matrix(x, square=False) for x in inputs)
            return LiebTwoVarFamily.from_inputs(
                a1,
                a2,
                tau * a1 + (1 - tau) * b1,
                tau * a2 + (1 - tau) * b2,
                k,
                _required(params, "p"),
                _required(params, "q"),
                _required(params, "s"),
            )
    raise InvalidInput(f"Unknown family {kind!r}; expected one of {', '.join(FAMILY_KINDS)}")


def _required(params: Mapping[str, Any], key: str) -> float:
    if params.get(key) is None:
        raise InvalidInput(f"Missing family parameter {key!r}")
    return float(params[key])
