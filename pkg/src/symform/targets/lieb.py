"""(A, B) -> (B^{qs/2} K* A^{ps} K B^{qs/2})^{1/s}, jointly concave under phi for p + q <= 1."""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np
from numpy.typing import ArrayLike

from symform import hermitian
from symform.errors import InvalidInput
from symform.hermitian import ComplexMatrix, RealVector
from symform.target import ProbeTarget, check_exponent


@dataclass(frozen=True, eq=False)
class LiebTarget(ProbeTarget):
    """Two-argument target; K is n x m, A is n x n and B is m x m.

    strict=False lifts the p + q <= 1 constraint, which is how the probes are checked for power.
    """

    kind: ClassVar[str] = "lieb"
    k: ComplexMatrix
    p: float
    q: float
    s: float
    strict: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", hermitian.as_matrix(self.k, square=False))
        check_exponent("p", self.p, self.strict)
        check_exponent("q", self.q, self.strict)
        check_exponent("s", self.s, self.strict)
        if self.strict and self.p + self.q > 1.0:
            raise InvalidInput(f"Need p + q <= 1, got p + q = {self.p + self.q}")

    @classmethod
    def resolve(
        cls,
        n: int,
        m: int | None,
        rng: np.random.Generator,
        p: float | None = None,
        q: float | None = None,
        s: float | None = None,
        strict: bool = True,
    ) -> "LiebTarget":
        """Fill unset exponents (p + q drawn from [0.1, 1]) and draw K."""
        if p is None and q is None:
            total, split = rng.uniform(0.1, 1.0), rng.uniform(0.1, 0.9)
            p, q = float(total * split), float(total * (1.0 - split))
        elif p is None or q is None:
            fixed = q if p is None else p
            if strict and not fixed < 1.0:
                raise InvalidInput(f"Cannot complete p + q <= 1 from a fixed exponent {fixed}")
            other = float(rng.uniform(0.1, 1.0) * (1.0 - fixed)) if fixed < 1.0 else float(rng.uniform(0.1, 1.0))
            p, q = (other, fixed) if p is None else (fixed, other)
        s = float(rng.uniform(0.1, 1.0)) if s is None else s
        cols = m if m is not None else n
        return cls(k=hermitian.sample("general", n, rng, m=cols), p=p, q=q, s=s, strict=strict)

    @property
    def input_dims(self) -> tuple[int, ...]:
        return self.k.shape

    @property
    def output_dim(self) -> int:
        return self.k.shape[1]

    def params(self) -> dict[str, Any]:
        return {"p": self.p, "q": self.q, "s": self.s}

    def _inner(self, inputs: Sequence[ArrayLike]) -> ComplexMatrix:
        a, b = self.check_inputs(inputs)
        half = hermitian.power(b, self.q * self.s / 2)
        return half @ hermitian.dagger(self.k) @ hermitian.power(a, self.p * self.s) @ self.k @ half

    def spectrum(self, inputs: Sequence[ArrayLike]) -> RealVector:
        return hermitian.psd_spectrum(self._inner(inputs)) ** (1.0 / self.s)

    def transform(self, inputs: Sequence[ArrayLike]) -> ComplexMatrix:
        return hermitian.power(hermitian.hermitian_part(self._inner(inputs)), 1.0 / self.s)
