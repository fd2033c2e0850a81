"""A -> (K* A^{rs} K)^{1/s}."""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, ClassVar

import numpy as np
from numpy.typing import ArrayLike

from symform import hermitian
from symform.hermitian import ComplexMatrix, RealVector
from symform.target import ProbeTarget, check_exponent


@dataclass(frozen=True, eq=False)
class EpsteinTarget(ProbeTarget):
    """Single-argument target; K is n x n."""

    kind: ClassVar[str] = "epstein"
    k: ComplexMatrix
    r: float
    s: float
    strict: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", hermitian.as_matrix(self.k))
        check_exponent("r", self.r, self.strict)
        check_exponent("s", self.s, self.strict)

    @classmethod
    def resolve(
        cls,
        n: int,
        m: int | None,
        rng: np.random.Generator,
        r: float | None = None,
        s: float | None = None,
        strict: bool = True,
    ) -> "EpsteinTarget":
        """Fill unset exponents from [0.1, 1] and draw K."""
        r = float(rng.uniform(0.1, 1.0)) if r is None else r
        s = float(rng.uniform(0.1, 1.0)) if s is None else s
        return cls(k=hermitian.sample("general", n, rng), r=r, s=s, strict=strict)

    @property
    def input_dims(self) -> tuple[int, ...]:
        return (self.k.shape[0],)

    @property
    def output_dim(self) -> int:
        return self.k.shape[1]

    def params(self) -> dict[str, Any]:
        return {"r": self.r, "s": self.s}

    def _inner(self, inputs: Sequence[ArrayLike]) -> ComplexMatrix:
        (a,) = self.check_inputs(inputs)
        return hermitian.dagger(self.k) @ hermitian.power(a, self.r * self.s) @ self.k

    def spectrum(self, inputs: Sequence[ArrayLike]) -> RealVector:
        return hermitian.psd_spectrum(self._inner(inputs)) ** (1.0 / self.s)

    def transform(self, inputs: Sequence[ArrayLike]) -> ComplexMatrix:
        return hermitian.power(hermitian.hermitian_part(self._inner(inputs)), 1.0 / self.s)
