"""(A_1, ..., A_m) -> exp(H + sum_j p_j log A_j)."""

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
class ExpLogTarget(ProbeTarget):
    kind: ClassVar[str] = "exp_log"
    h: ComplexMatrix
    weights: tuple[float, ...]
    strict: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "h", hermitian.as_hermitian(self.h).data)
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if not self.weights:
            raise InvalidInput("exp_log needs at least one weight")
        for index, weight in enumerate(self.weights):
            check_exponent(f"p_{index + 1}", weight, self.strict)
        if self.strict and sum(self.weights) > 1.0 + 1e-12:
            raise InvalidInput(f"Weights must sum to at most 1, got {sum(self.weights)}")

    @classmethod
    def resolve(
        cls,
        n: int,
        m: int | None,
        rng: np.random.Generator,
        weights: Sequence[float] | None = None,
        strict: bool = True,
    ) -> "ExpLogTarget":
        """Draw m weights with total in [0.1, 1] unless given, then H."""
        if weights is None:
            total = rng.uniform(0.1, 1.0)
            weights = tuple(float(w) for w in total * rng.dirichlet(np.ones(m or 1)))
        return cls(h=hermitian.sample("hermitian", n, rng), weights=tuple(weights), strict=strict)

    @property
    def input_dims(self) -> tuple[int, ...]:
        return (self.h.shape[0],) * len(self.weights)

    @property
    def output_dim(self) -> int:
        return self.h.shape[0]

    def params(self) -> dict[str, Any]:
        return {"weights": list(self.weights)}

    def _exponent(self, inputs: Sequence[ArrayLike]) -> ComplexMatrix:
        matrices = self.check_inputs(inputs)
        return self.h + sum(w * hermitian.log(a) for w, a in zip(self.weights, matrices, strict=True))

    def spectrum(self, inputs: Sequence[ArrayLike]) -> RealVector:
        return np.exp(hermitian.spectrum(hermitian.hermitian_part(self._exponent(inputs))))

    def transform(self, inputs: Sequence[ArrayLike]) -> ComplexMatrix:
        return hermitian.exp(hermitian.hermitian_part(self._exponent(inputs)))
