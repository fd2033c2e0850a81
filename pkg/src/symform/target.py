"""Probe target interface: matrix maps F whose composition with a symmetric form should be concave."""

from abc import ABC, abstractmethod
from collections.abc import Sequence
from typing import Any, ClassVar

import numpy as np
from numpy.typing import ArrayLike

from symform import hermitian
from symform.errors import InvalidInput
from symform.forms import FormDescriptor, eval_form
from symform.hermitian import ComplexMatrix, RealVector


class ProbeTarget(ABC):
    """A map (A_1, ..., A_arity) -> F(A_1, ..., A_arity) on PD arguments with PSD values."""

    kind: ClassVar[str]

    strict: bool = True

    @property
    @abstractmethod
    def input_dims(self) -> tuple[int, ...]:
        """Dimension of each matrix argument."""
        pass

    @property
    def arity(self) -> int:
        return len(self.input_dims)

    @property
    @abstractmethod
    def output_dim(self) -> int:
        pass

    @abstractmethod
    def params(self) -> dict[str, Any]:
        """Scalar parameters of this instance, for reports."""
        pass

    @abstractmethod
    def spectrum(self, inputs: Sequence[ArrayLike]) -> RealVector:
        """Eigenvalues of F(inputs), descending."""
        pass

    @abstractmethod
    def transform(self, inputs: Sequence[ArrayLike]) -> ComplexMatrix:
        """F(inputs) as a matrix."""
        pass

    def check_inputs(self, inputs: Sequence[ArrayLike]) -> list[hermitian.PSDMatrix]:
        if len(inputs) != self.arity:
            raise InvalidInput(f"{self.kind} target takes {self.arity} matrices, got {len(inputs)}")
        matrices = [hermitian.as_psd(x) for x in inputs]
        for index, (matrix, dim) in enumerate(zip(matrices, self.input_dims, strict=True)):
            if matrix.n != dim:
                raise InvalidInput(f"Argument {index} of the {self.kind} target must be {dim}x{dim}, got {matrix.n}")
        return matrices

    def sample_inputs(self, rng: np.random.Generator) -> list[ComplexMatrix]:
        return [hermitian.sample("psd", dim, rng) for dim in self.input_dims]


def eval_target(target: ProbeTarget, phi: FormDescriptor, inputs: Sequence[ArrayLike]) -> float:
    """phi(F(inputs))."""
    return eval_form(phi, target.spectrum(inputs))


def check_exponent(name: str, value: float, strict: bool = True) -> float:
    """Exponents live in (0, 1]; unchecked targets only need them positive."""
    value = float(value)
    if not value > 0.0 or (strict and value > 1.0):
        raise InvalidInput(f"{name} must be {'in (0, 1]' if strict else 'positive'}, got {value}")
    return value
