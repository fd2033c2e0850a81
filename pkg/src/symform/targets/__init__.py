"""Concavity probe targets."""

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from symform.errors import InvalidInput
from symform.target import ProbeTarget
from symform.targets.epstein import EpsteinTarget
from symform.targets.exp_log import ExpLogTarget
from symform.targets.lieb import LiebTarget

TARGETS: dict[str, type[ProbeTarget]] = {
    EpsteinTarget.kind: EpsteinTarget,
    LiebTarget.kind: LiebTarget,
    ExpLogTarget.kind: ExpLogTarget,
}


@dataclass(frozen=True)
class TargetDescriptor:
    """A target kind with the parameters fixed by the caller; the rest are drawn per trial.

    n is the row dimension of every argument except lieb's B, which is m x m. For exp_log, m is the
    number of arguments when weights are not given.
    """

    kind: str
    r: float | None = None
    s: float | None = None
    p: float | None = None
    q: float | None = None
    weights: tuple[float, ...] | None = None
    strict: bool = True

    def __post_init__(self) -> None:
        if self.kind not in TARGETS:
            raise InvalidInput(f"Unknown target {self.kind!r}; expected one of {', '.join(TARGETS)}")

    def output_dim(self, n: int, m: int | None = None) -> int:
        if self.kind == LiebTarget.kind and m is not None:
            return m
        return n

    def resolve(self, n: int, m: int | None, rng: np.random.Generator) -> ProbeTarget:
        """Draw one target instance: missing parameters first, then K or H."""
        match self.kind:
            case EpsteinTarget.kind:
                return EpsteinTarget.resolve(n, m, rng, r=self.r, s=self.s, strict=self.strict)
            case LiebTarget.kind:
                return LiebTarget.resolve(n, m, rng, p=self.p, q=self.q, s=self.s, strict=self.strict)
            case ExpLogTarget.kind:
                return ExpLogTarget.resolve(n, m, rng, weights=self.weights, strict=self.strict)
        raise InvalidInput(f"Unknown target {self.kind!r}")

    def build(self, kernel: ArrayLike) -> ProbeTarget:
        """A concrete instance from an explicit K (or H for exp_log); every parameter must be set."""
        missing = [name for name in self._required if getattr(self, name) is None]
        if missing:
            raise InvalidInput(f"Target {self.kind} needs explicit {', '.join(missing)}")
        match self.kind:
            case EpsteinTarget.kind:
                return EpsteinTarget(k=kernel, r=self.r, s=self.s, strict=self.strict)
            case LiebTarget.kind:
                return LiebTarget(k=kernel, p=self.p, q=self.q, s=self.s, strict=self.strict)
        return ExpLogTarget(h=kernel, weights=self.weights, strict=self.strict)

    @property
    def _required(self) -> tuple[str, ...]:
        return {EpsteinTarget.kind: ("r", "s"), LiebTarget.kind: ("p", "q", "s")}.get(self.kind, ("weights",))


__all__ = ["TARGETS", "EpsteinTarget", "ExpLogTarget", "LiebTarget", "TargetDescriptor"]
