"""The beta_theta interpolation density and composite Gauss-Legendre quadrature against it."""

import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import structlog
from numpy.polynomial import legendre
from numpy.typing import ArrayLike, NDArray

from symform.errors import InvalidInput, NumericalFailure

logger = structlog.get_logger()

HALF_LINE_PANELS = 8
HALF_LINE_NODES = 64


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre rule on [-truncation, truncation].

    Attributes:
        truncation: Half-width T of the integration window.
        panels_per_unit: Panels per unit length of the window.
        nodes_per_panel: Gauss-Legendre nodes in each panel.
        abs_tol: Bound the neglected tail mass must stay under.
    """

    truncation: float = 12.0
    panels_per_unit: int = 8
    nodes_per_panel: int = 16
    abs_tol: float = 1e-9

    def __post_init__(self) -> None:
        if not self.truncation > 0:
            raise InvalidInput(f"Quadrature truncation must be positive, got {self.truncation}")
        if self.panels_per_unit < 1 or self.nodes_per_panel < 1:
            raise InvalidInput("Quadrature needs at least one panel per unit and one node per panel")
        if not self.abs_tol > 0:
            raise InvalidInput(f"Quadrature abs_tol must be positive, got {self.abs_tol}")
        if self.tail_bound > self.abs_tol:
            raise InvalidInput(
                f"Truncation T={self.truncation} leaves tail mass {self.tail_bound:.2e} "
                f"above abs_tol={self.abs_tol:.2e}"
            )

    @property
    def tail_bound(self) -> float:
        # sup over theta of sin(pi theta)/(2 theta) is pi/2, times (2/pi) e^{-pi T}
        return math.exp(-math.pi * self.truncation)

    @property
    def nodes(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Nodes and weights of the composite rule, ascending in t."""
        return _composite_rule(self.truncation, self.panels_per_unit, self.nodes_per_panel)


@lru_cache(maxsize=16)
def _composite_rule(truncation: float, panels_per_unit: int, nodes: int) -> tuple[NDArray, NDArray]:
    panels = max(1, math.ceil(2 * truncation * panels_per_unit))
    return _panel_rule(-truncation, truncation, panels, nodes)


def _panel_rule(lo: float, hi: float, panels: int, nodes: int) -> tuple[NDArray, NDArray]:
    x, w = legendre.leggauss(nodes)
    edges = np.linspace(lo, hi, panels + 1)
    half = np.diff(edges)[:, None] / 2
    mid = (edges[:-1] + edges[1:])[:, None] / 2
    t = (mid + half * x).ravel()
    weights = (half * w).ravel()
    t.setflags(write=False)
    weights.setflags(write=False)
    return t, weights


def _check_theta(theta: float) -> None:
    if not 0.0 <= theta <= 1.0:
        raise InvalidInput(f"theta must be in [0, 1], got {theta}")


def is_atomic(theta: float) -> bool:
    """beta_1 is the point mass at t = 0."""
    return theta == 1.0


def beta_density(theta: float, t: ArrayLike) -> float | NDArray[np.float64]:
    """sin(pi theta) / (2 theta (cosh(pi t) + cos(pi theta))).

    theta = 0 takes the limit pi / (2 (cosh(pi t) + 1)). theta = 1 is atomic: the value is 0 off t = 0 and
    inf at t = 0; quadrature evaluates it as a point mass instead.
    """
    _check_theta(theta)
    t = np.asarray(t, dtype=np.float64)
    if is_atomic(theta):
        out = np.where(t == 0.0, np.inf, 0.0)
    elif theta == 0.0:
        out = math.pi / (2 * (np.cosh(math.pi * t) + 1))
    else:
        out = math.sin(math.pi * theta) / (2 * theta * (np.cosh(math.pi * t) + math.cos(math.pi * theta)))
    return float(out) if out.ndim == 0 else out


def _pairwise_sum(weighted: NDArray) -> NDArray:
    # node axis last and contiguous so numpy's pairwise summation applies
    return np.ascontiguousarray(np.moveaxis(weighted, 0, -1)).sum(axis=-1)


def _evaluate_nodes(f: Callable[[float], ArrayLike], t: NDArray) -> NDArray:
    values = []
    for node in t:
        value = np.asarray(f(float(node)))
        if not np.all(np.isfinite(value)):
            raise NumericalFailure(f"Integrand is not finite at t = {node!r}")
        values.append(value)
    return np.stack(values)


def _reduce(values: NDArray, weights: NDArray) -> float | NDArray:
    weighted = weights.reshape((-1,) + (1,) * (values.ndim - 1)) * values
    total = _pairwise_sum(weighted)
    return total.item() if total.ndim == 0 else total


def quad_beta(
    theta: float,
    f: Callable[[float], ArrayLike],
    spec: QuadratureSpec | None = None,
) -> float | NDArray:
    """Integrate f against beta_theta over the real line.

    f may return scalars or arrays of a fixed shape; the result has the same shape.
    """
    _check_theta(theta)
    if is_atomic(theta):
        value = np.asarray(f(0.0))
        if not np.all(np.isfinite(value)):
            raise NumericalFailure("Integrand is not finite at t = 0.0")
        return value.item() if value.ndim == 0 else value
    spec = spec or QuadratureSpec()
    t, w = spec.nodes
    values = _evaluate_nodes(f, t)
    return _reduce(values, w * beta_density(theta, t))


def quad_half_line(
    f: Callable[[float], ArrayLike],
    panels: int = HALF_LINE_PANELS,
    nodes: int = HALF_LINE_NODES,
) -> float | NDArray:
    """Integrate f over [0, inf) through t = u / (1 - u), dt = du / (1 - u)^2.

    Suited to integrands decaying at least like t^-2.
    """
    u, w = _panel_rule(0.0, 1.0, panels, nodes)
    values = _evaluate_nodes(lambda x: f(x / (1.0 - x)), u)
    return _reduce(values, w / (1.0 - u) ** 2)
