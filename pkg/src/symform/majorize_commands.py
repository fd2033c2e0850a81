"""Majorization commands for the symform CLI."""

from typing import Any

import numpy as np
from cyclopts import App

from symform import majorization
from symform.errors import InvalidInput
from symform.forms import FormDescriptor
from symform.hermitian import RealVector
from symform.serialization import dumps_report, load_matrix

majorize_app = App(name="majorize", help="Majorization verdicts and witnesses")


def parse_vector(text: str, name: str = "vector") -> RealVector:
    """Parse a comma-separated list of numbers such as "3,1,0.5"."""
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise InvalidInput(f"{name} must be comma-separated numbers, got {text!r}") from e
    if not values or not np.all(np.isfinite(values)):
        raise InvalidInput(f"{name} must hold at least one finite number, got {text!r}")
    return np.array(values)


def _print(document: Any) -> int:
    print(dumps_report(document), end="")
    return 0


def _verdict_document(result: majorization.MajorizationVerdict) -> dict[str, Any]:
    return {
        "weak": result.weak,
        "strict": result.strict,
        "prefix_slacks": result.prefix_slacks,
        "sum_gap": result.sum_gap,
        "det_gap": result.det_gap,
    }


@majorize_app.command
def verdict(a: str, b: str, log_domain: bool = False) -> int:
    """Check whether a is (weakly) majorized by b.

    Args:
        a: Comma-separated entries of a
        b: Comma-separated entries of b
        log_domain: Compare logarithms of the entries (log-majorization)
    """
    from symform.cli import handle_errors

    def action() -> int:
        result = majorization.verdict(parse_vector(a, "a"), parse_vector(b, "b"), log_domain=log_domain)
        return _print(_verdict_document(result))

    return handle_errors(action)


@majorize_app.command
def bridge(a: str, b: str) -> int:
    """Find c with a <= c entrywise and c majorized by b, for a weakly majorized by b."""
    from symform.cli import handle_errors

    return handle_errors(lambda: _print({"c": majorization.bridge(parse_vector(a, "a"), parse_vector(b, "b"))}))


@majorize_app.command
def ds(a: str, b: str) -> int:
    """Build a doubly stochastic D with a = D b, for a majorized by b."""
    from symform.cli import handle_errors

    def action() -> int:
        x, y = parse_vector(a, "a"), parse_vector(b, "b")
        d = majorization.ds_from_majorization(x, y)
        return _print({"d": d.matrix, "residual": float(np.max(np.abs(d.matrix @ y - x)))})

    return handle_errors(action)


@majorize_app.command
def birkhoff(a: str, b: str) -> int:
    """Decompose the doubly stochastic D with a = D b into weighted permutations."""
    from symform.cli import handle_errors

    def action() -> int:
        d = majorization.ds_from_majorization(parse_vector(a, "a"), parse_vector(b, "b"))
        terms = majorization.birkhoff(d)
        rebuilt = sum(weight * majorization.permutation_matrix(perm) for weight, perm in terms)
        return _print(
            {
                "terms": [{"weight": weight, "permutation": list(perm)} for weight, perm in terms],
                "reconstruction_error": float(np.max(np.abs(rebuilt - d.matrix))),
            }
        )

    return handle_errors(action)


@majorize_app.command
def eigen(a: str, b: str, relation: str = "sum") -> int:
    """Spectral majorization of two matrix files.

    Args:
        a: Path to the JSON matrix A
        b: Path to the JSON matrix B
        relation: "sum" for lambda(A+B) against lambda(A)+lambda(B), "product" for log lambda(|AB|)
    """
    from symform.cli import handle_errors

    def action() -> int:
        result = majorization.eigen_majorization_check(load_matrix(a), load_matrix(b), relation)
        return _print({"relation": relation, **_verdict_document(result)})

    return handle_errors(action)


@majorize_app.command
def symmetric(a: str, b: str, form: str = "trace") -> int:
    """Check phi(b) <= phi(a) for a majorized by b and a concave symmetric form phi."""
    from symform.cli import handle_errors

    def action() -> int:
        result = majorization.check_symmetric_consequence(
            FormDescriptor.parse(form), parse_vector(a, "a"), parse_vector(b, "b")
        )
        _print(result)
        return 0 if result.passed else 1

    return handle_errors(action)
