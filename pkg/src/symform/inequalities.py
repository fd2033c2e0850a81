"""Numerical verifiers for the matrix trace inequalities and the interpolation bound."""

import math
from collections.abc import Callable, Mapping, Sequence
from functools import reduce
from typing import Any

import numpy as np
import structlog
from numpy.typing import ArrayLike

from symform import hermitian, majorization
from symform.errors import InvalidInput, NumericalFailure, PreconditionFailed, SymformError
from symform.family import GFamily, InterpolationParams, make_family
from symform.forms import FormDescriptor, eval_form, form_of_power
from symform.hermitian import ComplexMatrix, RealVector
from symform.models import IneqResult
from symform.quadrature import QuadratureSpec, quad_beta, quad_half_line
from symform.trials import inputs_digest

logger = structlog.get_logger()

INEQ_NAMES = (
    "matrix_hoelder",
    "alt",
    "alt_chain",
    "gt",
    "exp_convex",
    "multi_gt",
    "t_identity",
    "three_matrix",
    "lie_product",
    "interpolation",
)
# these hold for every symmetric form
HOELDER_FREE = frozenset({"lie_product", "t_identity"})

T_IDENTITY_TOL = 1e-6
LIE_TOL = 1e-4
LIE_STEPS = 8
DIVDIFF_TOL = 1e-12
PREFIX_TOL = 1e-8
HOELDER_CHOICES = (1.25, 2.0, 4.0, math.inf)

Params = Mapping[str, Any]


def ineq_tolerance(rhs: float) -> float:
    return 1e-8 * max(1.0, abs(rhs))


def _abs_power_spectrum(g: ComplexMatrix, p: float) -> RealVector:
    """Spectrum of |G|^p."""
    return hermitian.gram_spectrum(g) ** (p / 2)


def _exp_spectrum(h: ArrayLike) -> RealVector:
    return np.exp(hermitian.spectrum(h))


def _exp_of(h: ArrayLike, scale: complex = 1.0) -> ComplexMatrix:
    return hermitian.matrix_fn(h, lambda lam: np.exp(scale * lam))


# interpolation


def check_interpolation(
    phi: FormDescriptor,
    family: GFamily,
    params: InterpolationParams | None = None,
    spec: QuadratureSpec | None = None,
) -> IneqResult:
    """phi(|G(theta)|^{p_theta}) against the beta-weighted boundary integrals.

    A boundary term whose coefficient vanishes (p0 or p1 infinite, or theta at an endpoint) is dropped.
    """
    params = params or family.default_params()
    spec = spec or QuadratureSpec()
    theta = params.theta
    c0, c1 = params.coefficients

    lhs = eval_form(phi, _abs_power_spectrum(family.evaluate(theta), params.p_theta))
    terms: dict[str, float] = {}
    if c0 > 0:
        terms["left"] = quad_beta(
            1 - theta,
            lambda t: eval_form(phi, _abs_power_spectrum(family.evaluate(1j * t), params.p0)),
            spec,
        )
    if c1 > 0:
        terms["right"] = quad_beta(
            theta,
            lambda t: eval_form(phi, _abs_power_spectrum(family.evaluate(1 + 1j * t), params.p1)),
            spec,
        )
    rhs = c0 * terms.get("left", 0.0) + c1 * terms.get("right", 0.0)

    prefix = interpolation_prefix_check(family, params, spec)
    details = {
        "family": family.kind,
        "theta": theta,
        "p0": params.p0,
        "p1": params.p1,
        "p_theta": params.p_theta,
        "coefficients": [c0, c1],
        "boundary_terms": terms,
        "prefix_slacks": None if prefix is None else prefix[0].tolist(),
        "prefix_pass": None if prefix is None else prefix[1],
    }
    return IneqResult(name="interpolation", lhs=lhs, rhs=rhs, tol=ineq_tolerance(rhs), details=details)


def _log_abs_power(g: ComplexMatrix, p: float) -> RealVector:
    values = hermitian.gram_spectrum(g)
    if not values[-1] > 0:
        raise NumericalFailure("Boundary spectrum has a zero eigenvalue")
    return (p / 2) * np.log(values)


def interpolation_prefix_check(
    family: GFamily,
    params: InterpolationParams | None = None,
    spec: QuadratureSpec | None = None,
) -> tuple[RealVector, bool] | None:
    """Top-k log-eigenvalue sums of |G(theta)|^{p_theta} against the same interpolation integrals.

    Returns the prefix slacks (k = 1..n) and whether all are nonnegative within tolerance, or None when a
    spectrum involved is too close to singular for logarithms.
    """
    params = params or family.default_params()
    spec = spec or QuadratureSpec()
    theta = params.theta
    c0, c1 = params.coefficients

    values = hermitian.gram_spectrum(family.evaluate(theta))
    if not values[-1] > hermitian.PSD_CLAMP * values[0]:
        return None
    lhs = (params.p_theta / 2) * np.log(values)
    rhs = np.zeros_like(lhs)
    try:
        if c0 > 0:
            rhs += c0 * quad_beta(1 - theta, lambda t: _log_abs_power(family.evaluate(1j * t), params.p0), spec)
        if c1 > 0:
            rhs += c1 * quad_beta(theta, lambda t: _log_abs_power(family.evaluate(1 + 1j * t), params.p1), spec)
    except SymformError as e:
        logger.debug("Prefix check skipped", reason=str(e))
        return None

    result = majorization.verdict(lhs, rhs)
    passed = bool(np.all(result.prefix_slacks >= -PREFIX_TOL * result.scale))
    return result.prefix_slacks, passed


# the T operator


def t_op(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    """T_A[B] = integral over t >= 0 of (A + t)^-1 B (A + t)^-1, in closed form.

    In the eigenbasis of A the entries of B are scaled by the divided difference of log on the spectrum.
    """
    a = hermitian.as_pd(a, "A")
    b = hermitian.as_hermitian(b)
    if a.n != b.n:
        raise InvalidInput(f"A and B must have the same dimension, got {a.n} and {b.n}")
    values, vectors = a.eigen.values, a.eigen.vectors
    rotated = hermitian.dagger(vectors) @ b.data @ vectors

    la, lb = values[:, None], values[None, :]
    diff = la - lb
    close = np.abs(diff) <= DIVDIFF_TOL * np.maximum(la, lb)
    divided = np.where(close, 1.0 / la, (np.log(la) - np.log(lb)) / np.where(close, 1.0, diff))
    return hermitian.hermitian_part(vectors @ (rotated * divided) @ hermitian.dagger(vectors))


def t_op_quadrature(a: ArrayLike, b: ArrayLike) -> ComplexMatrix:
    """T_A[B] by direct quadrature of the defining integral."""
    a, b = hermitian.as_matrix(a), hermitian.as_matrix(b)
    eye = np.eye(a.shape[0])

    def integrand(t: float) -> ComplexMatrix:
        resolvent = np.linalg.solve(a + t * eye, eye)
        return resolvent @ b @ resolvent

    return hermitian.hermitian_part(quad_half_line(integrand))


# named checks


def _hermitians(name: str, inputs: Sequence[ArrayLike], count: int | None = None) -> list[ComplexMatrix]:
    if count is not None and len(inputs) != count:
        raise InvalidInput(f"{name} takes {count} matrices, got {len(inputs)}")
    matrices = [hermitian.as_hermitian(x).data for x in inputs]
    if len({x.shape for x in matrices}) > 1:
        raise InvalidInput(f"{name} needs matrices of one dimension")
    return matrices


def _psds(name: str, inputs: Sequence[ArrayLike], count: int) -> list[hermitian.PSDMatrix]:
    matrices = _hermitians(name, inputs, count)
    return [hermitian.as_psd(x) for x in matrices]


def _matrix_hoelder(phi: FormDescriptor, inputs: Sequence[ArrayLike], params: Params, _: QuadratureSpec) -> IneqResult:
    a, b = _psds("matrix_hoelder", inputs, 2)
    p = float(params.get("p", 2.0))
    if not p >= 1.0:
        raise InvalidInput(f"Hölder exponent must be >= 1, got {p}")
    q = 1.0 if math.isinf(p) else (math.inf if p == 1.0 else p / (p - 1.0))
    lhs = eval_form(phi, hermitian.matrix_abs(a.data @ b.data).eigen.values)
    rhs = form_of_power(phi, a.eigen.values, p) * form_of_power(phi, b.eigen.values, q)
    return IneqResult("matrix_hoelder", lhs, rhs, ineq_tolerance(rhs), details={"p": p, "q": q})


def _alt_value(phi: FormDescriptor, a: hermitian.PSDMatrix, b: hermitian.PSDMatrix, t: float) -> float:
    # lambda(B^{t/2} A^t B^{t/2}) = sigma(A^{t/2} B^{t/2})^2
    product = hermitian.power(a, t / 2) @ hermitian.power(b, t / 2)
    return eval_form(phi, hermitian.matrix_abs(product).eigen.values ** (2.0 / t))


def _alt(phi: FormDescriptor, inputs: Sequence[ArrayLike], params: Params, _: QuadratureSpec) -> IneqResult:
    a, b = _psds("alt", inputs, 2)
    t, s = float(params.get("t", 0.5)), float(params.get("s", 1.0))
    if not 0.0 < t <= s:
        raise InvalidInput(f"alt needs 0 < t <= s, got t={t}, s={s}")
    lhs, rhs = _alt_value(phi, a, b, t), _alt_value(phi, a, b, s)
    return IneqResult("alt", lhs, rhs, ineq_tolerance(rhs), details={"t": t, "s": s})


def _alt_chain(phi: FormDescriptor, inputs: Sequence[ArrayLike], params: Params, _: QuadratureSpec) -> IneqResult:
    a, b = _psds("alt_chain", inputs, 2)
    ts = [float(t) for t in params.get("ts", (0.25, 0.5, 1.0))]
    if len(ts) != 3 or not 0.0 < ts[0] < ts[1] < ts[2] <= 1.0:
        raise InvalidInput(f"alt_chain needs 0 < t1 < t2 < t3 <= 1, got {ts}")
    values = [_alt_value(phi, a, b, t) for t in ts]
    # the worst decrease along the chain must not exceed tolerance
    drop = max(values[0] - values[1], values[1] - values[2])
    return IneqResult("alt_chain", drop, 0.0, ineq_tolerance(max(values)), details={"ts": ts, "values": values})


def _gt(phi: FormDescriptor, inputs: Sequence[ArrayLike], params: Params, _: QuadratureSpec) -> IneqResult:
    a, b = _hermitians("gt", inputs, 2)
    lhs = eval_form(phi, _exp_spectrum(a + b))
    exp_a, exp_b = _exp_of(a), _exp_of(b)
    rhs = eval_form(phi, hermitian.matrix_abs(exp_a @ exp_b).eigen.values)
    half = _exp_of(a, 0.5)
    product_rhs = eval_form(phi, hermitian.psd_spectrum(half @ exp_b @ half))
    return IneqResult("gt", lhs, rhs, ineq_tolerance(rhs), details={"product_rhs": product_rhs})


def _exp_convex(phi: FormDescriptor, inputs: Sequence[ArrayLike], params: Params, _: QuadratureSpec) -> IneqResult:
    a, b = _hermitians("exp_convex", inputs, 2)
    tau = float(params.get("tau", 0.5))
    if not 0.0 <= tau <= 1.0:
        raise InvalidInput(f"tau must be in [0, 1], got {tau}")
    lhs = eval_form(phi, _exp_spectrum(tau * a + (1 - tau) * b))
    rhs = tau * eval_form(phi, _exp_spectrum(a)) + (1 - tau) * eval_form(phi, _exp_spectrum(b))
    return IneqResult("exp_convex", lhs, rhs, ineq_tolerance(rhs), details={"tau": tau})


def _multi_gt(phi: FormDescriptor, inputs: Sequence[ArrayLike], params: Params, spec: QuadratureSpec) -> IneqResult:
    hs = _hermitians("multi_gt", inputs)
    if not hs:
        raise InvalidInput("multi_gt needs at least one matrix")
    p = float(params.get("p", 2.0))
    if not p > 0:
        raise InvalidInput(f"multi_gt exponent must be positive, got {p}")

    lhs = math.log(eval_form(phi, _exp_spectrum(sum(hs)) ** p))
    node_values: list[float] = []

    def integrand(t: float) -> float:
        product = reduce(np.matmul, (_exp_of(h, 1 + 1j * t) for h in hs))
        value = math.log(eval_form(phi, _abs_power_spectrum(product, p)))
        node_values.append(value)
        return value

    rhs = quad_beta(0.0, integrand, spec)
    details = {"m": len(hs), "p": p, "integrand_std": float(np.std(node_values))}
    return IneqResult("multi_gt", lhs, rhs, ineq_tolerance(rhs), details=details)


def _t_identity(phi: FormDescriptor, inputs: Sequence[ArrayLike], params: Params, spec: QuadratureSpec) -> IneqResult:
    if len(inputs) != 2:
        raise InvalidInput(f"t_identity takes (A, B), got {len(inputs)} matrices")
    a = hermitian.as_pd(inputs[0], "A")
    b = hermitian.as_hermitian(inputs[1]).data
    inverse = hermitian.power(a, -1.0)

    defining = t_op_quadrature(inverse, b)
    interpolated = quad_beta(
        0.0,
        lambda t: hermitian.power(a, (1 + 1j * t) / 2) @ b @ hermitian.power(a, (1 - 1j * t) / 2),
        spec,
    )
    difference = float(np.max(np.abs(defining - interpolated)))
    closed_form = float(np.max(np.abs(t_op(inverse, b) - defining)))
    details = {"closed_form_deviation": closed_form}
    return IneqResult("t_identity", difference, 0.0, T_IDENTITY_TOL, details=details)


def _three_matrix(phi: FormDescriptor, inputs: Sequence[ArrayLike], params: Params, _: QuadratureSpec) -> IneqResult:
    a1, a2, a3 = _hermitians("three_matrix", inputs, 3)
    lhs = eval_form(phi, _exp_spectrum(a1 + a2 + a3))
    t = t_op(_exp_of(a2, -1.0), _exp_of(a3))
    half = _exp_of(a1, 0.5)
    # P^{1/2} T P^{1/2} is similar to P T
    rhs = eval_form(phi, hermitian.psd_spectrum(half @ t @ half))
    abs_reading = eval_form(phi, hermitian.matrix_abs(_exp_of(a1) @ t).eigen.values)
    return IneqResult("three_matrix", lhs, rhs, ineq_tolerance(rhs), details={"abs_reading": abs_reading})


def _lie_product(phi: FormDescriptor, inputs: Sequence[ArrayLike], params: Params, _: QuadratureSpec) -> IneqResult:
    hs = _hermitians("lie_product", inputs)
    if len(hs) < 2:
        raise InvalidInput(f"lie_product needs at least two matrices, got {len(hs)}")
    steps = int(params.get("steps", LIE_STEPS))
    target = _exp_of(sum(hs))
    norm = max(1.0, float(np.max(np.abs(target))))

    errors: list[float] = []
    for j in range(1, steps + 1):
        t = 2.0**-j
        outer = [_exp_of(h, t / 2) for h in hs[1:]]
        split = reduce(np.matmul, outer[::-1]) @ _exp_of(hs[0], t) @ reduce(np.matmul, outer)
        root = hermitian.power(hermitian.hermitian_part(split), 1.0 / t)
        errors.append(float(np.max(np.abs(root - target))) / norm)

    monotone = all(later <= earlier + 1e-12 for earlier, later in zip(errors, errors[1:], strict=False))
    details = {"steps": [2.0**-j for j in range(1, steps + 1)], "errors": errors, "monotone": monotone}
    return IneqResult("lie_product", errors[-1], LIE_TOL, 0.0, details=details, conditions_met=monotone)


def _interpolation(
    phi: FormDescriptor, inputs: Sequence[ArrayLike], params: Params, spec: QuadratureSpec
) -> IneqResult:
    family = make_family(params.get("family", "power_product"), inputs, params)
    if any(params.get(key) is not None for key in ("theta", "p0", "p1")):
        defaults = family.default_params()
        exponents = InterpolationParams.from_endpoints(
            float(params.get("theta", defaults.theta)),
            float(params.get("p0", defaults.p0)),
            float(params.get("p1", defaults.p1)),
        )
    else:
        exponents = None
    return check_interpolation(phi, family, exponents, spec)


CHECKS: dict[str, Callable[[FormDescriptor, Sequence[ArrayLike], Params, QuadratureSpec], IneqResult]] = {
    "matrix_hoelder": _matrix_hoelder,
    "alt": _alt,
    "alt_chain": _alt_chain,
    "gt": _gt,
    "exp_convex": _exp_convex,
    "multi_gt": _multi_gt,
    "t_identity": _t_identity,
    "three_matrix": _three_matrix,
    "lie_product": _lie_product,
    "interpolation": _interpolation,
}


def inequality_check(
    name: str,
    phi: FormDescriptor,
    inputs: Sequence[ArrayLike],
    params: Params | None = None,
    spec: QuadratureSpec | None = None,
) -> IneqResult:
    """Evaluate one named inequality on explicit inputs.

    Every check except lie_product and t_identity needs a Hölder form; set params["force"] to run anyway.
    """
    if name not in CHECKS:
        raise InvalidInput(f"Unknown inequality {name!r}; expected one of {', '.join(INEQ_NAMES)}")
    params = params or {}
    if not inputs:
        raise InvalidInput(f"{name} needs input matrices")
    n = hermitian.as_matrix(inputs[0], square=False).shape[0]
    if name not in HOELDER_FREE and not phi.is_hoelder(n) and not params.get("force"):
        raise PreconditionFailed(f"{phi} is not a Hölder form in dimension {n}")

    result = CHECKS[name](phi, inputs, params, spec or QuadratureSpec())
    result.inputs_digest = inputs_digest(inputs)
    logger.debug("Inequality evaluated", name=name, form=str(phi), slack=result.slack, passed=result.passed)
    return result


def sample_params(name: str, rng: np.random.Generator, fixed: Params | None = None) -> dict[str, Any]:
    """Draw the free parameters of a check; values in fixed win."""
    fixed = {key: value for key, value in (fixed or {}).items() if value is not None}
    sampled: dict[str, Any] = {}
    match name:
        case "matrix_hoelder":
            sampled["p"] = float(HOELDER_CHOICES[rng.integers(len(HOELDER_CHOICES))])
        case "alt":
            t, s = np.sort(rng.uniform(0.1, 3.0, 2))
            sampled |= {"t": float(t), "s": float(s)}
        case "alt_chain":
            sampled["ts"] = [float(t) for t in np.sort(rng.uniform(0.05, 1.0, 3))]
        case "exp_convex":
            sampled["tau"] = float(rng.uniform())
        case "interpolation":
            family = fixed.get("family", "power_product")
            if family == "epstein":
                sampled |= {"r": float(rng.uniform(0.1, 1.0)), "s": float(rng.uniform(0.1, 1.0))}
            elif family == "lieb_two_var":
                total, split = rng.uniform(0.1, 1.0), rng.uniform(0.1, 0.9)
                sampled |= {"p": float(total * split), "q": float(total * (1 - split))}
                sampled["s"] = float(rng.uniform(0.1, 1.0))
            sampled["tau"] = float(rng.uniform())
    return sampled | fixed


def sample_inputs(
    name: str,
    rng: np.random.Generator,
    n: int,
    m: int | None = None,
    params: Params | None = None,
) -> list[ComplexMatrix]:
    """Seeded inputs of the right kind and arity for a named check."""
    params = params or {}
    match name:
        case "matrix_hoelder" | "alt" | "alt_chain":
            return [hermitian.sample("psd", n, rng) for _ in range(2)]
        case "gt" | "exp_convex":
            return [hermitian.sample("hermitian", n, rng) for _ in range(2)]
        case "multi_gt":
            return [hermitian.sample("hermitian", n, rng) for _ in range(m or 3)]
        case "three_matrix":
            return [hermitian.sample("hermitian", n, rng) for _ in range(3)]
        case "t_identity":
            return [hermitian.sample("psd", n, rng), hermitian.sample("hermitian", n, rng)]
        case "lie_product":
            return [hermitian.sample("hermitian", n, rng, scale=0.5) for _ in range(m or 2)]
        case "interpolation":
            family = params.get("family", "power_product")
            if family == "epstein":
                return [*(hermitian.sample("psd", n, rng) for _ in range(2)), hermitian.sample("general", n, rng)]
            if family == "lieb_two_var":
                cols = m or n
                return [
                    hermitian.sample("psd", n, rng),
                    hermitian.sample("psd", n, rng),
                    hermitian.sample("psd", cols, rng),
                    hermitian.sample("psd", cols, rng),
                    hermitian.sample("general", n, rng, m=cols),
                ]
            return [hermitian.sample("psd", n, rng) for _ in range(m or 2)]
    raise InvalidInput(f"Unknown inequality {name!r}; expected one of {', '.join(INEQ_NAMES)}")
