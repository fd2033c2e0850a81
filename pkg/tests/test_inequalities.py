"""Tests for the named trace inequalities, the T operator and the interpolation bound."""

import math

import numpy as np
import pytest

from symform import hermitian, inequalities
from symform.errors import InvalidInput, PreconditionFailed
from symform.family import EpsteinFamily, PowerProductFamily
from symform.forms import FormDescriptor
from symform.inequalities import inequality_check, sample_inputs, sample_params
from symform.quadrature import QuadratureSpec

# coarser than the default rule, still within the tail bound
SPEC = QuadratureSpec(truncation=7.0, panels_per_unit=4)

HOELDER_FORMS = ["trace", "ktrace:k=2", "ktrace:k=3", "gk:k=2", "seminorm:p=0.3", "seminorm:p=0.5"]
PSD_CHECKS = {"matrix_hoelder", "alt", "alt_chain"}


def _draw(name: str, seed: int, n: int = 3, m: int | None = None, fixed: dict | None = None) -> tuple[list, dict]:
    rng = np.random.default_rng(seed)
    params = sample_params(name, rng, fixed)
    return sample_inputs(name, rng, n, m, params), params


def test_ineq_tolerance() -> None:
    """Test the relative tolerance floor."""
    assert inequalities.ineq_tolerance(0.5) == pytest.approx(1e-8)
    assert inequalities.ineq_tolerance(-200.0) == pytest.approx(2e-6)


@pytest.mark.parametrize("name", ["matrix_hoelder", "alt", "alt_chain", "gt", "exp_convex"])
@pytest.mark.parametrize("form", HOELDER_FORMS)
def test_classical_inequalities_hold(name: str, form: str) -> None:
    """Test the classical inequalities on seeded random inputs."""
    phi = FormDescriptor.parse(form)
    for seed in range(3):
        inputs, params = _draw(name, seed, n=4)
        if name in PSD_CHECKS:
            inputs = [x + 0.2 * np.eye(4) for x in inputs]
        result = inequality_check(name, phi, inputs, params)
        assert result.passed, (seed, result.lhs, result.rhs)
        assert len(result.inputs_digest) == 16


def test_gt_records_the_product_reading() -> None:
    """Test phi(e^{A+B}) <= phi(lambda(e^{A/2} e^B e^{A/2})) <= phi(|e^A e^B|)."""
    phi = FormDescriptor.parse("ktrace:k=2")
    inputs, _ = _draw("gt", 7, n=4)
    result = inequality_check("gt", phi, inputs)
    product = result.details["product_rhs"]
    assert result.lhs <= product + inequalities.ineq_tolerance(product)
    assert product <= result.rhs + result.tol


def test_matrix_hoelder_rejects_small_exponent() -> None:
    """Test the Hölder exponent range."""
    inputs, _ = _draw("matrix_hoelder", 0)
    with pytest.raises(InvalidInput):
        inequality_check("matrix_hoelder", FormDescriptor.parse("trace"), inputs, {"p": 0.5})


def test_alt_requires_ordered_exponents() -> None:
    """Test 0 < t <= s for the Araki-Lieb-Thirring comparison."""
    inputs, _ = _draw("alt", 0)
    with pytest.raises(InvalidInput):
        inequality_check("alt", FormDescriptor.parse("trace"), inputs, {"t": 2.0, "s": 1.0})


@pytest.mark.parametrize("form", ["trace", "ktrace:k=2", "seminorm:p=0.5"])
def test_multi_gt_three_matrices(form: str) -> None:
    """Test the multivariate bound for three matrices."""
    for seed in range(2):
        inputs, _ = _draw("multi_gt", seed, m=3)
        result = inequality_check("multi_gt", FormDescriptor.parse(form), inputs, {"p": 2.0}, SPEC)
        assert result.passed
        assert result.details["m"] == 3


def test_multi_gt_reduces_to_gt_for_two_matrices() -> None:
    """Test that two halved matrices give the log of the product reading of gt."""
    phi = FormDescriptor.parse("ktrace:k=2")
    a, b = _draw("gt", 3)[0]
    gt = inequality_check("gt", phi, [a, b])
    multi = inequality_check("multi_gt", phi, [a / 2, b / 2], {"p": 2.0}, SPEC)
    assert multi.lhs == pytest.approx(math.log(gt.lhs), abs=1e-9)
    assert multi.slack == pytest.approx(math.log(gt.details["product_rhs"]) - math.log(gt.lhs), abs=1e-6)
    assert multi.details["integrand_std"] <= 1e-8


def test_t_operator_closed_form_matches_quadrature() -> None:
    """Test the divided-difference formula against the defining integral."""
    a = hermitian.sample("psd", 3, seed=1) + 0.3 * np.eye(3)
    b = hermitian.sample("hermitian", 3, seed=2)
    assert np.max(np.abs(inequalities.t_op(a, b) - inequalities.t_op_quadrature(a, b))) <= 1e-8
    assert np.allclose(inequalities.t_op(np.eye(3), b), b)


def test_t_operator_needs_positive_definite_argument() -> None:
    """Test the precondition of T_A."""
    with pytest.raises(InvalidInput):
        inequalities.t_op(np.diag([1.0, 0.0]), np.eye(2))


@pytest.mark.parametrize("seed", range(3))
def test_t_identity(seed: int) -> None:
    """Test T_{A^-1}[B] against its interpolation integral."""
    a = hermitian.sample("psd", 3, seed=seed) + 0.5 * np.eye(3)
    b = hermitian.sample("hermitian", 3, seed=seed + 50)
    result = inequality_check("t_identity", FormDescriptor.parse("trace"), [a, b], spec=SPEC)
    assert result.passed, result.lhs
    assert result.details["closed_form_deviation"] <= 1e-8


@pytest.mark.parametrize("form", ["trace", "ktrace:k=2", "gk:k=2"])
def test_three_matrix(form: str) -> None:
    """Test the three-matrix bound and that it records the absolute-value reading."""
    phi = FormDescriptor.parse(form)
    for seed in range(3):
        inputs, _ = _draw("three_matrix", seed)
        result = inequality_check("three_matrix", phi, inputs)
        assert result.passed
        assert "abs_reading" in result.details


def test_three_matrix_specializes_to_gt() -> None:
    """Test that a zero middle matrix gives the product reading of gt."""
    phi = FormDescriptor.parse("ktrace:k=2")
    a1, _, a3 = _draw("three_matrix", 9)[0]
    three = inequality_check("three_matrix", phi, [a1, np.zeros((3, 3)), a3])
    gt = inequality_check("gt", phi, [a1, a3])
    assert three.rhs == pytest.approx(gt.details["product_rhs"], rel=1e-7)
    assert three.lhs == pytest.approx(gt.lhs, rel=1e-12)


@pytest.mark.parametrize("m", [2, 3])
def test_lie_product_converges(m: int) -> None:
    """Test the symmetric Lie product formula with monotone errors."""
    inputs, _ = _draw("lie_product", 4, m=m)
    result = inequality_check("lie_product", FormDescriptor.parse("minsum:k=1"), inputs)
    assert result.passed
    assert result.details["monotone"]
    assert len(result.details["errors"]) == inequalities.LIE_STEPS


def test_lie_product_needs_two_matrices() -> None:
    """Test the arity check."""
    with pytest.raises(InvalidInput):
        inequality_check("lie_product", FormDescriptor.parse("trace"), [np.eye(2)])


def test_hoelder_gate() -> None:
    """Test that non-Hölder forms are refused unless forced."""
    phi = FormDescriptor.parse("minsum:k=1")
    inputs, _ = _draw("gt", 0)
    with pytest.raises(PreconditionFailed):
        inequality_check("gt", phi, inputs)
    assert inequality_check("gt", phi, inputs, {"force": True}).name == "gt"


def test_unknown_inequality() -> None:
    """Test the name check."""
    with pytest.raises(InvalidInput, match="Unknown inequality"):
        inequality_check("young", FormDescriptor.parse("trace"), [np.eye(2)])
    with pytest.raises(InvalidInput):
        sample_inputs("young", np.random.default_rng(0), 3)


def test_sample_params_keeps_fixed_values() -> None:
    """Test that fixed parameters override drawn ones."""
    params = sample_params("alt", np.random.default_rng(0), {"t": 0.2, "s": None})
    assert params["t"] == 0.2
    assert params["s"] > 0


@pytest.mark.parametrize("form", ["trace", "ktrace:k=2", "seminorm:p=0.5"])
def test_interpolation_power_product(form: str) -> None:
    """Test the interpolation bound for A^z B^z at theta = 1/2."""
    a, b = (hermitian.sample("psd", 3, seed=s) + 0.1 * np.eye(3) for s in (31, 32))
    family = PowerProductFamily.from_inputs(a, b)
    result = inequalities.check_interpolation(FormDescriptor.parse(form), family, spec=SPEC)
    assert result.passed, (result.lhs, result.rhs)
    assert result.details["coefficients"] == pytest.approx([0.5, 0.5])
    assert result.details["prefix_pass"] is True


@pytest.mark.parametrize("s", [0.25, 0.5, 1.0])
def test_interpolation_epstein(s: float) -> None:
    """Test the interpolation bound for the single-argument family at theta = s."""
    rng = np.random.default_rng(40)
    x, c = (hermitian.sample("psd", 3, rng) + 0.1 * np.eye(3) for _ in range(2))
    family = EpsteinFamily.from_inputs(x, c, hermitian.sample("general", 3, rng), 0.7, s)
    result = inequalities.check_interpolation(FormDescriptor.parse("ktrace:k=2"), family, spec=SPEC)
    assert result.passed, (result.lhs, result.rhs)
    assert "left" not in result.details["boundary_terms"]


@pytest.mark.parametrize("family", ["power_product", "epstein", "lieb_two_var"])
def test_interpolation_by_name(family: str) -> None:
    """Test the named interpolation check with drawn parameters for every family."""
    inputs, params = _draw("interpolation", 12, fixed={"family": family})
    result = inequality_check("interpolation", FormDescriptor.parse("trace"), inputs, params, SPEC)
    assert result.passed
    assert result.details["family"] == family


@pytest.mark.parametrize("family", ["power_product", "epstein", "lieb_two_var"])
@pytest.mark.parametrize(("theta", "surviving"), [(0.0, "left"), (1.0, "right")])
@pytest.mark.parametrize("form", ["trace", "ktrace:k=2", "seminorm:p=0.5"])
def test_interpolation_at_the_endpoints(family: str, theta: float, surviving: str, form: str) -> None:
    """Test that at theta = 0 or 1 only one boundary term survives and it equals the left-hand side."""
    inputs, params = _draw("interpolation", 14, fixed={"family": family, "theta": theta, "p0": 2.0})
    result = inequality_check("interpolation", FormDescriptor.parse(form), inputs, params, SPEC)
    assert list(result.details["boundary_terms"]) == [surviving]
    assert result.rhs == pytest.approx(result.details["boundary_terms"][surviving], rel=1e-12)
    assert abs(result.slack) <= 1e-9 * max(1.0, abs(result.lhs))
    assert result.passed


def test_interpolation_with_explicit_exponents() -> None:
    """Test overriding theta and the endpoint exponents."""
    inputs, _ = _draw("interpolation", 13, fixed={"family": "power_product"})
    params = {"family": "power_product", "theta": 0.3, "p0": 2.0, "p1": 2.0}
    result = inequality_check("interpolation", FormDescriptor.parse("trace"), inputs, params, SPEC)
    assert result.details["theta"] == 0.3
    assert result.passed
