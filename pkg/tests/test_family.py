"""Tests for holomorphic matrix families and interpolation exponents."""

import math

import numpy as np
import pytest

from symform import hermitian
from symform.errors import InvalidInput
from symform.family import (
    EpsteinFamily,
    InterpolationParams,
    LiebTwoVarFamily,
    PowerProductFamily,
    eval_G,
    make_family,
)
from symform.targets import EpsteinTarget, LiebTarget


@pytest.fixture
def pd_pair() -> tuple[np.ndarray, np.ndarray]:
    """Two positive definite 3x3 matrices."""
    return (
        hermitian.sample("psd", 3, seed=21) + 0.2 * np.eye(3),
        hermitian.sample("psd", 3, seed=22) + 0.2 * np.eye(3),
    )


def _is_unitary(u: np.ndarray) -> bool:
    return np.allclose(u @ hermitian.dagger(u), np.eye(u.shape[0]), atol=1e-9)


def test_params_from_endpoints() -> None:
    """Test p_theta and the boundary coefficients."""
    params = InterpolationParams.from_endpoints(0.5, 2.0, 2.0)
    assert params.p_theta == pytest.approx(2.0)
    assert params.coefficients == pytest.approx((0.5, 0.5))

    epstein = InterpolationParams.from_endpoints(0.25, math.inf, 2.0)
    assert epstein.p_theta == pytest.approx(8.0)
    assert epstein.coefficients == pytest.approx((0.0, 1.0))


def test_params_validation() -> None:
    """Test inconsistent exponents, theta range and two infinite endpoints."""
    with pytest.raises(InvalidInput, match="Inconsistent"):
        InterpolationParams(theta=0.5, p0=2.0, p1=2.0, p_theta=3.0)
    with pytest.raises(InvalidInput):
        InterpolationParams.from_endpoints(1.2, 2.0, 2.0)
    with pytest.raises(InvalidInput):
        InterpolationParams.from_endpoints(0.5, math.inf, math.inf)
    with pytest.raises(InvalidInput):
        InterpolationParams.from_endpoints(0.5, -1.0, 2.0)


def test_power_product_boundaries(pd_pair: tuple[np.ndarray, np.ndarray]) -> None:
    """Test G(0) = I, G(1) = A_1 A_2 and unitary values on the imaginary axis."""
    a, b = pd_pair
    family = PowerProductFamily.from_inputs(a, b)
    assert np.allclose(eval_G(family, 0.0), np.eye(3), atol=1e-10)
    assert np.allclose(eval_G(family, 1.0), a @ b, atol=1e-9)
    assert _is_unitary(eval_G(family, 0.8j))
    assert family.default_params() == InterpolationParams(theta=0.5, p0=2.0, p1=2.0, p_theta=2.0)


def test_family_rejects_points_off_the_strip(pd_pair: tuple[np.ndarray, np.ndarray]) -> None:
    """Test the strip check."""
    family = PowerProductFamily.from_inputs(*pd_pair)
    with pytest.raises(InvalidInput, match="outside the strip"):
        family.evaluate(1.5 + 0.2j)
    with pytest.raises(InvalidInput):
        family.evaluate(-0.1)


def test_power_product_requires_definite_factors() -> None:
    """Test that singular factors and mixed dimensions are rejected."""
    with pytest.raises(InvalidInput):
        PowerProductFamily.from_inputs(np.diag([1.0, 0.0]))
    with pytest.raises(InvalidInput):
        PowerProductFamily.from_inputs(np.eye(2), np.eye(3))


@pytest.mark.parametrize(("r", "s"), [(1.0, 0.5), (0.6, 0.25), (0.3, 1.0)])
def test_epstein_family_hits_the_target(pd_pair: tuple[np.ndarray, np.ndarray], r: float, s: float) -> None:
    """Test |G(s)|^{2/s} = (K* X^{rs} K)^{1/s} and unitarity at Re z = 0."""
    x, c = pd_pair
    k = hermitian.sample("general", 3, seed=23)
    family = EpsteinFamily.from_inputs(x, c, k, r, s)

    observed = hermitian.gram_spectrum(family.evaluate(s)) ** (1.0 / s)
    expected = EpsteinTarget(k=k, r=r, s=s).spectrum([x])
    assert np.allclose(observed, expected, rtol=1e-8)
    assert _is_unitary(family.evaluate(0.7j))
    assert family.default_params().p_theta == pytest.approx(2.0 / s)


def test_lieb_two_var_family_hits_the_target() -> None:
    """Test that |G(p/r)|^{2/s} has the spectrum of the two-argument target at (X_1, X_2)."""
    rng = np.random.default_rng(5)
    x1, c1 = (hermitian.sample("psd", 3, rng) + 0.2 * np.eye(3) for _ in range(2))
    x2, c2 = (hermitian.sample("psd", 2, rng) + 0.2 * np.eye(2) for _ in range(2))
    k = hermitian.sample("general", 3, rng, m=2)
    p, q, s = 0.3, 0.5, 0.6
    family = LiebTwoVarFamily.from_inputs(x1, x2, c1, c2, k, p, q, s)

    params = family.default_params()
    assert params.theta == pytest.approx(p / (p + q))
    observed = hermitian.gram_spectrum(family.evaluate(params.theta)) ** (1.0 / s)
    expected = LiebTarget(k=k, p=p, q=q, s=s).spectrum([x1, x2])
    assert observed.shape == (2,)
    assert np.allclose(observed, expected, rtol=1e-8)


def test_lieb_two_var_rejects_large_exponents() -> None:
    """Test p + q <= 1."""
    with pytest.raises(InvalidInput):
        LiebTwoVarFamily.from_inputs(np.eye(2), np.eye(2), np.eye(2), np.eye(2), np.eye(2), 0.6, 0.6, 0.5)


def test_make_family(pd_pair: tuple[np.ndarray, np.ndarray]) -> None:
    """Test construction from inputs and its error paths."""
    a, b = pd_pair
    k = hermitian.sample("general", 3, seed=24)
    family = make_family("epstein", [a, b, k], {"r": 0.5, "s": 0.5, "tau": 0.25})
    assert isinstance(family, EpsteinFamily)
    assert np.allclose(family.c.data, 0.25 * a + 0.75 * b)

    assert isinstance(make_family("power_product", [a, b], {}), PowerProductFamily)
    with pytest.raises(InvalidInput, match="Missing family parameter"):
        make_family("epstein", [a, b, k], {"r": 0.5})
    with pytest.raises(InvalidInput):
        make_family("epstein", [a, b], {"r": 0.5, "s": 0.5})
    with pytest.raises(InvalidInput, match="Unknown family"):
        make_family("gaussian", [a], {})
    with pytest.raises(InvalidInput):
        make_family("power_product", [a], {"tau": 2.0})
