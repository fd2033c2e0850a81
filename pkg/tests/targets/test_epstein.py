"""Tests for the single-argument target."""

import numpy as np
import pytest

from symform import hermitian
from symform.errors import InvalidInput
from symform.forms import FormDescriptor
from symform.target import eval_target
from symform.targets import EpsteinTarget, TargetDescriptor


@pytest.mark.parametrize(("r", "s"), [(1.0, 1.0), (0.5, 0.25), (0.3, 0.8)])
def test_scalar_reduction(r: float, s: float) -> None:
    """Test that n = 1 gives |k|^{2/s} a^r."""
    target = EpsteinTarget(k=np.array([[2.0]]), r=r, s=s)
    for a in (0.2, 1.0, 7.5):
        assert target.spectrum([np.array([[a]])])[0] == pytest.approx(2.0 ** (2 / s) * a**r, rel=1e-10)


def test_transform_matches_spectrum() -> None:
    """Test that the matrix value has the reported eigenvalues."""
    rng = np.random.default_rng(1)
    target = EpsteinTarget.resolve(3, None, rng, r=0.7, s=0.4)
    a = hermitian.sample("psd", 3, rng)
    assert np.allclose(hermitian.spectrum(target.transform([a])), target.spectrum([a]), rtol=1e-8)
    assert target.params() == {"r": 0.7, "s": 0.4}


def test_identity_kernel_is_a_power() -> None:
    """Test F(A) = A^r for K = I."""
    a = np.diag([1.0, 4.0, 9.0])
    target = EpsteinTarget(k=np.eye(3), r=0.5, s=0.3)
    assert eval_target(target, FormDescriptor.parse("trace"), [a]) == pytest.approx(6.0)


def test_resolve_draws_missing_exponents() -> None:
    """Test the ranges of drawn parameters."""
    for seed in range(5):
        target = EpsteinTarget.resolve(2, None, np.random.default_rng(seed))
        assert 0.1 <= target.r <= 1.0 and 0.1 <= target.s <= 1.0
        assert target.input_dims == (2,)
        assert target.output_dim == 2


def test_exponent_range() -> None:
    """Test (0, 1] exponents unless unchecked."""
    with pytest.raises(InvalidInput, match="r must be in"):
        EpsteinTarget(k=np.eye(2), r=1.5, s=0.5)
    with pytest.raises(InvalidInput):
        EpsteinTarget(k=np.eye(2), r=0.5, s=0.0)
    assert EpsteinTarget(k=np.eye(2), r=1.5, s=0.5, strict=False).r == 1.5


def test_inputs_are_checked() -> None:
    """Test arity and dimension checks."""
    target = EpsteinTarget(k=np.eye(2), r=0.5, s=0.5)
    with pytest.raises(InvalidInput, match="takes 1 matrices"):
        target.spectrum([np.eye(2), np.eye(2)])
    with pytest.raises(InvalidInput, match="must be 2x2"):
        target.spectrum([np.eye(3)])


def test_descriptor_build() -> None:
    """Test building from an explicit kernel."""
    target = TargetDescriptor("epstein", r=0.5, s=0.5).build(np.eye(2))
    assert isinstance(target, EpsteinTarget)
    with pytest.raises(InvalidInput, match="needs explicit r, s"):
        TargetDescriptor("epstein").build(np.eye(2))
    with pytest.raises(InvalidInput, match="Unknown target"):
        TargetDescriptor("wigner")
