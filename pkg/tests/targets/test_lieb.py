"""Tests for the two-argument target."""

import itertools

import numpy as np
import pytest

from symform import hermitian
from symform.errors import InvalidInput
from symform.targets import LiebTarget, TargetDescriptor


def test_scalar_reduction() -> None:
    """Test that n = m = 1 gives |k|^{2/s} a^p b^q."""
    target = LiebTarget(k=np.array([[1.5]]), p=0.3, q=0.4, s=0.6)
    value = target.spectrum([np.array([[2.0]]), np.array([[5.0]])])[0]
    assert value == pytest.approx(1.5 ** (2 / 0.6) * 2.0**0.3 * 5.0**0.4, rel=1e-10)


@pytest.mark.parametrize(("p", "q"), [(0.5, 0.5), (0.2, 0.7), (0.4, 0.3)])
def test_scalar_midpoint_concavity_on_a_grid(p: float, q: float) -> None:
    """Test (a, b) -> a^p b^q on a positive grid for p + q <= 1."""
    target = LiebTarget(k=np.array([[1.0]]), p=p, q=q, s=1.0)
    grid = [0.1, 0.5, 1.0, 3.0]

    def f(a: float, b: float) -> float:
        return target.spectrum([np.array([[a]]), np.array([[b]])])[0]

    for (a1, b1), (a2, b2) in itertools.product(itertools.product(grid, grid), repeat=2):
        assert f((a1 + a2) / 2, (b1 + b2) / 2) >= (f(a1, b1) + f(a2, b2)) / 2 - 1e-12


def test_rectangular_kernel() -> None:
    """Test A n x n, B m x m and an m x m output."""
    rng = np.random.default_rng(3)
    target = LiebTarget.resolve(3, 2, rng, p=0.4, q=0.4, s=0.5)
    assert target.input_dims == (3, 2)
    assert target.output_dim == 2
    a, b = target.sample_inputs(rng)
    assert target.spectrum([a, b]).shape == (2,)
    assert np.allclose(hermitian.spectrum(target.transform([a, b])), target.spectrum([a, b]), rtol=1e-8)


def test_exponent_constraints() -> None:
    """Test p + q <= 1 and its unchecked relaxation."""
    with pytest.raises(InvalidInput, match="p \\+ q"):
        LiebTarget(k=np.eye(2), p=0.8, q=0.8, s=1.0)
    assert LiebTarget(k=np.eye(2), p=0.8, q=0.8, s=1.0, strict=False).p == 0.8


def test_resolve_completes_exponents() -> None:
    """Test drawn exponents respect the constraint with one fixed value."""
    for seed in range(10):
        target = LiebTarget.resolve(2, None, np.random.default_rng(seed), p=0.6)
        assert target.p == 0.6
        assert 0 < target.q <= 0.4
        drawn = LiebTarget.resolve(2, None, np.random.default_rng(seed))
        assert 0.1 <= drawn.p + drawn.q <= 1.0
    with pytest.raises(InvalidInput, match="Cannot complete"):
        LiebTarget.resolve(2, None, np.random.default_rng(0), q=1.0)


def test_descriptor_build_and_dimension() -> None:
    """Test the explicit-kernel build and the output dimension."""
    descriptor = TargetDescriptor("lieb", p=0.3, q=0.3, s=0.5)
    assert descriptor.output_dim(4, 2) == 2
    assert descriptor.output_dim(4) == 4
    assert descriptor.build(np.ones((3, 2))).input_dims == (3, 2)
    with pytest.raises(InvalidInput, match="needs explicit s"):
        TargetDescriptor("lieb", p=0.3, q=0.3).build(np.eye(2))
