"""Tests for compound matrices."""

import numpy as np
import pytest

from symform import compound as compound_module
from symform import hermitian
from symform.compound import compound, compound_property_check, subset_indices
from symform.errors import InvalidInput, ResourceLimit


def test_subset_indices_are_lexicographic() -> None:
    """Test the canonical basis order of the exterior power."""
    assert subset_indices(4, 2) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def test_first_and_last_compound() -> None:
    """Test that the first compound is A and the n-th is det A."""
    a = hermitian.sample("general", 4, seed=1)
    assert np.allclose(compound(a, 1).entries, a)
    top = compound(a, 4)
    assert top.entries.shape == (1, 1)
    assert top.entries[0, 0] == pytest.approx(np.linalg.det(a))


def test_compound_of_diagonal() -> None:
    """Test that a diagonal matrix gives the products of pairs on the diagonal."""
    c = compound(np.diag([1.0, 2.0, 3.0]), 2)
    assert np.allclose(c.entries, np.diag([2.0, 3.0, 6.0]))
    assert c.subsets == [(0, 1), (0, 2), (1, 2)]


def test_compound_rejects_bad_order(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test the order range and the size cap."""
    with pytest.raises(InvalidInput):
        compound(np.eye(3), 0)
    with pytest.raises(InvalidInput):
        compound(np.eye(3), 4)
    monkeypatch.setattr(compound_module, "COMPOUND_CAP", 5)
    with pytest.raises(ResourceLimit):
        compound(np.eye(4), 2)


def test_top_eigenvalue_is_product() -> None:
    """Test lambda_1 of the k-th compound equals the product of the k largest eigenvalues."""
    a = hermitian.sample("psd", 5, seed=4)
    values = hermitian.psd_spectrum(a)
    top = hermitian.spectrum(hermitian.hermitian_part(compound(a, 3).entries))[0]
    assert top == pytest.approx(np.prod(values[:3]), rel=1e-9)


@pytest.mark.parametrize(("n", "k"), [(4, 1), (4, 2), (5, 2), (6, 3)])
def test_property_check_passes(n: int, k: int) -> None:
    """Test every compound identity on seeded random matrices."""
    report = compound_property_check(n, k, seed=n * 10 + k, trials=2)
    assert report.passed, [(c.name, c.deviation) for c in report.checks if not c.passed]
    names = {check.name for check in report.checks}
    assert {"product", "adjoint", "inverse", "spectrum", "abs", "top-eigenvalue", "power[0.7j]"} <= names


def test_property_check_with_explicit_matrices() -> None:
    """Test that given matrices are used in the first trial."""
    a = np.diag([1.0, 2.0, 3.0, 4.0]).astype(complex)
    b = hermitian.sample("unitary", 4, seed=2)
    report = compound_property_check(4, 2, seed=0, trials=1, a=a, b=b)
    assert report.passed
    assert report.name == "compound(n=4, k=2)"
