"""Tests for symmetric forms."""

import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symform import forms, hermitian
from symform.errors import InvalidInput, ResourceLimit
from symform.forms import FormDescriptor, FormKind, eval_form, eval_form_matrix
from symform.models import Verdict

nonnegative_vectors = st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=1, max_size=7)

CONCAVE_FORMS = ["trace", "ktrace:k=2", "ktrace:k=3", "gk:k=2", "seminorm:p=0.3", "seminorm:p=0.5", "minsum:k=1"]


@pytest.mark.parametrize(
    ("text", "kind", "k", "p"),
    [
        ("trace", FormKind.TRACE, None, None),
        ("ktrace:k=2", FormKind.KTRACE, 2, None),
        ("gk:k=3", FormKind.GK, 3, None),
        ("seminorm:p=0.5", FormKind.SEMINORM, None, 0.5),
        ("minsum:k=1", FormKind.MINSUM, 1, None),
    ],
)
def test_parse_descriptor(text: str, kind: FormKind, k: int | None, p: float | None) -> None:
    """Test the descriptor grammar and its string form."""
    phi = FormDescriptor.parse(text)
    assert (phi.kind, phi.k, phi.p) == (kind, k, p)
    assert str(phi) == text


@pytest.mark.parametrize("text", ["ktrace", "seminorm:p=2", "seminorm:p=0", "foo", "trace:k=1", "ktrace:k", "gk:k=x"])
def test_parse_rejects_bad_descriptors(text: str) -> None:
    """Test that malformed descriptors raise InvalidInput."""
    with pytest.raises(InvalidInput):
        FormDescriptor.parse(text)


@pytest.mark.parametrize("n", [1, 3, 6, 12])
def test_ktrace_of_identity(n: int) -> None:
    """Test ktrace(k) on the all-ones spectrum equals binomial(n, k)^{1/k}."""
    for k in range(1, n + 1):
        value = eval_form(FormDescriptor(FormKind.KTRACE, k=k), np.ones(n))
        assert value == pytest.approx(math.comb(n, k) ** (1.0 / k), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(nonnegative_vectors, st.integers(min_value=1, max_value=7))
def test_esp_matches_subset_enumeration(x: list[float], k: int) -> None:
    """Test the prefix recurrence against the subset-sum oracle."""
    k = min(k, len(x))
    oracle = sum(math.prod(subset) for subset in combinations(x, k))
    assert forms.esp(x, k) == pytest.approx(oracle, rel=1e-12, abs=1e-300)


@settings(max_examples=50, deadline=None)
@given(nonnegative_vectors, st.floats(min_value=0.0, max_value=5.0), st.sampled_from(CONCAVE_FORMS))
def test_forms_are_homogeneous_and_symmetric(x: list[float], t: float, text: str) -> None:
    """Test phi(t x) = t phi(x) and invariance under reversal."""
    phi = FormDescriptor.parse(text)
    if phi.k is not None and phi.k > len(x):
        return
    base = eval_form(phi, x)
    assert eval_form(phi, [t * value for value in x]) == pytest.approx(t * base, rel=1e-9, abs=1e-9)
    assert eval_form(phi, x[::-1]) == pytest.approx(base, rel=1e-12, abs=1e-12)


def test_ktrace_on_diagonal_matrix() -> None:
    """Test ktrace(2) of diag(1, 2, 3) equals sqrt(11)."""
    phi = FormDescriptor.parse("ktrace:k=2")
    assert eval_form_matrix(phi, np.diag([1.0, 2.0, 3.0])) == pytest.approx(math.sqrt(11.0), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(min_value=0, max_value=2**32 - 1),
    st.integers(min_value=2, max_value=5),
    st.sampled_from(["trace", "ktrace:k=2", "gk:k=2", "seminorm:p=0.3", "minsum:k=1"]),
)
def test_eval_form_matrix_is_unitarily_invariant(seed: int, n: int, text: str) -> None:
    """Test phi(U* A U) = phi(A) for PSD A and unitary U."""
    rng = np.random.default_rng(seed)
    a = hermitian.sample("psd", n, rng)
    u = hermitian.sample("unitary", n, rng)
    rotated = hermitian.hermitian_part(hermitian.dagger(u) @ a @ u)
    phi = FormDescriptor.parse(text)
    assert eval_form_matrix(phi, rotated) == pytest.approx(eval_form_matrix(phi, a), rel=1e-9, abs=1e-9)


def test_small_values() -> None:
    """Test gk, seminorm and minsum on hand-computed vectors."""
    assert eval_form(FormDescriptor.parse("gk:k=2"), [1.0, 4.0]) == pytest.approx(2.0)
    assert eval_form(FormDescriptor.parse("gk:k=1"), [1.0, 4.0, 2.0]) == pytest.approx(7.0)
    assert eval_form(FormDescriptor.parse("seminorm:p=1"), [1.0, 4.0]) == pytest.approx(5.0)
    assert eval_form(FormDescriptor.parse("seminorm:p=0.5"), [1.0, 1.0]) == pytest.approx(4.0)
    assert eval_form(FormDescriptor.parse("minsum:k=2"), [3.0, 1.0, 2.0]) == pytest.approx(3.0)


def test_eval_form_rejects_bad_vectors() -> None:
    """Test negative entries and k larger than the dimension."""
    with pytest.raises(InvalidInput):
        eval_form(FormDescriptor.parse("trace"), [1.0, -1.0])
    with pytest.raises(InvalidInput):
        eval_form(FormDescriptor.parse("ktrace:k=3"), [1.0, 2.0])


def test_form_of_power() -> None:
    """Test phi(x^p)^{1/p} for a finite exponent."""
    phi = FormDescriptor.parse("trace")
    assert forms.form_of_power(phi, [3.0, 4.0], 2.0) == pytest.approx(5.0)


@pytest.mark.parametrize(
    ("text", "limit"),
    [
        ("trace", 8.0),
        ("seminorm:p=0.5", 8.0),
        ("ktrace:k=2", 4.0),
        ("gk:k=2", 4.0),
        ("ktrace:k=3", 16.0 ** (1 / 3)),
        ("minsum:k=1", 1.0),
        ("minsum:k=2", 2.0),
    ],
)
def test_form_of_power_limit(text: str, limit: float) -> None:
    """Test that p = inf is the form's own limit, approached by large finite exponents."""
    phi = FormDescriptor.parse(text)
    x = [2.0, 8.0, 1.0]
    assert forms.form_of_power(phi, x, math.inf) == pytest.approx(limit, rel=1e-12)
    assert forms.form_of_power(phi, x, 60.0) == pytest.approx(limit, rel=5e-2)
    with pytest.raises(InvalidInput):
        forms.form_of_power(FormDescriptor.parse("ktrace:k=4"), x, math.inf)


def test_gk_enumeration_cap(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test that gk refuses enumerations beyond the cap."""
    monkeypatch.setattr(forms, "GK_ENUMERATION_CAP", 5)
    with pytest.raises(ResourceLimit):
        eval_form(FormDescriptor.parse("gk:k=2"), np.ones(5))


def test_is_hoelder() -> None:
    """Test that minsum is Hölder only when it is the trace."""
    assert FormDescriptor.parse("ktrace:k=2").is_hoelder(4)
    assert not FormDescriptor.parse("minsum:k=1").is_hoelder(3)
    assert FormDescriptor.parse("minsum:k=3").is_hoelder(3)


@pytest.mark.parametrize("text", CONCAVE_FORMS)
def test_check_axioms_passes(text: str) -> None:
    """Test the axiom sampler on every built-in form."""
    report = forms.check_axioms(FormDescriptor.parse(text), n=4, trials=30, seed=1)
    assert report.axioms_pass
    assert report.passed


@pytest.mark.parametrize("text", CONCAVE_FORMS)
def test_check_concavity_vector_passes(text: str) -> None:
    """Test vector concavity of every built-in form."""
    report = forms.check_concavity_vector(FormDescriptor.parse(text), n=4, trials=30, seed=2)
    assert report.concave_verdict == Verdict.PASS


@pytest.mark.parametrize("text", ["trace", "ktrace:k=2", "gk:k=2", "seminorm:p=0.5"])
def test_check_hoelder_passes_for_hoelder_forms(text: str) -> None:
    """Test that Hölder forms pass both Hölder criteria."""
    report = forms.check_hoelder(FormDescriptor.parse(text), n=4, trials=20, seed=3)
    assert report.hoelder_verdict == Verdict.PASS


def test_check_hoelder_flags_minsum_with_explicit_witness() -> None:
    """Test the witness x = (1, 10), y = (10, 1), p = q = 2 for the smallest entry."""
    report = forms.check_hoelder(FormDescriptor.parse("minsum:k=1"), n=2, trials=5, seed=0)
    assert report.hoelder_verdict == Verdict.FAIL
    assert report.witness is not None
    assert report.witness["lhs"] == pytest.approx(10.0)
    assert report.witness["rhs"] == pytest.approx(1.0)
    assert report.witness["x"] == [1.0, 10.0]
    assert report.witness["y"] == [10.0, 1.0]


@pytest.mark.parametrize("r", [0.3, 1.0])
def test_check_concavity_matrix(r: float) -> None:
    """Test concavity of A -> phi(A^r) on PSD pairs."""
    report = forms.check_concavity_matrix(FormDescriptor.parse("ktrace:k=2"), n=3, trials=20, seed=4, r=r)
    assert report.concave_verdict == Verdict.PASS
    with pytest.raises(InvalidInput):
        forms.check_concavity_matrix(FormDescriptor.parse("trace"), n=3, trials=1, seed=4, r=1.5)


def test_check_matrix_hoelder() -> None:
    """Test phi(|AB|) <= phi(A^p)^{1/p} phi(B^q)^{1/q}."""
    report = forms.check_matrix_hoelder(FormDescriptor.parse("seminorm:p=0.5"), n=3, trials=20, seed=5)
    assert report.hoelder_verdict == Verdict.PASS
