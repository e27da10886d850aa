"""
Tests for soft pair verification, derived identities and the pair generator.
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.algebra.errors import DomainError, NoMatching, NotHermitian, RelationViolation, ShapeError
from src.algebra.matrix import (
    SampledFunction,
    ScalarFunction,
    cube,
    op_norm,
    random_unitary,
    seeded_rng,
    smoothstep,
    square,
)
from src.algebra.pairs import (
    SoftPair,
    check_derived_identities,
    check_relations,
    compare_spectra,
    conjugate_pair,
    direct_sum,
    random_valid_pair,
    reparametrize,
    require_valid,
    validate_reparametrization,
)
from src.algebra.reduction import class_of_pair


def test_projection_pair_passes():
    report = check_relations(SoftPair(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])))
    assert report.passed
    assert report.r1 == 0.0 and report.r2 == 0.0


def test_failing_pair_residuals():
    """(diag(0.5, 1), diag(0.6, 0)) has r1 = 0.025 and r2 = 0.024."""
    pair = SoftPair(np.diag([0.5, 1.0]), np.diag([0.6, 0.0]))
    report = check_relations(pair)

    assert not report.passed
    assert report.r1 == pytest.approx(0.025, abs=1e-12)
    assert report.r2 == pytest.approx(0.024, abs=1e-12)
    with pytest.raises(RelationViolation):
        require_valid(pair)


def test_norm_and_positivity_conditions():
    too_big = check_relations(SoftPair(np.diag([1.5]), np.diag([1.5])))
    negative = check_relations(SoftPair(np.diag([-0.5]), np.diag([-0.5])))

    assert not too_big.passed and too_big.norm_a == pytest.approx(1.5)
    assert not negative.passed and negative.positivity_a == pytest.approx(-0.5)


def test_shape_and_hermitian_errors():
    with pytest.raises(ShapeError):
        check_relations(SoftPair(np.eye(2), np.eye(3)))
    with pytest.raises(NotHermitian):
        check_relations(SoftPair(np.array([[0.0, 1.0], [0.0, 0.0]]), np.zeros((2, 2))))


def test_empty_pair_is_valid():
    assert check_relations(SoftPair(np.zeros((0, 0)), np.zeros((0, 0)))).passed


def test_corpus_is_valid(pair_corpus):
    for pair in pair_corpus:
        report = check_relations(pair, 1e-10)
        assert report.passed, pair.meta


def test_derived_identities(pair_corpus):
    """Valid pairs satisfy the gap and root identities within the derived tolerance."""
    for pair in pair_corpus:
        report = check_derived_identities(pair)
        assert report.passed, (pair.meta, report.deviations)
        assert set(report.deviations) >= {"gap", "gap_squares", "root_equal", "root_annihilates"}


def test_unitary_invariance(pair_corpus):
    """Ten seeded unitaries per pair leave validity, residual scale and class unchanged."""
    for index, pair in enumerate(pair_corpus):
        k0_class = class_of_pair(pair)
        for stream in range(10):
            moved = conjugate_pair(pair, random_unitary(pair.n, seeded_rng(index, stream)))
            report = check_relations(moved)
            assert report.passed, (pair.meta, stream)
            assert max(report.r1, report.r2) <= 1e-10
            assert class_of_pair(moved) == k0_class


def test_direct_sum_adds_classes(pair_corpus):
    first, second = pair_corpus[4], pair_corpus[-1]
    total = direct_sum(first, second)

    assert check_relations(total).passed
    assert total.meta["rank_difference"] == first.meta["rank_difference"] + second.meta["rank_difference"]
    assert class_of_pair(total) == class_of_pair(first) + class_of_pair(second)


def test_compare_spectra():
    pair = random_valid_pair(5, 3, seed=7)
    report = compare_spectra(pair)
    assert len(report.matching) == 3
    assert report.max_gap < 1e-9


def test_interior_spectra_always_match(pair_corpus):
    for pair in pair_corpus:
        report = compare_spectra(pair)
        assert len(report.matching) == pair.meta["k"], pair.meta
        assert report.max_gap < 1e-8


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_strict_contractions_coincide(n, seed):
    """A valid pair with both norms below 1 − δ has a = b."""
    pair = random_valid_pair(n, n, seed)
    report = check_relations(pair)

    assert max(report.norm_a, report.norm_b) < 1.0 - 1e-3
    assert op_norm(pair.a - pair.b) <= 1e-8


def test_strict_contractions_in_corpus(pair_corpus):
    strict = [pair for pair in pair_corpus if max(op_norm(pair.a), op_norm(pair.b)) < 1.0 - 1e-3]
    assert strict
    for pair in strict:
        assert op_norm(pair.a - pair.b) <= 1e-8, pair.meta


def test_compare_spectra_without_partner():
    """A pair accepted at a loose tolerance can still have unmatched interior eigenvalues."""
    pair = SoftPair(np.diag([0.5]), np.diag([0.3]))
    with pytest.raises(NoMatching):
        compare_spectra(pair, tol=1.0)


def test_reparametrize_square(diagonal_pair):
    moved = reparametrize(diagonal_pair, square)

    assert np.allclose(moved.a, np.diag([0.25, 1.0]), atol=1e-12)
    assert np.allclose(moved.b, np.diag([0.25, 0.0]), atol=1e-12)
    assert moved.meta["reparametrization"] == "square"


@pytest.mark.parametrize("f", [square, cube, smoothstep], ids=lambda f: f.name)
def test_reparametrize_keeps_difference(pair_corpus, f):
    """f(a) − f(b) = a − b: the two only differ on the projection part."""
    for pair in pair_corpus:
        moved = reparametrize(pair, f)
        assert check_relations(moved).passed
        assert op_norm((moved.a - moved.b) - (pair.a - pair.b)) <= 1e-8
        assert class_of_pair(moved) == class_of_pair(pair)


def test_smoothstep_gap_residual(pair_corpus):
    for pair in pair_corpus:
        moved = reparametrize(pair, smoothstep)
        fa, fb = moved.a, moved.b
        assert op_norm((fa - fa @ fa) @ (fa - fb)) <= 1e-8


def test_reparametrize_refuses_a_moved_difference():
    """Accepted at tol 1e-3, but a steep f pulls f(a) − f(b) far from a − b."""
    pair = SoftPair(np.diag([0.5]), np.diag([0.5035]))
    steep = SampledFunction([0.0, 0.5, 0.51, 1.0], [0.0, 0.5, 1.0, 1.0])
    with pytest.raises(RelationViolation):
        reparametrize(pair, steep, tol=1e-3)


@pytest.mark.parametrize("fn", [
    lambda t: 0.5 * t,
    lambda t: 2.0 * t * t - t,
])
def test_invalid_reparametrizations(fn):
    with pytest.raises(DomainError):
        validate_reparametrization(ScalarFunction("bad", fn))


def test_random_valid_pair_metadata():
    pair = random_valid_pair(5, 2, seed=42)
    again = random_valid_pair(5, 2, seed=42)

    assert np.array_equal(pair.a, again.a) and np.array_equal(pair.b, again.b)
    assert pair.meta["n"] == 5 and pair.meta["k"] == 2
    assert pair.meta["rank_difference"] == pair.meta["rank_p"] - pair.meta["rank_q"]
    with pytest.raises(ShapeError):
        random_valid_pair(3, 4, seed=0)


@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_generated_pairs_are_valid(data):
    n = data.draw(st.integers(min_value=1, max_value=8))
    k = data.draw(st.integers(min_value=0, max_value=n))
    seed = data.draw(st.integers(min_value=0, max_value=2**32 - 1))
    pair = random_valid_pair(n, k, seed)

    assert check_relations(pair, 1e-10).passed
    assert class_of_pair(pair) == pair.meta["rank_difference"]
