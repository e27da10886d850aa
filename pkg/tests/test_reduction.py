"""
Tests for the reduction to a common part plus projections and the trace class.
"""
import numpy as np
import pytest

from src.algebra.errors import NotNearInteger, NotReducible, RelationViolation
from src.algebra.matrix import is_projection
from src.algebra.pairs import SoftPair
from src.algebra.reduction import class_of_pair, reduce_to_projections, trace_class


def test_block_diagonal_reduction():
    """a = diag(0.3, 1, 1), b = diag(0.3, 0, 1): one common eigenvalue, ranks 2 and 1."""
    pair = SoftPair(np.diag([0.3, 1.0, 1.0]), np.diag([0.3, 0.0, 1.0]))
    reduction = reduce_to_projections(pair)

    assert reduction.k == 1
    assert reduction.c[0, 0].real == pytest.approx(0.3)
    assert reduction.rank_p == 2 and reduction.rank_q == 1
    assert reduction.k0_class == 1
    assert class_of_pair(pair) == 1


def test_pure_common_part():
    pair = SoftPair(np.diag([0.3, 0.6]), np.diag([0.3, 0.6]))
    reduction = reduce_to_projections(pair)

    assert reduction.k == 2
    assert reduction.p.shape == (0, 0)
    assert reduction.k0_class == 0


def test_reduction_reassembles(pair_corpus):
    """frame·(c ⊕ p)·frame* gives back a, and likewise for b."""
    for pair in pair_corpus:
        reduction = reduce_to_projections(pair)
        a, b = reduction.reassemble()

        assert np.allclose(a, pair.a, atol=1e-8)
        assert np.allclose(b, pair.b, atol=1e-8)
        assert is_projection(reduction.p) and is_projection(reduction.q)
        assert reduction.k == pair.meta["k"]


def test_class_equals_rank_difference(pair_corpus):
    for pair in pair_corpus:
        reduction = reduce_to_projections(pair)
        assert class_of_pair(pair) == reduction.k0_class == pair.meta["rank_difference"]


def test_non_integer_trace():
    with pytest.raises(NotNearInteger):
        trace_class(SoftPair(np.diag([0.5]), np.diag([0.25])))


def test_invalid_pair_is_refused():
    with pytest.raises(RelationViolation):
        class_of_pair(SoftPair(np.diag([0.5, 1.0]), np.diag([0.6, 0.0])))


def test_not_reducible_at_loose_tolerance():
    """Accepted at tol 1e-5, yet b moves off a's interior eigenvalue."""
    pair = SoftPair(np.diag([0.5]), np.diag([0.5 + 1e-6]))
    with pytest.raises(NotReducible):
        reduce_to_projections(pair, tol=1e-5)


def test_reduction_refuses_unrounded_projection():
    """b carries 1e-7 on a's kernel: valid at tol 1e-10, but rounding q leaves a 1e-7 residual."""
    pair = SoftPair(np.diag([1.0, 0.0]), np.diag([1.0, 1e-7]))
    with pytest.raises(NotReducible):
        reduce_to_projections(pair)


def test_reduction_residuals_within_bound(pair_corpus):
    for pair in pair_corpus:
        reduction = reduce_to_projections(pair)
        assert max(reduction.residual_a, reduction.residual_b) <= 1e-8
