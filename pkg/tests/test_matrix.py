"""
Tests for the Hermitian linear algebra helpers.
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.algebra.errors import DomainError, InvalidInput, NotHermitian, ShapeError
from src.algebra.matrix import (
    SNAP_TOL,
    SampledFunction,
    adjoint,
    apply_function,
    as_cmatrix,
    conjugate,
    direct_sum,
    eig_hermitian,
    gap_root,
    is_projection,
    op_norm,
    positivity_margin,
    random_projection,
    random_unitary,
    require_hermitian,
    seeded_rng,
    square,
)


@pytest.mark.parametrize("matrix, expected", [
    (np.eye(2), 1.0),
    (np.diag([0.5, -0.25]), 0.5),
    (np.array([[0.0, 2.0], [0.0, 0.0]]), 2.0),
])
def test_op_norm_examples(matrix, expected):
    """The spectral norm is the largest singular value."""
    assert op_norm(matrix) == pytest.approx(expected, abs=1e-14)


def test_empty_matrix_has_zero_norm():
    assert op_norm(np.zeros((0, 0))) == 0.0


def test_as_cmatrix_rejects_bad_shapes_and_values():
    with pytest.raises(ShapeError):
        as_cmatrix(np.zeros((2, 3)))
    with pytest.raises(InvalidInput):
        as_cmatrix(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    assert as_cmatrix(0.5).shape == (1, 1)


def test_require_hermitian():
    """Non-Hermitian input is refused; Hermitian input comes back exactly Hermitian."""
    with pytest.raises(NotHermitian):
        require_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))
    H = require_hermitian(np.array([[1.0, 1j], [-1j, 0.0]]))
    assert np.array_equal(H, adjoint(H))


def test_eigendecomposition_is_ascending_and_reproducible():
    rng = seeded_rng(3)
    U = random_unitary(4, rng)
    M = conjugate(np.diag([0.9, 0.1, 0.5, 0.3]).astype(complex), U)

    first = eig_hermitian(M)
    second = eig_hermitian(M)

    assert np.all(np.diff(first.eigenvalues) >= 0)
    assert np.allclose(first.eigenvalues, [0.1, 0.3, 0.5, 0.9], atol=1e-12)
    assert np.array_equal(first.frame, second.frame)
    assert np.allclose(first.reconstruct(), M, atol=1e-12)
    assert np.allclose(adjoint(first.frame) @ first.frame, np.eye(4), atol=1e-12)


def test_eigenvector_phase_convention():
    """The first non-negligible component of every eigenvector is real positive."""
    M = np.array([[0.5, 0.5j], [-0.5j, 0.5]])
    system = eig_hermitian(M)
    for j in range(system.n):
        column = system.frame[:, j]
        lead = column[np.flatnonzero(np.abs(column) > 1e-10)[0]]
        assert abs(lead.imag) < 1e-14
        assert lead.real > 0


def test_positivity_margin():
    assert positivity_margin(np.diag([-0.5, 1.0])) == pytest.approx(-0.5)
    assert positivity_margin(np.diag([0.0, 1.0])) == pytest.approx(0.0)


def test_apply_function_square():
    M = np.array([[0.5, 0.5], [0.5, 0.5]])
    assert np.allclose(apply_function(M, square), M, atol=1e-14)


def test_apply_function_domain_error():
    with pytest.raises(DomainError):
        apply_function(np.diag([2.0]), gap_root)


def test_apply_function_snaps_endpoints():
    """An eigenvalue within the snap distance of 0 is treated as exactly 0."""
    M = np.diag([1e-14, 0.5])
    snapped = apply_function(M, gap_root, snap=SNAP_TOL)
    unsnapped = apply_function(M, gap_root)

    assert snapped[0, 0].real == 0.0
    assert unsnapped[0, 0].real == pytest.approx(1e-7, rel=1e-6)
    assert snapped[1, 1].real == pytest.approx(0.5)


def test_sampled_function():
    identity_samples = SampledFunction([0.0, 1.0], [0.0, 1.0])
    M = np.diag([0.25, 0.75])
    assert np.allclose(apply_function(M, identity_samples), M, atol=1e-14)
    with pytest.raises(InvalidInput):
        SampledFunction([0.0, 0.0], [0.0, 1.0])
    with pytest.raises(DomainError):
        apply_function(np.diag([1.5]), identity_samples)


def test_direct_sum_is_block_diagonal():
    M = direct_sum(np.eye(1), 2.0 * np.eye(2))
    assert M.shape == (3, 3)
    assert np.array_equal(np.diag(M).real, [1.0, 2.0, 2.0])


def test_seeded_randomness():
    """Same seed, same unitary; different streams differ."""
    U1 = random_unitary(3, seeded_rng(11))
    U2 = random_unitary(3, seeded_rng(11))
    U3 = random_unitary(3, seeded_rng(11, stream=1))

    assert np.array_equal(U1, U2)
    assert not np.allclose(U1, U3)
    assert np.allclose(adjoint(U1) @ U1, np.eye(3), atol=1e-12)
    with pytest.raises(InvalidInput):
        seeded_rng(-5)


def test_random_projection():
    P = random_projection(5, 2, seeded_rng(1))
    assert is_projection(P)
    assert np.trace(P).real == pytest.approx(2.0)
    with pytest.raises(ShapeError):
        random_projection(2, 3, seeded_rng(1))


@settings(max_examples=25, deadline=None)
@given(n=st.integers(min_value=1, max_value=6), seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_conjugation_preserves_norm(n, seed):
    rng = seeded_rng(seed)
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    H = 0.5 * (X + adjoint(X))
    U = random_unitary(n, rng)
    assert op_norm(conjugate(H, U)) == pytest.approx(op_norm(H), rel=1e-10, abs=1e-12)
