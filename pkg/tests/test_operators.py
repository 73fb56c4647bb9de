import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qubitfield.operators import (
    EPS,
    SIGMA,
    NonHermitianError,
    QubitTriple,
    anticommutator,
    commutator,
    decompose,
    embed_triple,
    is_hermitian,
    kron,
    partial_trace_rest,
    pauli,
    random_hermitian,
    random_unitary,
    triple_residual,
    verify_triple,
)

# Written out by hand so the Pauli tests do not depend on SIGMA.
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.array([[1, 0], [0, -1]], dtype=complex)


def test_pauli_matrices_match_literals():
    for j, m in zip((1, 2, 3), (X, Y, Z)):
        assert np.array_equal(pauli(j), m)


@pytest.mark.parametrize("j", [0, 4, -1])
def test_pauli_rejects_bad_index(j):
    with pytest.raises(ValueError):
        pauli(j)


def test_xy_is_iz():
    # epsilon_123 = +1 orientation
    assert np.allclose(X @ Y, 1j * Z)
    assert EPS[0, 1, 2] == 1 and EPS[1, 0, 2] == -1


def test_kron_matches_numpy():
    a = np.arange(4).reshape(2, 2)
    b = np.arange(9).reshape(3, 3)
    assert np.array_equal(kron(a, b), np.kron(a, b))


def test_commutators_of_paulis():
    assert np.allclose(commutator(X, Y), 2j * Z)
    assert np.allclose(anticommutator(X, X), 2 * np.eye(2))
    with pytest.raises(ValueError):
        commutator(X, np.eye(3))


@pytest.mark.parametrize("n", [2, 4, 8])
def test_embedded_triple_is_exact(n):
    check = verify_triple(embed_triple(n), tol=1e-12)
    assert check.residual == 0.0 and check.passed


@pytest.mark.parametrize("n", [0, 3, 5])
def test_embed_rejects_odd_dimension(n):
    with pytest.raises(ValueError):
        embed_triple(n)


def test_conjugated_triples_stay_in_algebra(rng):
    t = embed_triple(6)
    for _ in range(10):
        assert verify_triple(t.conjugate(random_unitary(6, rng)), tol=1e-12).passed


def test_non_hermitian_triple_is_rejected():
    q = embed_triple(4).q.copy()
    q[0] = q[0] + 1e-3j * np.eye(4)
    with pytest.raises(NonHermitianError):
        verify_triple(q)


def test_algebra_failure_is_reported_not_raised():
    q = embed_triple(4).q * 1.01
    check = verify_triple(q)
    assert not check.passed
    # |1.01^2 - 1| from the diagonal products dominates
    assert check.residual == pytest.approx(0.0201, rel=1e-9)


def test_residual_broadcasts_over_sites(rng):
    t = embed_triple(4)
    field = np.stack([t.conjugate(random_unitary(4, rng)).q for _ in range(5)])
    assert triple_residual(field).shape == (5,)


def test_triple_is_read_only():
    t = embed_triple(4)
    with pytest.raises(ValueError):
        t.q[0, 0, 0] = 5


def test_frame_maps_triple_to_standard_form(rng):
    t = embed_triple(8).conjugate(random_unitary(8, rng))
    v = t.frame
    assert np.allclose(v.conj().T @ v, np.eye(8), atol=1e-12)
    for j in range(3):
        assert np.allclose(t.to_frame(t[j]), np.kron(SIGMA[j], np.eye(4)), atol=1e-12)


def test_decomposition_reconstructs(rng):
    t = embed_triple(4).conjugate(random_unitary(4, rng))
    a = random_hermitian(4, rng)
    parts = decompose(t, a)
    assert np.allclose(parts.reconstruct(), t.to_frame(a), atol=1e-12)


def test_partial_trace_matches_reshape_in_standard_frame(rng):
    # In the embedded frame the partial trace is a plain reshape-and-trace.
    t = embed_triple(6)
    a = random_hermitian(6, rng)
    expected = np.einsum("arbr->ab", a.reshape(2, 3, 2, 3))
    assert np.allclose(partial_trace_rest(t, a), expected, atol=1e-12)


def test_partial_trace_is_frame_covariant(rng):
    u = random_unitary(4, rng)
    t = embed_triple(4).conjugate(u)
    a = random_hermitian(4, rng)
    # conjugating both operator and triple leaves the reduced matrix unchanged
    assert np.allclose(partial_trace_rest(t, u.conj().T @ a @ u), partial_trace_rest(embed_triple(4), a), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), half=st.integers(1, 4))
def test_random_hermitian_is_hermitian(seed, half):
    a = random_hermitian(2 * half, np.random.default_rng(seed), size=3)
    assert a.shape == (3, 2 * half, 2 * half)
    assert is_hermitian(a)


def test_qubit_triple_shape_check():
    with pytest.raises(ValueError):
        QubitTriple(np.zeros((2, 4, 4)))
