import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpc.qmath import (
    I2,
    PAULIS,
    X,
    Y,
    Z,
    DimensionError,
    NotHermitianError,
    check_density_matrix,
    hs_inner,
    ket,
    kron,
    min_eigenvalue,
    partial_trace,
    partial_transpose,
    pauli_eigenstate,
    projector,
    random_density_matrix,
    random_unitary,
)
from qpc.processes import cz_process, identity_process
from qpc.sdp import real_embedding

BELL = projector((ket(0, 4) + ket(3, 4)) / np.sqrt(2))


def random_hermitian(seed, n=4):
    r = np.random.default_rng(seed)
    a = r.normal(size=(n, n)) + 1j * r.normal(size=(n, n))
    return a + a.conj().T


def test_kron_examples():
    assert np.allclose(kron(I2, I2), np.eye(4))
    assert np.allclose(kron(Z, Z), np.diag([1, -1, -1, 1]))
    assert np.allclose(kron(X, X) @ ket(0, 4), ket(3, 4))


def test_partial_transpose_bell_and_involution():
    pt = partial_transpose(BELL)
    assert min_eigenvalue(pt) == pytest.approx(-0.5, abs=1e-12)
    assert np.allclose(partial_transpose(pt), BELL)
    assert np.allclose(partial_transpose(partial_transpose(BELL, 0), 0), BELL)


def test_partial_transpose_entry_rule(rng):
    rho = random_density_matrix(4, rng)
    t = rho.reshape(2, 2, 2, 2)
    pt = partial_transpose(rho).reshape(2, 2, 2, 2)
    for i, k, j, l in np.ndindex(2, 2, 2, 2):
        assert pt[i, k, j, l] == pytest.approx(t[i, l, j, k])


def test_partial_transpose_product_state_stays_psd(rng):
    a, b = random_density_matrix(2, rng), random_density_matrix(2, rng)
    pt = partial_transpose(kron(a, b))
    assert np.allclose(pt, kron(a, b.T))
    assert min_eigenvalue(pt) >= -1e-12


def test_partial_transpose_dims_mismatch():
    with pytest.raises(DimensionError):
        partial_transpose(np.eye(4), 1, (2, 3))
    with pytest.raises(DimensionError):
        partial_transpose(np.eye(4), 2)


def test_partial_trace_examples(rng):
    a, b = random_density_matrix(2, rng), random_density_matrix(2, rng)
    assert np.allclose(partial_trace(kron(a, b), 1), a)
    assert np.allclose(partial_trace(kron(a, b), 0), b)
    assert np.allclose(partial_trace(BELL, 0), I2 / 2)
    rho = random_density_matrix(4, rng)
    assert np.trace(partial_trace(rho, 1)).real == pytest.approx(1.0)
    with pytest.raises(DimensionError):
        partial_trace(np.eye(6), 1, (2, 2))


def test_partial_ops_broadcast_over_stacks(rng):
    stack = np.array([random_density_matrix(4, rng) for _ in range(3)])
    assert np.allclose(partial_transpose(stack)[1], partial_transpose(stack[1]))
    assert np.allclose(partial_trace(stack, 0)[2], partial_trace(stack[2], 0))


def test_min_eigenvalue_examples():
    assert min_eigenvalue(I2) == pytest.approx(1.0)
    assert min_eigenvalue(np.diag([3.0, -2.0])) == pytest.approx(-2.0)
    with pytest.raises(NotHermitianError):
        min_eigenvalue(np.array([[0, 1], [0, 0]]))


def test_hs_inner_examples(rng):
    psi = random_unitary(4, rng)[:, 0]
    assert hs_inner(projector(psi), projector(psi)) == pytest.approx(1.0)
    assert hs_inner(np.eye(4) / 4, np.eye(4) / 4) == pytest.approx(0.25)
    assert hs_inner(cz_process().choi, identity_process(4).choi) == pytest.approx(0.25)
    with pytest.raises(DimensionError):
        hs_inner(np.eye(2), np.eye(3))


def test_pauli_constants_and_eigenstates():
    for k in (1, 2, 3):
        total = sum(projector(pauli_eigenstate(k, m)) for m in (1, -1))
        assert np.allclose(total, I2, atol=1e-12)
        for m in (1, -1):
            v = pauli_eigenstate(k, m)
            assert np.allclose(PAULIS[k] @ v, m * v)
    assert np.allclose(X @ Y, 1j * Z)
    with pytest.raises(ValueError):
        pauli_eigenstate(0, 1)


def test_check_density_matrix():
    check_density_matrix(np.eye(2) / 2)
    with pytest.raises(ValueError):
        check_density_matrix(np.eye(2))
    check_density_matrix(np.eye(2), normalized=False)
    with pytest.raises(NotHermitianError):
        check_density_matrix(np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(ValueError):
        check_density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(DimensionError):
        check_density_matrix(np.ones((2, 3)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_partial_transpose_preserves_trace_and_hermiticity(seed):
    h = random_hermitian(seed)
    pt = partial_transpose(h)
    assert np.trace(pt) == pytest.approx(np.trace(h), abs=1e-12)
    assert np.allclose(pt, pt.conj().T, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-6, 6))
def test_psd_iff_real_embedding_psd(seed, shift):
    h = random_hermitian(seed) + shift * np.eye(4)
    lam = np.linalg.eigvalsh(h)
    emb = np.linalg.eigvalsh(real_embedding(h))
    assert np.allclose(np.sort(np.repeat(lam, 2)), emb, atol=1e-10)
    assert (lam[0] >= 0) == (emb[0] >= 0)
