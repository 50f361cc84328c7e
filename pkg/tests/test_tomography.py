import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpc.capabilities import FIG1_SUPERPOSITION_BASIS
from qpc.processes import depolarizing_process, identity_process, mix, random_channel
from qpc.qmath import DimensionError, projector, random_unitary
from qpc.tomography import (
    OutputRecord,
    general_basis_scheme,
    make_scheme,
    pauli_product_scheme,
    reconstruct,
    rotate_scheme,
    simulate_tomography,
    superposition_coeffs,
)

seeds = st.integers(0, 2**32 - 1)


def test_scheme_sizes_and_states():
    assert len(pauli_product_scheme(1)) == 6
    assert len(pauli_product_scheme(2)) == 36
    assert len(general_basis_scheme(2)) == 4
    assert len(general_basis_scheme(4)) == 16
    for scheme in (pauli_product_scheme(2), general_basis_scheme(4), general_basis_scheme(3)):
        traces = np.einsum("ijj->i", scheme.states)
        assert np.allclose(traces, 1)
        purities = np.einsum("ijk,ikj->i", scheme.states, scheme.states)
        assert np.allclose(purities, 1)


def test_general_basis_qubit_states():
    s = general_basis_scheme(2)
    plus = np.array([1, 1]) / np.sqrt(2)
    plus_i = np.array([1, 1j]) / np.sqrt(2)
    expected = [np.diag([1, 0]), np.diag([0, 1]), projector(plus), projector(plus_i)]
    assert s.labels == ((1, 0, 0), (1, 1, 1), (2, 0, 1), (3, 0, 1))
    assert np.allclose(s.states, expected)


def test_scheme_errors():
    with pytest.raises(DimensionError):
        general_basis_scheme(1)
    with pytest.raises(DimensionError):
        pauli_product_scheme(0)
    with pytest.raises(ValueError):
        make_scheme("bogus", 2)
    with pytest.raises(ValueError):
        rotate_scheme(general_basis_scheme(2), np.ones((2, 2)))


def test_identity_record_reconstructs_identity():
    for scheme in (pauli_product_scheme(2), general_basis_scheme(4)):
        record = OutputRecord(scheme, scheme.states)
        assert reconstruct(record).allclose(identity_process(4), atol=1e-12)


def test_depolarizing_record():
    scheme = general_basis_scheme(2)
    record = simulate_tomography(depolarizing_process(0.0), scheme)
    assert np.allclose(record.outputs, np.eye(2) / 2)
    assert reconstruct(record).allclose(depolarizing_process(0.0), atol=1e-12)


def test_record_shape_and_dimension_checks():
    with pytest.raises(ValueError):
        OutputRecord(general_basis_scheme(2), np.zeros((3, 2, 2)))
    with pytest.raises(DimensionError):
        simulate_tomography(identity_process(2), pauli_product_scheme(2))


def test_superposition_coefficients_rebuild_projectors():
    scheme = general_basis_scheme(4)
    e = superposition_coeffs(FIG1_SUPERPOSITION_BASIS)
    for j, h in enumerate(FIG1_SUPERPOSITION_BASIS):
        assert np.allclose(np.tensordot(e[j], scheme.states, axes=1), projector(h), atol=1e-12)
    comp = superposition_coeffs(np.eye(4))
    assert np.allclose(comp[:, :4], np.eye(4))
    assert np.allclose(comp[:, 4:], 0)


def test_superposition_coefficients_errors():
    with pytest.raises(ValueError):
        superposition_coeffs(np.array([[1, 0], [1, 0]]))
    with pytest.raises(ValueError):
        superposition_coeffs(np.array([[1, 1], [1, 0]]))
    with pytest.raises(DimensionError):
        superposition_coeffs(np.eye(2), dim=3)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_random_basis_coefficients(seed):
    basis = random_unitary(3, np.random.default_rng(seed))
    e = superposition_coeffs(basis)
    states = general_basis_scheme(3).states
    for j, h in enumerate(basis):
        assert np.allclose(np.tensordot(e[j], states, axes=1), projector(h), atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(seeds, st.sampled_from(["pauli", "general"]))
def test_round_trip(seed, which):
    r = np.random.default_rng(seed)
    chi = random_channel(4, r, int(r.integers(1, 5)))
    scheme = pauli_product_scheme(2) if which == "pauli" else general_basis_scheme(4)
    assert np.max(np.abs(reconstruct(simulate_tomography(chi, scheme)).choi - chi.choi)) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_rotated_scheme_round_trip(seed):
    r = np.random.default_rng(seed)
    chi = random_channel(4, r, 2)
    scheme = rotate_scheme(general_basis_scheme(4), random_unitary(4, r))
    assert reconstruct(simulate_tomography(chi, scheme)).allclose(chi, atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_reconstruction_is_linear(seed):
    r = np.random.default_rng(seed)
    a, b = random_channel(4, r), random_channel(4, r)
    p = float(r.uniform())
    scheme = pauli_product_scheme(2)
    record = p * simulate_tomography(a, scheme) + (1 - p) * simulate_tomography(b, scheme)
    assert reconstruct(record).allclose(mix([p, 1 - p], [a, b]), atol=1e-10)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_pauli_outputs_are_consistent(seed):
    """Summing over the two eigenstates of any Pauli gives the same output."""
    r = np.random.default_rng(seed)
    chi = random_channel(4, r, 2)
    scheme = pauli_product_scheme(2)
    out = simulate_tomography(chi, scheme).outputs

    def total(k, l):
        return sum(out[scheme.index(((k, m), (l, n)))] for m in (-1, 1) for n in (-1, 1))

    for k in (1, 2, 3):
        for l in (1, 2, 3):
            assert np.allclose(total(k, l), total(1, 1), atol=1e-12)
