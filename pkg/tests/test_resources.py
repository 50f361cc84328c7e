import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpc.capabilities import FIG1_SUPERPOSITION_BASIS, CapabilityKind, beta
from qpc.processes import CZ, NoiseModel, apply, demo_process
from qpc.qmath import DimensionError, kron, ket, projector, random_density_matrix, random_unitary
from qpc.resources import (
    REFERENCE_SUPERPOSITION_ROBUSTNESS,
    PLUS_PLUS,
    coherence_robustness,
    concurrence,
    eta_ent,
    eta_sup,
    normalized_superposition_robustness,
    superposition_robustness,
)

seeds = st.integers(0, 2**32 - 1)
BELL = projector((ket(0, 4) + ket(3, 4)) / np.sqrt(2))
H3 = FIG1_SUPERPOSITION_BASIS[3]


def test_concurrence_examples(rng):
    assert concurrence(BELL) == pytest.approx(1.0, abs=1e-9)
    assert concurrence(kron(random_density_matrix(2, rng), random_density_matrix(2, rng))) == pytest.approx(0, abs=1e-9)
    assert concurrence(np.eye(4) / 4) == pytest.approx(0, abs=1e-12)
    werner = 0.5 * BELL + 0.5 * np.eye(4) / 4
    assert concurrence(werner) == pytest.approx(0.25, abs=1e-9)
    with pytest.raises(DimensionError):
        concurrence(np.eye(2) / 2)


@settings(max_examples=25, deadline=None)
@given(seeds)
def test_concurrence_local_unitary_invariance(seed):
    r = np.random.default_rng(seed)
    rho = random_density_matrix(4, r)
    u = kron(random_unitary(2, r), random_unitary(2, r))
    assert concurrence(u @ rho @ u.conj().T) == pytest.approx(concurrence(rho), abs=1e-8)


def test_coherence_robustness_examples():
    assert coherence_robustness(projector(PLUS_PLUS)) == pytest.approx(3.0, abs=1e-6)
    assert coherence_robustness(np.diag([0.5, 0.3, 0.2, 0.0])) == pytest.approx(0, abs=1e-7)
    assert coherence_robustness(projector(np.array([1, 1]) / np.sqrt(2))) == pytest.approx(1.0, abs=1e-6)
    hadamard = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    assert coherence_robustness(projector(np.array([1, 0])), hadamard) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        coherence_robustness(np.eye(2) / 2, np.ones((2, 2)))


def test_superposition_robustness_examples():
    for h in FIG1_SUPERPOSITION_BASIS:
        assert superposition_robustness(projector(h)) == pytest.approx(0, abs=1e-7)
    image = CZ @ H3
    raw = superposition_robustness(projector(image))
    assert raw == pytest.approx(REFERENCE_SUPERPOSITION_ROBUSTNESS, abs=1e-5)
    assert normalized_superposition_robustness(projector(image)) == pytest.approx(1, abs=1e-6)
    with pytest.raises(DimensionError):
        superposition_robustness(np.eye(2) / 2)


@settings(max_examples=15, deadline=None)
@given(seeds)
def test_superposition_robustness_of_free_mixtures_vanishes(seed):
    r = np.random.default_rng(seed)
    w = r.dirichlet(np.ones(4))
    rho = sum(wj * projector(h) for wj, h in zip(w, FIG1_SUPERPOSITION_BASIS))
    assert superposition_robustness(rho) == pytest.approx(0, abs=1e-6)


@settings(max_examples=15, deadline=None)
@given(seeds, st.floats(0, 1))
def test_robustness_decreases_when_mixed_with_free_state(seed, p):
    r = np.random.default_rng(seed)
    rho = random_density_matrix(4, r)
    free = np.diag(r.dirichlet(np.ones(4))).astype(complex)
    mixed = p * rho + (1 - p) * free
    assert coherence_robustness(mixed) <= p * coherence_robustness(rho) + 1e-6


def test_eta_examples():
    assert eta_ent(np.pi / 2, with_beta=False).eta == pytest.approx(1 / np.sqrt(2), abs=1e-4)
    assert eta_ent(np.pi, with_beta=False).eta == pytest.approx(1.0, abs=1e-6)
    assert eta_sup(np.pi, with_beta=False).eta == pytest.approx(1.0, abs=1e-5)
    assert eta_sup(np.pi / 2, with_beta=False).eta == pytest.approx(0.621, abs=1e-3)
    rep = eta_ent(np.pi, NoiseModel(0.02))
    assert rep.resource == "entanglement" and rep.gamma == 0.02
    assert rep.eta == rep.state_resource
    assert rep.beta_reference == pytest.approx(0.9087, abs=1e-3)
    with pytest.raises(ValueError):
        eta_sup(np.pi, basis=np.eye(4))


@pytest.mark.parametrize("t", np.linspace(0, np.pi, 5))
def test_noiseless_entanglement_efficiency_equals_robustness(t):
    """Without noise eta_ent and beta_ent coincide over the whole half period."""
    rep = eta_ent(t)
    assert rep.eta == pytest.approx(rep.beta_reference, abs=1e-4)


def test_superposition_efficiency_and_robustness_respond_differently_to_noise():
    sup = CapabilityKind.parse("sup")
    t = np.pi / 2
    assert eta_sup(t, NoiseModel(0.02), with_beta=False).eta > eta_sup(t, with_beta=False).eta
    assert beta(demo_process(t, NoiseModel(0.02)), sup).value < beta(demo_process(t), sup).value


def test_output_state_of_plus_plus_at_pi_is_maximally_entangled():
    out = apply(demo_process(np.pi), projector(PLUS_PLUS))
    assert concurrence(out) == pytest.approx(1.0, abs=1e-9)
