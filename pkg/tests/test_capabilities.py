import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpc.capabilities import (
    COHERENCE_CREATION,
    COHERENCE_PRESERVATION,
    ENTANGLEMENT_GENERATION,
    FIG1_SUPERPOSITION_BASIS,
    KIND_NAMES,
    NON_CLASSICAL,
    SUPERPOSITION,
    CapabilityKind,
    SolverError,
    alpha,
    beta,
    build_incapable_model,
    default_kinds,
    fidelity_threshold,
    measure,
    process_fidelity,
)
from qpc.processes import (
    ProcessMatrix,
    compose,
    cz_process,
    demo_process,
    from_kraus,
    from_unitary,
    identity_process,
    random_channel,
)
from qpc.properties import _random_clifford, random_process_with_capability
from qpc.qmath import DimensionError, kron, random_unitary

seeds = st.integers(0, 2**32 - 1)
ENT = CapabilityKind.parse("entanglement")
CRE = CapabilityKind(COHERENCE_CREATION)
PRE = CapabilityKind(COHERENCE_PRESERVATION)
HADAMARD = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def dephasing(dim):
    return from_kraus([np.diag(np.eye(dim)[j]) for j in range(dim)])


def assert_alpha_witness(result, chi):
    witness = result.witness
    assert witness.trace == pytest.approx(1 - result.value, abs=1e-6)
    assert np.linalg.eigvalsh(chi.choi - witness.choi)[0] >= -1e-6
    assert witness.min_eigenvalue() >= -1e-6
    eq, psd = result.model.constraint_slack(result.solution.x)
    assert eq <= 1e-6 and psd >= -1e-6


def assert_beta_witness(result, chi):
    witness = result.witness
    assert witness.trace == pytest.approx(1 + result.value, abs=1e-6)
    assert np.linalg.eigvalsh(witness.choi - chi.choi)[0] >= -1e-6
    eq, psd = result.model.constraint_slack(result.solution.x)
    assert eq <= 1e-6 and psd >= -1e-6


def test_kind_parsing():
    assert CapabilityKind.parse("ent").name == ENTANGLEMENT_GENERATION
    assert CapabilityKind.parse("NCL").name == NON_CLASSICAL
    assert CapabilityKind.parse("coherence_creation").name == COHERENCE_CREATION
    sup = CapabilityKind.parse("sup")
    assert sup.name == SUPERPOSITION and np.allclose(sup.basis, FIG1_SUPERPOSITION_BASIS)
    assert [k.name for k in default_kinds()] == list(KIND_NAMES)
    with pytest.raises(ValueError):
        CapabilityKind.parse("teleportation")


def test_kind_basis_validation():
    with pytest.raises(ValueError):
        CapabilityKind(COHERENCE_CREATION, np.array([[1, 0], [1, 1]]) / np.sqrt([1, 2])[:, None])
    with pytest.raises(ValueError):
        CapabilityKind(SUPERPOSITION, np.array([[1, 0], [1, 0]]))
    with pytest.raises(ValueError):
        CapabilityKind(SUPERPOSITION, np.array([[1, 0], [1, 1]]))
    CapabilityKind(COHERENCE_PRESERVATION, HADAMARD)


def test_model_structure():
    ent = build_incapable_model(ENT)
    assert len(ent.blocks) == 36
    assert ent.problem.n_real_dof == 36 * 16
    ncl = build_incapable_model(CapabilityKind(NON_CLASSICAL))
    assert len(ncl.blocks) == 64
    assert ncl.problem.n_real_dof == 64 * 16
    sup = build_incapable_model(CapabilityKind.parse("sup"))
    assert len(sup.blocks) == 16 and len(sup.scalars) == 16
    with pytest.raises(DimensionError):
        build_incapable_model(ENT, dim=2)


def test_identity_record_is_coherence_creation_incapable():
    """Qubit case: the identity channel creates no coherence."""
    chi = identity_process(2)
    assert alpha(chi, CRE).value == pytest.approx(0, abs=1e-6)
    assert beta(chi, CRE).value == pytest.approx(0, abs=1e-6)
    assert alpha(identity_process(4), CRE).value == pytest.approx(0, abs=1e-6)


def test_identity_and_cz_for_entanglement():
    assert alpha(identity_process(4), ENT).value == pytest.approx(0, abs=1e-6)
    assert beta(identity_process(4), ENT).value == pytest.approx(0, abs=1e-6)
    assert alpha(cz_process(), ENT).value == pytest.approx(1, abs=1e-6)
    assert beta(cz_process(), ENT).value > 0.5


def test_hadamard_creates_coherence_and_dephasing_kills_it():
    h = from_unitary(HADAMARD)
    assert alpha(h, CRE).value == pytest.approx(1, abs=1e-6)
    assert beta(h, CRE).value > 0.1
    assert alpha(dephasing(2), PRE).value == pytest.approx(0, abs=1e-6)
    assert beta(dephasing(2), PRE).value == pytest.approx(0, abs=1e-6)
    assert alpha(identity_process(2), PRE).value == pytest.approx(1, abs=1e-6)


def test_rotated_coherence_basis():
    """Z swaps |+> and |->; S turns |+> into the coherent (|0> + i|1>)/sqrt2."""
    kind = CapabilityKind(COHERENCE_CREATION, HADAMARD)
    z, s = from_unitary(np.diag([1, -1])), from_unitary(np.diag([1, 1j]))
    assert alpha(z, kind).value == pytest.approx(0, abs=1e-6)
    assert alpha(identity_process(2), kind).value == pytest.approx(0, abs=1e-6)
    assert alpha(s, kind).value == pytest.approx(1, abs=1e-6)
    assert alpha(s, CRE).value == pytest.approx(0, abs=1e-6)


def test_fidelity_examples():
    assert process_fidelity(cz_process(), cz_process()) == pytest.approx(1)
    assert process_fidelity(identity_process(4), cz_process()) == pytest.approx(0.25)
    assert process_fidelity(demo_process(np.pi), cz_process()) == pytest.approx(1)
    assert fidelity_threshold(identity_process(4), ENT).value == pytest.approx(1, abs=1e-6)


@pytest.mark.parametrize("name", [NON_CLASSICAL, ENTANGLEMENT_GENERATION, COHERENCE_PRESERVATION, SUPERPOSITION])
def test_ideal_gate_beats_fidelity_threshold(name):
    kind = CapabilityKind.parse(name)
    assert process_fidelity(demo_process(np.pi), cz_process()) > fidelity_threshold(cz_process(), kind).value + 0.2


def test_cz_is_not_a_coherence_creation_target():
    assert fidelity_threshold(cz_process(), CRE).value == pytest.approx(1, abs=1e-6)


def test_cp_constraint_matters_for_entanglement_threshold():
    relaxed = fidelity_threshold(cz_process(), ENT, completely_positive=False).value
    strict = fidelity_threshold(cz_process(), ENT).value
    assert strict == pytest.approx(0.5, abs=1e-4)
    assert relaxed > strict + 0.1


def test_measure_dispatch_and_report():
    res = measure("fidelity", cz_process(), ENT)
    assert res.value == pytest.approx(0.5, abs=1e-4)
    doc = res.report(include_witness=True)
    assert doc["status"] == "optimal" and doc["kind"] == ENTANGLEMENT_GENERATION
    assert len(doc["witness"]["entries"]) == 256
    assert "witness" not in res.report()
    with pytest.raises(ValueError):
        measure("gamma", cz_process(), ENT)


def test_input_errors():
    with pytest.raises(DimensionError):
        alpha(identity_process(2), ENT)
    with pytest.raises(ValueError):
        beta(ProcessMatrix(2 * identity_process(4).choi, 4), ENT)


def test_non_positive_process_is_infeasible():
    choi = identity_process(2).choi.copy()
    choi += np.diag([0.2, -0.2, 0.2, -0.2])
    with pytest.raises(SolverError) as info:
        alpha(ProcessMatrix(choi, 2), CRE)
    assert info.value.solution.status == "infeasible"


@pytest.mark.parametrize("name", KIND_NAMES)
def test_witnesses_certify_values(name):
    kind = CapabilityKind.parse(name)
    chi = random_process_with_capability(kind, np.random.default_rng(11))
    a, b = alpha(chi, kind), beta(chi, kind)
    assert 0 <= a.value <= 1 + 1e-9
    assert b.value >= 0
    assert_alpha_witness(a, chi)
    assert_beta_witness(b, chi)


@settings(max_examples=3, deadline=None)
@given(seeds)
def test_superposition_in_computational_basis_is_coherence_creation(seed):
    chi = random_process_with_capability(CRE, np.random.default_rng(seed))
    sup = CapabilityKind(SUPERPOSITION, np.eye(4))
    assert alpha(chi, sup).value == pytest.approx(alpha(chi, CRE).value, abs=1e-5)
    assert beta(chi, sup).value == pytest.approx(beta(chi, CRE).value, abs=1e-5)


@settings(max_examples=3, deadline=None)
@given(seeds)
def test_coherence_basis_covariance(seed):
    """Measures in basis V equal measures in the computational basis after conjugating by V."""
    rng = np.random.default_rng(seed)
    v = random_unitary(4, rng)
    chi = random_channel(4, rng, 4)
    rotated = compose(from_unitary(v.conj().T), compose(chi, from_unitary(v)))
    kind = CapabilityKind(COHERENCE_PRESERVATION, v.T)
    assert beta(chi, kind).value == pytest.approx(beta(rotated, PRE).value, abs=1e-5)
    assert alpha(chi, kind).value == pytest.approx(alpha(rotated, PRE).value, abs=1e-5)


@settings(max_examples=3, deadline=None)
@given(seeds)
def test_entanglement_measures_invariant_under_local_rotations(seed):
    """Local unitaries after the process and local Cliffords before it leave alpha and beta unchanged."""
    rng = np.random.default_rng(seed)
    chi = random_process_with_capability(ENT, rng)
    after = from_unitary(kron(random_unitary(2, rng), random_unitary(2, rng)))
    before = from_unitary(kron(_random_clifford(rng), _random_clifford(rng)))
    moved = compose(after, compose(chi, before))
    assert alpha(moved, ENT).value == pytest.approx(alpha(chi, ENT).value, abs=1e-5)
    assert beta(moved, ENT).value == pytest.approx(beta(chi, ENT).value, abs=1e-5)
