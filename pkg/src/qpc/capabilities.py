"""Incapable-process models and the capability quantifiers alpha, beta and F_I.

An incapable process is parameterized by its (unnormalized) outputs on a
fixed set of tomography inputs. Each capability class restricts those
outputs; the process matrix follows linearly from them through the
tomography reconstruction. On top of the per-class output constraints every
model also asks the reconstructed matrix to be positive semidefinite
(``completely_positive=True``). Without it the fidelity thresholds against CZ
come out as 0.625 for entanglement generation and unbounded for
superposition, instead of 0.500 and 0.750. alpha and beta are unchanged on
the demonstration processes, and for beta the condition is implied anyway.

Non-classical dynamics uses 64 classical vertex outputs, one per assignment
of +-1 to the three Pauli properties of each qubit. Preparing |k_m>|l_n>
fixes properties k and l to m and n; the four unprepared properties are
uniformly random. With this model the CZ threshold is 0.4665.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import sdp
from .processes import ProcessMatrix
from .qmath import TOL_PSD, DimensionError, ket, partial_transpose, projector
from .sdp import Affine, SdpProblem, SdpSolution
from .tomography import (
    InputScheme,
    choi_from_outputs,
    general_basis_scheme,
    pauli_product_scheme,
    rotate_scheme,
    superposition_coeffs,
)

NON_CLASSICAL = "non-classical"
ENTANGLEMENT_GENERATION = "entanglement-generation"
COHERENCE_CREATION = "coherence-creation"
COHERENCE_PRESERVATION = "coherence-preservation"
SUPERPOSITION = "superposition"

KIND_NAMES = (NON_CLASSICAL, ENTANGLEMENT_GENERATION, COHERENCE_CREATION, COHERENCE_PRESERVATION, SUPERPOSITION)

#: {|00>, (|00>+|01>)/sqrt2, (|00>+|10>)/sqrt2, (|00>+|11>)/sqrt2}
FIG1_SUPERPOSITION_BASIS = np.array(
    [
        [1, 0, 0, 0],
        [1, 1, 0, 0],
        [1, 0, 1, 0],
        [1, 0, 0, 1],
    ],
    dtype=complex,
) / np.array([1, np.sqrt(2), np.sqrt(2), np.sqrt(2)])[:, None]

ALPHA = "alpha"
BETA = "beta"
FIDELITY_THRESHOLD = "fidelity_threshold"


class SolverError(RuntimeError):
    """The SDP behind a measure did not reach a certified optimum."""

    def __init__(self, message: str, solution: SdpSolution):
        super().__init__(message)
        self.solution = solution


@dataclass(frozen=True, eq=False)
class CapabilityKind:
    """A capability class plus the basis it refers to, when it needs one.

    ``basis`` holds basis vectors as rows: an orthonormal basis for the
    coherence classes, a normalized linearly independent one for superposition.
    """

    name: str
    basis: np.ndarray | None = None

    def __post_init__(self):
        if self.name not in KIND_NAMES:
            raise ValueError(f"unknown capability {self.name!r}; expected one of {KIND_NAMES}")
        if self.basis is None:
            return
        basis = np.asarray(self.basis, dtype=complex)
        if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
            raise ValueError("basis must be a square array of row vectors")
        if self.name in (COHERENCE_CREATION, COHERENCE_PRESERVATION):
            if not np.allclose(basis @ basis.conj().T, np.eye(len(basis)), atol=1e-10):
                raise ValueError("coherence basis must be orthonormal")
        elif self.name == SUPERPOSITION:
            if not np.allclose(np.linalg.norm(basis, axis=1), 1, atol=1e-10):
                raise ValueError("superposition basis vectors must be normalized")
            if np.linalg.matrix_rank(basis) < len(basis):
                raise ValueError("superposition basis must be linearly independent")
        object.__setattr__(self, "basis", basis)

    @classmethod
    def parse(cls, name: str, basis=None) -> "CapabilityKind":
        aliases = {
            "ncl": NON_CLASSICAL,
            "nonclassical": NON_CLASSICAL,
            "ent": ENTANGLEMENT_GENERATION,
            "entanglement": ENTANGLEMENT_GENERATION,
            "cre": COHERENCE_CREATION,
            "pre": COHERENCE_PRESERVATION,
            "sup": SUPERPOSITION,
        }
        name = name.strip().lower().replace("_", "-")
        name = aliases.get(name, name)
        if name == SUPERPOSITION and basis is None:
            basis = FIG1_SUPERPOSITION_BASIS
        return cls(name, basis)

    def __str__(self) -> str:
        return self.name


def default_kinds() -> list[CapabilityKind]:
    """The five classes of the two-qubit demonstration, in sweep order."""
    return [CapabilityKind.parse(name) for name in KIND_NAMES]


@dataclass(eq=False)
class IncapableModel:
    """SDP variables and constraints describing unnormalized incapable processes.

    ``outputs`` are the symbolic outputs for ``scheme.states`` and ``chi`` the
    reconstructed unnormalized process matrix. ``eq_constraints`` and
    ``psd_constraints`` are exactly the class constraints, kept apart from
    whatever a measure adds to ``problem`` later.
    """

    kind: CapabilityKind
    problem: SdpProblem
    scheme: InputScheme
    outputs: Affine
    chi: Affine
    blocks: list = field(default_factory=list)
    scalars: list = field(default_factory=list)
    eq_constraints: list = field(default_factory=list)
    psd_constraints: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.scheme.dim

    @property
    def trace_expr(self) -> Affine:
        return self.chi.trace()

    def add_eq(self, expr: Affine) -> None:
        self.eq_constraints.append(expr)
        self.problem.add_eq(expr)

    def add_psd(self, expr: Affine) -> None:
        self.psd_constraints.append(expr)
        self.problem.add_psd(expr)

    def witness(self, solution: SdpSolution) -> ProcessMatrix:
        choi = solution.value(self.chi)
        return ProcessMatrix((choi + choi.conj().T) / 2, self.dim)

    def constraint_slack(self, x: np.ndarray) -> tuple[float, float]:
        """(largest equality violation, smallest PSD eigenvalue) of the class constraints at ``x``."""
        eq = max((float(np.max(np.abs(e.value(x)))) for e in self.eq_constraints), default=0.0)
        psd = [float(np.linalg.eigvalsh(e.value(x))[0]) for e in self.psd_constraints]
        psd += [float(x[s.index]) for s in self.scalars]
        return eq, min(psd, default=np.inf)


def _block_outputs(problem: SdpProblem, count: int, dim: int):
    blocks = [problem.add_hermitian_var(dim) for _ in range(count)]
    return blocks, Affine.stack([b.expr for b in blocks])


def _two_qubit_only(kind: CapabilityKind, dim: int) -> None:
    if dim != 4:
        raise DimensionError(f"{kind.name} is only defined for two qubits (dim 4), got dim {dim}")


def _entanglement_model(kind, problem, dim):
    _two_qubit_only(kind, dim)
    scheme = pauli_product_scheme(2)
    blocks, outputs = _block_outputs(problem, len(scheme), 4)
    model = IncapableModel(kind, problem, scheme, outputs, None, blocks)
    for b in blocks:
        model.add_psd(b.expr)
        model.add_psd(b.expr.map(lambda a: partial_transpose(a, 1, (2, 2))))

    def out(k, m, l, n):
        return outputs[scheme.index(((k, m), (l, n)))]

    signs = (-1, 1)
    # I = sum_m |k_m><k_m| for every k: the output of I on either qubit must not
    # depend on which Pauli eigenbasis was used to prepare it.
    for l, n in itertools.product((1, 2, 3), signs):
        ref = sum(out(1, m, l, n) for m in signs)
        for k in (2, 3):
            model.add_eq(sum(out(k, m, l, n) for m in signs) - ref)
    for k, m in itertools.product((1, 2, 3), signs):
        ref = sum(out(k, m, 1, n) for n in signs)
        for l in (2, 3):
            model.add_eq(sum(out(k, m, l, n) for n in signs) - ref)
    ref = sum(out(1, m, 1, n) for m in signs for n in signs)
    for k, l in itertools.product((1, 2, 3), repeat=2):
        if (k, l) != (1, 1):
            model.add_eq(sum(out(k, m, l, n) for m in signs for n in signs) - ref)
    return model


def classical_vertices() -> list[tuple[int, ...]]:
    """All 64 assignments (v^1_1, v^1_2, v^1_3, v^2_1, v^2_2, v^2_3) in {+1, -1}^6."""
    return list(itertools.product((1, -1), repeat=6))


def vertex_distribution(scheme: InputScheme) -> np.ndarray:
    """P[i, xi]: probability of classical vertex xi given the i-th Pauli-product input."""
    vertices = classical_vertices()
    prob = np.zeros((len(scheme), len(vertices)))
    for i, ((k, m), (l, n)) in enumerate(scheme.labels):
        for j, v in enumerate(vertices):
            if v[k - 1] == m and v[3 + l - 1] == n:
                prob[i, j] = 1 / 16
    return prob


def _non_classical_model(kind, problem, dim):
    _two_qubit_only(kind, dim)
    scheme = pauli_product_scheme(2)
    blocks, vertex_outputs = _block_outputs(problem, 64, 4)
    prob = vertex_distribution(scheme)
    outputs = vertex_outputs.map(lambda a: np.einsum("ix,...xpq->...ipq", prob, a))
    model = IncapableModel(kind, problem, scheme, outputs, None, blocks)
    for b in blocks:
        model.add_psd(b.expr)
    return model


def _coherence_model(kind, problem, dim):
    scheme = general_basis_scheme(dim)
    v = np.eye(dim, dtype=complex) if kind.basis is None else kind.basis.T
    if kind.basis is not None:
        if kind.basis.shape != (dim, dim):
            raise DimensionError(f"coherence basis must have {dim} vectors of length {dim}")
        scheme = rotate_scheme(scheme, v)
    blocks, outputs = _block_outputs(problem, len(scheme), dim)
    model = IncapableModel(kind, problem, scheme, outputs, None, blocks)
    off_diagonal = 1 - np.eye(dim)
    for b in blocks:
        model.add_psd(b.expr)
    for i, (k, m, n) in enumerate(scheme.labels):
        if kind.name == COHERENCE_PRESERVATION or k == 1:
            in_basis = outputs[i].map(lambda a: v.conj().T @ a @ v)
            model.add_eq(in_basis * off_diagonal)
    return model


def _superposition_model(kind, problem, dim):
    basis = FIG1_SUPERPOSITION_BASIS if kind.basis is None else kind.basis
    if basis.shape != (dim, dim):
        raise DimensionError(f"superposition basis must have {dim} vectors of length {dim}")
    scheme = general_basis_scheme(dim)
    blocks, outputs = _block_outputs(problem, len(scheme), dim)
    model = IncapableModel(kind, problem, scheme, outputs, None, blocks)
    for b in blocks:
        model.add_psd(b.expr)
    e = superposition_coeffs(basis, dim)
    free = np.array([projector(h) for h in basis])
    for j in range(len(basis)):
        weights = [problem.add_scalar_var(nonneg=True) for _ in range(len(basis))]
        model.scalars += weights
        image = outputs.map(lambda a: np.tensordot(e[j], a, axes=([0], [-3])))
        mixture = sum(w.expr * free[jj] for jj, w in enumerate(weights))
        model.add_eq(image - mixture)
    return model


_BUILDERS = {
    ENTANGLEMENT_GENERATION: _entanglement_model,
    NON_CLASSICAL: _non_classical_model,
    COHERENCE_CREATION: _coherence_model,
    COHERENCE_PRESERVATION: _coherence_model,
    SUPERPOSITION: _superposition_model,
}


def build_incapable_model(kind: CapabilityKind, dim: int = 4, completely_positive: bool = True) -> IncapableModel:
    if isinstance(kind, str):
        kind = CapabilityKind.parse(kind)
    problem = SdpProblem()
    model = _BUILDERS[kind.name](kind, problem, dim)
    coeffs = model.scheme.coefficients
    model.chi = model.outputs.map(lambda a: choi_from_outputs(coeffs, a))
    if completely_positive:
        model.add_psd(model.chi)
    return model


@dataclass(eq=False)
class MeasureResult:
    measure: str
    kind: CapabilityKind
    value: float
    status: str
    witness: ProcessMatrix | None
    solution: SdpSolution = field(repr=False)
    model: IncapableModel | None = field(default=None, repr=False)

    def report(self, include_witness: bool = False) -> dict:
        doc = {
            "kind": self.kind.name,
            "measure": self.measure,
            "value": self.value,
            "status": self.status,
            "solver": self.solution.report(),
        }
        if include_witness and self.witness is not None:
            doc["witness"] = self.witness.to_json()
        return doc


def _finish(measure: str, model: IncapableModel, solution: SdpSolution, value_fn) -> MeasureResult:
    if solution.status == sdp.INFEASIBLE:
        raise SolverError(f"incapable set for {model.kind.name} is empty (infeasible SDP)", solution)
    if not solution.optimal:
        raise SolverError(
            f"{measure} for {model.kind.name}: solver status {solution.status} ({solution.solver_status})",
            solution,
        )
    return MeasureResult(
        measure, model.kind, value_fn(solution), solution.status, model.witness(solution), solution, model
    )


def _check_process(chi: ProcessMatrix, model: IncapableModel, what: str) -> None:
    if chi.dim != model.dim:
        raise DimensionError(f"{what} has dim {chi.dim}, model expects {model.dim}")
    if abs(chi.trace - 1) > 1e-6:
        raise ValueError(f"{what} must have unit trace, got {chi.trace}")


def _face(chi: ProcessMatrix) -> tuple[np.ndarray, np.ndarray] | None:
    """Orthonormal bases of the range and kernel of a PSD chi, or None if chi is not PSD."""
    w, u = np.linalg.eigh(chi.choi)
    scale = max(1.0, float(w[-1]))
    if w[0] < -TOL_PSD * scale:
        return None
    keep = w > TOL_PSD * scale
    return u[:, keep], u[:, ~keep]


def alpha(chi_expt: ProcessMatrix, kind: CapabilityKind, completely_positive: bool = True) -> MeasureResult:
    """Capability composition: least weight of a capable part, min 1 - tr(chi_I).

    With complete positivity, 0 <= chi_I <= chi_expt forces chi_I to vanish on
    the kernel of chi_expt, so both cone constraints are imposed on the range
    of chi_expt only. This keeps the cones small and restores a strictly
    feasible point for low-rank chi_expt, e.g. unitary processes.
    """
    model = build_incapable_model(kind, chi_expt.dim, completely_positive=False)
    _check_process(chi_expt, model, "chi_expt")
    p = model.problem
    face = _face(chi_expt) if completely_positive else None
    if face is None:
        if completely_positive:
            model.add_psd(model.chi)
        p.add_psd(chi_expt.choi - model.chi)
    else:
        rng, ker = face
        if ker.shape[1]:
            model.add_eq(model.chi @ ker)
        model.add_psd(rng.conj().T @ model.chi @ rng)
        p.add_psd(rng.conj().T @ (chi_expt.choi - model.chi) @ rng)
    p.minimize(1 - model.trace_expr.map(np.real))
    return _finish(ALPHA, model, p.solve(), lambda s: max(s.objective_value, 0.0))


def beta(chi_expt: ProcessMatrix, kind: CapabilityKind, completely_positive: bool = True) -> MeasureResult:
    """Capability robustness: least noise weight, min tr(chi_I) - 1 with chi_I above chi_expt.

    For a PSD chi_expt, chi_I >= chi_expt already makes chi_I completely
    positive, and the separate constraint is left out.
    """
    cp_needed = completely_positive and _face(chi_expt) is None
    model = build_incapable_model(kind, chi_expt.dim, completely_positive=cp_needed)
    _check_process(chi_expt, model, "chi_expt")
    p = model.problem
    trace = model.trace_expr.map(np.real)
    p.add_psd(model.chi - chi_expt.choi)
    p.add_nonneg(trace - 1)
    p.minimize(trace - 1)
    return _finish(BETA, model, p.solve(), lambda s: max(s.objective_value, 0.0))


def fidelity_threshold(chi_target: ProcessMatrix, kind: CapabilityKind, completely_positive: bool = True) -> MeasureResult:
    """Best overlap tr(chi_I chi_target) reachable by a normalized incapable process."""
    model = build_incapable_model(kind, chi_target.dim, completely_positive)
    _check_process(chi_target, model, "chi_target")
    p = model.problem
    p.add_eq(model.trace_expr - 1)
    p.maximize((model.chi @ chi_target.choi).trace().map(np.real))
    return _finish(FIDELITY_THRESHOLD, model, p.solve(), lambda s: s.objective_value)


def process_fidelity(chi_expt: ProcessMatrix, chi_target: ProcessMatrix) -> float:
    if chi_expt.dim != chi_target.dim:
        raise DimensionError(f"dims differ: {chi_expt.dim} vs {chi_target.dim}")
    return float(np.real(np.trace(chi_expt.choi @ chi_target.choi)))


def measure(name: str, chi: ProcessMatrix, kind: CapabilityKind, completely_positive: bool = True) -> MeasureResult:
    funcs = {ALPHA: alpha, BETA: beta, FIDELITY_THRESHOLD: fidelity_threshold, "fidelity": fidelity_threshold}
    try:
        fn = funcs[name]
    except KeyError:
        raise ValueError(f"unknown measure {name!r}") from None
    return fn(chi, kind, completely_positive)


def incoherent_basis(dim: int) -> np.ndarray:
    return np.array([ket(j, dim) for j in range(dim)])
