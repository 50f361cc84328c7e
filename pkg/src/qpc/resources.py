"""State-level resource quantifiers and coherence-conversion efficiencies.

The superposition robustness used in the conversion efficiency is expressed
in units of 2 + 2*sqrt(2), the robustness of CZ|h_3> in the Fig.-1 basis,
i.e. of the ideal output at t = pi. With this unit eta_sup reaches 1 at
t = pi, as required by the input normalization of unit coherence
robustness. It is not an upper bound: the Fig.-1 basis is not orthogonal
and other pure states have larger robustness.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .capabilities import FIG1_SUPERPOSITION_BASIS, CapabilityKind, SolverError, beta
from .processes import NoiseModel, apply, demo_process
from .qmath import Y, DimensionError, check_density_matrix, projector
from .sdp import SdpProblem

#: (|00> + |01> + |10> + |11>) / 2, the coherent input of the entanglement conversion
PLUS_PLUS = np.full(4, 0.5, dtype=complex)

#: Superposition robustness of CZ|h_3> in the Fig.-1 basis; the unit of eta_sup.
REFERENCE_SUPERPOSITION_ROBUSTNESS = 2 + 2 * np.sqrt(2)

ENTANGLEMENT = "entanglement"
SUPERPOSITION = "superposition"


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DimensionError(f"concurrence needs a two-qubit state, got shape {rho.shape}")
    yy = np.kron(Y, Y)
    flipped = rho @ yy @ rho.conj() @ yy
    # The spectrum of rho * rho~ is real and nonnegative; clip round-off before the root.
    lam = np.sqrt(np.clip(np.sort(np.linalg.eigvals(flipped).real)[::-1], 0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def _robustness(rho: np.ndarray, free_states: np.ndarray) -> float:
    """min sum(p) - 1 subject to sum_j p_j free_j >= rho, p >= 0."""
    problem = SdpProblem()
    weights = [problem.add_scalar_var(nonneg=True) for _ in free_states]
    dominating = sum(w.expr * f for w, f in zip(weights, free_states))
    problem.add_psd(dominating - rho)
    problem.minimize(sum(w.expr for w in weights) - 1)
    sol = problem.solve()
    if not sol.optimal:
        raise SolverError(f"robustness SDP ended with status {sol.status}", sol)
    return max(sol.objective_value, 0.0)


def coherence_robustness(rho: np.ndarray, basis: np.ndarray | None = None) -> float:
    """Least trace of a diagonal D >= rho, minus one; ``basis`` rows are the incoherent states."""
    rho = check_density_matrix(rho)
    d = rho.shape[0]
    basis = np.eye(d, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    if basis.shape != (d, d) or not np.allclose(basis @ basis.conj().T, np.eye(d), atol=1e-10):
        raise ValueError("coherence basis must be orthonormal and match the state dimension")
    return _robustness(rho, np.array([projector(b) for b in basis]))


def superposition_robustness(rho: np.ndarray, basis: np.ndarray = FIG1_SUPERPOSITION_BASIS) -> float:
    """Unnormalized superposition robustness with respect to the pure states ``basis``."""
    rho = check_density_matrix(rho)
    kind = CapabilityKind("superposition", basis)
    if kind.basis.shape[1] != rho.shape[0]:
        raise DimensionError("basis vectors do not match the state dimension")
    return _robustness(rho, np.array([projector(h) for h in kind.basis]))


def normalized_superposition_robustness(rho: np.ndarray) -> float:
    """Superposition robustness in the Fig.-1 basis in units of that of CZ|h_3>."""
    return superposition_robustness(rho, FIG1_SUPERPOSITION_BASIS) / REFERENCE_SUPERPOSITION_ROBUSTNESS


@dataclass(frozen=True)
class ConversionReport:
    """Conversion efficiency at one interaction time.

    ``state_resource`` is the concurrence, or the normalized superposition
    robustness, of the output state; the input coherence is normalized to
    one, so ``eta`` equals ``state_resource``.
    """

    resource: str
    t: float
    gamma: float
    eta: float
    state_resource: float
    beta_reference: float | None


def eta_ent(t: float, noise: NoiseModel | None = None, with_beta: bool = True) -> ConversionReport:
    noise = NoiseModel() if noise is None else noise
    chi = demo_process(t, noise)
    c = concurrence(apply(chi, projector(PLUS_PLUS)))
    ref = beta(chi, CapabilityKind.parse("entanglement")).value if with_beta else None
    return ConversionReport(ENTANGLEMENT, t, noise.gamma, c, c, ref)


def eta_sup(
    t: float,
    noise: NoiseModel | None = None,
    basis: np.ndarray = FIG1_SUPERPOSITION_BASIS,
    with_beta: bool = True,
) -> ConversionReport:
    noise = NoiseModel() if noise is None else noise
    kind = CapabilityKind("superposition", basis)
    if kind.basis.shape != FIG1_SUPERPOSITION_BASIS.shape or not np.allclose(kind.basis, FIG1_SUPERPOSITION_BASIS):
        raise ValueError("the superposition conversion efficiency is normalized for the Fig.-1 basis only")
    chi = demo_process(t, noise)
    out = apply(chi, projector(kind.basis[-1]))
    s = float(normalized_superposition_robustness((out + out.conj().T) / 2))
    ref = beta(chi, kind).value if with_beta else None
    return ConversionReport(SUPERPOSITION, t, noise.gamma, s, s, ref)
