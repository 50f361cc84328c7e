"""Tomography input schemes and linear process reconstruction.

Every scheme reduces to a coefficient array ``C`` of shape (d, d, N) with

    L(|m><n|) = sum_i C[m, n, i] * out_i

where ``out_i`` is the output for the i-th input state. ``reconstruct`` is a
single contraction with ``C``; the capability SDPs push symbolic outputs
through the same contraction, so numeric and symbolic reconstruction cannot
drift apart.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .processes import ProcessMatrix, apply
from .qmath import PAULIS, DimensionError, kron, ket, pauli_eigenstate, projector

PAULI_PRODUCT = "pauli-product"
GENERAL_BASIS = "general-basis"


@dataclass(frozen=True, eq=False)
class InputScheme:
    """Ordered list of tomography input states.

    ``labels`` are ``((k1, m1), (k2, m2), ...)`` per qubit for the Pauli
    product scheme and ``(k, m, n)`` for the general-basis scheme.
    """

    kind: str
    dim: int
    labels: tuple
    states: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        return self.labels.index(label)

    @cached_property
    def coefficients(self) -> np.ndarray:
        if self.kind == PAULI_PRODUCT:
            return _pauli_coefficients(self)
        return _general_coefficients(self)


@dataclass(frozen=True, eq=False)
class OutputRecord:
    scheme: InputScheme
    outputs: np.ndarray

    def __post_init__(self):
        outs = np.asarray(self.outputs, dtype=complex)
        d = self.scheme.dim
        if outs.shape != (len(self.scheme), d, d):
            raise ValueError(
                f"record needs {len(self.scheme)} outputs of shape ({d}, {d}), got {outs.shape}"
            )
        object.__setattr__(self, "outputs", outs)

    def __add__(self, other: "OutputRecord") -> "OutputRecord":
        return OutputRecord(self.scheme, self.outputs + other.outputs)

    def __rmul__(self, c: float) -> "OutputRecord":
        return OutputRecord(self.scheme, c * self.outputs)


def pauli_product_scheme(n_qubits: int = 2) -> InputScheme:
    """Products of Pauli eigenstates |k_m> on each qubit: 6**n_qubits states."""
    if n_qubits < 1:
        raise DimensionError("need at least one qubit")
    per_qubit = [(k, m) for k in (1, 2, 3) for m in (-1, 1)]
    labels = sorted(
        itertools.product(per_qubit, repeat=n_qubits),
        key=lambda lab: tuple(k for k, _ in lab) + tuple(m for _, m in lab),
    )
    states = []
    for lab in labels:
        rho = np.ones((1, 1), dtype=complex)
        for k, m in lab:
            rho = kron(rho, projector(pauli_eigenstate(k, m)))
        states.append(rho)
    return InputScheme(PAULI_PRODUCT, 2**n_qubits, tuple(labels), np.array(states))


def general_basis_scheme(dim: int) -> InputScheme:
    """The d**2 states |m>, (|m>+|n>)/sqrt2 and (|m>+i|n>)/sqrt2 with m < n."""
    if dim < 2:
        raise DimensionError("general-basis scheme needs dim >= 2")
    labels, states = [], []
    for m in range(dim):
        labels.append((1, m, m))
        states.append(projector(ket(m, dim)))
    for k, phase in ((2, 1), (3, 1j)):
        for m, n in itertools.combinations(range(dim), 2):
            labels.append((k, m, n))
            states.append(projector((ket(m, dim) + phase * ket(n, dim)) / np.sqrt(2)))
    return InputScheme(GENERAL_BASIS, dim, tuple(labels), np.array(states))


def make_scheme(kind: str, size: int) -> InputScheme:
    """``size`` is the qubit count for Pauli products and the dimension otherwise."""
    if kind == PAULI_PRODUCT:
        return pauli_product_scheme(size)
    if kind == GENERAL_BASIS:
        return general_basis_scheme(size)
    raise ValueError(f"unknown scheme kind {kind!r}")


def rotate_scheme(scheme: InputScheme, v: np.ndarray) -> InputScheme:
    """Re-express a scheme in the orthonormal basis given by the columns of ``v``.

    The inputs become v rho v^dagger and the coefficients are transformed so
    that reconstruction still yields the Choi matrix in the computational basis.
    """
    v = np.asarray(v, dtype=complex)
    d = scheme.dim
    if v.shape != (d, d) or not np.allclose(v.conj().T @ v, np.eye(d), atol=1e-10):
        raise ValueError("basis must be given as the columns of a unitary matrix")
    states = v @ scheme.states @ v.conj().T
    rotated = InputScheme(scheme.kind, d, scheme.labels, states)
    # |a><b| = sum_mn conj(v[a, m]) v[b, n] |v_m><v_n|
    coeffs = np.einsum("am,bn,mni->abi", v.conj(), v, scheme.coefficients)
    rotated.__dict__["coefficients"] = coeffs
    return rotated


def _pauli_coefficients(scheme: InputScheme) -> np.ndarray:
    n_qubits = len(scheme.labels[0])
    d = scheme.dim
    # weights[s, i]: output of the Pauli string s as a combination of recorded outputs.
    # A non-identity slot k contributes the eigenvalue sign m of the matching input;
    # an identity slot averages the three decompositions I = sum_m |k_m><k_m|.
    strings = list(itertools.product(range(4), repeat=n_qubits))
    weights = np.zeros((len(strings), len(scheme)))
    for s, ks in enumerate(strings):
        for i, lab in enumerate(scheme.labels):
            w = 1.0
            for kj, (k, m) in zip(ks, lab):
                if kj == 0:
                    w /= 3
                elif kj == k:
                    w *= m
                else:
                    w = 0.0
                    break
            weights[s, i] = w
    # xi[s, a, b] = tr(|a><b| sigma_s) / d, so |a><b| = sum_s xi[s, a, b] sigma_s
    sigma = np.array([_pauli_string(ks) for ks in strings])
    xi = np.transpose(sigma, (0, 2, 1)) / d
    return np.einsum("sab,si->abi", xi, weights)


def _pauli_string(ks) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for k in ks:
        out = kron(out, PAULIS[k])
    return out


def _general_coefficients(scheme: InputScheme) -> np.ndarray:
    d = scheme.dim
    c = np.zeros((d, d, len(scheme)), dtype=complex)
    for m in range(d):
        c[m, m, scheme.index((1, m, m))] = 1
    for m, n in itertools.combinations(range(d), 2):
        p, q = scheme.index((2, m, n)), scheme.index((3, m, n))
        dm, dn = scheme.index((1, m, m)), scheme.index((1, n, n))
        # |m><n| = P + iQ - (1+i)/2 (|m><m| + |n><n|), and its adjoint for |n><m|
        c[m, n, p], c[m, n, q] = 1, 1j
        c[m, n, dm] = c[m, n, dn] = -(1 + 1j) / 2
        c[n, m, p], c[n, m, q] = 1, -1j
        c[n, m, dm] = c[n, m, dn] = -(1 - 1j) / 2
    return c


def simulate_tomography(chi: ProcessMatrix, scheme: InputScheme) -> OutputRecord:
    if chi.dim != scheme.dim:
        raise DimensionError(f"process dim {chi.dim} does not match scheme dim {scheme.dim}")
    return OutputRecord(scheme, np.array([apply(chi, rho) for rho in scheme.states]))


def choi_from_outputs(coefficients: np.ndarray, outputs: np.ndarray) -> np.ndarray:
    """Contract stacked outputs (..., N, d, d) into Choi matrices (..., d*d, d*d).

    Leading axes are carried through, which lets the SDP layer reconstruct a
    whole stack of variable coefficients at once.
    """
    d = coefficients.shape[0]
    choi = np.einsum("mni,...ipq->...mpnq", coefficients, outputs) / d
    return choi.reshape(*choi.shape[:-4], d * d, d * d)


def reconstruct(record: OutputRecord) -> ProcessMatrix:
    """Linear inversion of a complete output record.

    The trace of the result is the mean trace of the outputs for the Pauli
    product scheme and the mean trace over the diagonal inputs |m> for the
    general-basis scheme.
    """
    choi = choi_from_outputs(record.scheme.coefficients, record.outputs)
    return ProcessMatrix(choi, record.scheme.dim)


def superposition_coeffs(basis, dim: int | None = None) -> np.ndarray:
    """Expansion coefficients of |h_j><h_j| over the general-basis inputs.

    Returns ``e`` of shape (len(basis), d**2), columns aligned with
    ``general_basis_scheme(d).labels``, such that
    sum_i e[j, i] rho_i = |h_j><h_j|.
    """
    basis = np.asarray(basis, dtype=complex)
    dim = basis.shape[1] if dim is None else dim
    if basis.ndim != 2 or basis.shape[1] != dim:
        raise DimensionError(f"basis vectors must have length {dim}")
    if np.linalg.matrix_rank(basis) < len(basis):
        raise ValueError("superposition basis is linearly dependent")
    norms = np.linalg.norm(basis, axis=1)
    if not np.allclose(norms, 1, atol=1e-10):
        raise ValueError("superposition basis vectors must be normalized")
    scheme = general_basis_scheme(dim)
    e = np.zeros((len(basis), len(scheme)))
    for j, h in enumerate(basis):
        x = projector(h)
        pair = {}
        for m, n in itertools.combinations(range(dim), 2):
            # tr(|h><h| |m><n|) = x[n, m]
            e2, e3 = 2 * x[n, m].real, 2 * x[n, m].imag
            e[j, scheme.index((2, m, n))] = e2
            e[j, scheme.index((3, m, n))] = e3
            pair[m, n] = pair[n, m] = e2 + e3
        for m in range(dim):
            shared = sum(pair[m, l] for l in range(dim) if l != m)
            e[j, scheme.index((1, m, m))] = x[m, m].real - shared / 2
    return e
