"""Dense complex linear algebra and quantum-state primitives.

Matrices are plain ``numpy`` arrays. Most operations act on the trailing two
axes, so a stack of matrices (shape ``(..., n, n)``) is handled the same way
as a single matrix. The SDP layer relies on this to push coefficient stacks
through the same partial transpose / partial trace code used on states.
"""
from __future__ import annotations

import numpy as np

# Tolerance ladder shared by every module.
TOL_ALGEBRA = 1e-12
TOL_HERMITIAN = 1e-10
TOL_PSD = 1e-9
TOL_SOLVER = 1e-7
TOL_PAPER = 5e-3

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

#: sigma_0 = I, sigma_1 = X, sigma_2 = Y, sigma_3 = Z
PAULIS = (I2, X, Y, Z)


class DimensionError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class NotHermitianError(ValueError):
    """A Hermitian argument was required."""


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def is_hermitian(h: np.ndarray, tol: float = TOL_HERMITIAN) -> bool:
    h = np.asarray(h)
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        return False
    return bool(np.max(np.abs(h - dagger(h)), initial=0.0) <= tol)


def _check_bipartite(n: int, dims: tuple[int, int]) -> tuple[int, int]:
    d1, d2 = (int(d) for d in dims)
    if d1 * d2 != n:
        raise DimensionError(f"dims {dims} do not factor a {n}x{n} matrix")
    return d1, d2


def partial_transpose(rho: np.ndarray, subsystem: int = 1, dims: tuple[int, int] = (2, 2)) -> np.ndarray:
    """Transpose one factor of a bipartite operator.

    ``subsystem`` is 0 for the first factor and 1 for the second. For the
    second factor the result satisfies <i k|rho^T2|j l> = <i l|rho|j k>.
    """
    rho = np.asarray(rho)
    n = rho.shape[-1]
    if rho.shape[-2] != n:
        raise DimensionError("partial_transpose needs square matrices")
    d1, d2 = _check_bipartite(n, dims)
    lead = rho.shape[:-2]
    t = rho.reshape(*lead, d1, d2, d1, d2)
    k = len(lead)
    if subsystem == 1:
        t = np.swapaxes(t, k + 1, k + 3)
    elif subsystem == 0:
        t = np.swapaxes(t, k, k + 2)
    else:
        raise DimensionError(f"subsystem must be 0 or 1, got {subsystem}")
    return t.reshape(*lead, n, n)


def partial_trace(rho: np.ndarray, subsystem: int = 1, dims: tuple[int, int] = (2, 2)) -> np.ndarray:
    """Trace out ``subsystem`` (0 = first factor, 1 = second factor)."""
    rho = np.asarray(rho)
    n = rho.shape[-1]
    if rho.shape[-2] != n:
        raise DimensionError("partial_trace needs square matrices")
    d1, d2 = _check_bipartite(n, dims)
    lead = rho.shape[:-2]
    t = rho.reshape(*lead, d1, d2, d1, d2)
    if subsystem == 1:
        return np.einsum("...ajbj->...ab", t)
    if subsystem == 0:
        return np.einsum("...jajb->...ab", t)
    raise DimensionError(f"subsystem must be 0 or 1, got {subsystem}")


def min_eigenvalue(h: np.ndarray) -> float:
    h = np.asarray(h)
    if not is_hermitian(h):
        raise NotHermitianError("min_eigenvalue requires a Hermitian matrix")
    return float(np.linalg.eigvalsh(h)[0])


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product tr(a^dagger b)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def pauli_eigenstate(k: int, m: int) -> np.ndarray:
    """Eigenvector |k_m> of sigma_k (k in 1..3) for eigenvalue m in {+1, -1}.

    Phases are fixed so that |3_{+1}> = |0>, |1_{+1}> = |+>, |2_{+1}> = |+i>.
    """
    s = 1 / np.sqrt(2)
    table = {
        (1, 1): [s, s],
        (1, -1): [s, -s],
        (2, 1): [s, 1j * s],
        (2, -1): [s, -1j * s],
        (3, 1): [1, 0],
        (3, -1): [0, 1],
    }
    try:
        return np.array(table[(k, m)], dtype=complex)
    except KeyError:
        raise ValueError(f"no Pauli eigenstate for k={k}, m={m}") from None


def check_density_matrix(rho: np.ndarray, normalized: bool = True) -> np.ndarray:
    """Validate a density matrix and return it as a complex array.

    With ``normalized=False`` only a nonnegative trace is required.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"density matrix must be square, got shape {rho.shape}")
    if not is_hermitian(rho):
        raise NotHermitianError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if normalized and abs(tr - 1) > TOL_HERMITIAN:
        raise ValueError(f"density matrix trace is {tr}, expected 1")
    if not normalized and tr < -TOL_HERMITIAN:
        raise ValueError(f"unnormalized density matrix has negative trace {tr}")
    if np.linalg.eigvalsh(rho)[0] < -TOL_PSD:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real
