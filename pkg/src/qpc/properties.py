"""Random incapable processes and the measure-property checks built on them.

Each sampler returns a CPTP two-qubit process that lies in the incapable set
of its class and whose composition with an incapable-set member, in either
order, stays in that set:

* entanglement generation: local Clifford rotations followed by local Pauli
  channels. These map Pauli-eigenstate products to mixtures of such products.
* non-classical: measure sigma_k x sigma_l, then prepare a mixture of Pauli
  eigenstate products that depends on the outcome.
* coherence creation: permutations with phases, and incoherent
  measure-and-prepare maps.
* coherence preservation: any measurement followed by incoherent preparation.
* superposition: any measurement followed by preparing superposition-free states.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .capabilities import (
    COHERENCE_CREATION,
    COHERENCE_PRESERVATION,
    ENTANGLEMENT_GENERATION,
    FIG1_SUPERPOSITION_BASIS,
    NON_CLASSICAL,
    SUPERPOSITION,
    CapabilityKind,
    alpha,
    beta,
)
from .processes import ProcessMatrix, choi_of_map, compose, from_kraus, mix, random_channel
from .qmath import PAULIS, kron, pauli_eigenstate, projector

SLACK = 1e-6

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1, 1j])


def _random_clifford(rng: np.random.Generator) -> np.ndarray:
    u = np.eye(2, dtype=complex)
    for gate in rng.integers(0, 2, size=8):
        u = (_H if gate == 0 else _S) @ u
    return u


def _local_pauli_kraus(rng: np.random.Generator) -> list[np.ndarray]:
    c = _random_clifford(rng)
    p = rng.dirichlet(np.ones(4))
    return [np.sqrt(pk) * s @ c for pk, s in zip(p, PAULIS)]


def local_pauli_process(rng: np.random.Generator) -> ProcessMatrix:
    k1, k2 = _local_pauli_kraus(rng), _local_pauli_kraus(rng)
    return from_kraus([kron(a, b) for a in k1 for b in k2])


def measure_prepare(povm: np.ndarray, prepared: np.ndarray) -> ProcessMatrix:
    """rho -> sum_j tr(povm_j rho) prepared_j."""
    dim = povm.shape[-1]
    return choi_of_map(lambda e: np.einsum("jab,ba,jpq->pq", povm, e, prepared), dim)


def _random_povm(dim: int, rng: np.random.Generator, outcomes: int) -> np.ndarray:
    g = rng.normal(size=(dim * outcomes, dim)) + 1j * rng.normal(size=(dim * outcomes, dim))
    q, _ = np.linalg.qr(g)
    blocks = q.reshape(outcomes, dim, dim)
    return np.einsum("jka,jkb->jab", blocks.conj(), blocks)


def _random_mixtures(states: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    w = rng.dirichlet(np.full(len(states), 0.5), size=count)
    return np.einsum("js,spq->jpq", w, states)


def pauli_product_states() -> np.ndarray:
    singles = [projector(pauli_eigenstate(k, m)) for k in (1, 2, 3) for m in (1, -1)]
    return np.array([kron(a, b) for a in singles for b in singles])


def pauli_measure_prepare(rng: np.random.Generator) -> ProcessMatrix:
    k, l = rng.integers(1, 4, size=2)
    povm = np.array(
        [
            kron(projector(pauli_eigenstate(k, a)), projector(pauli_eigenstate(l, b)))
            for a in (1, -1)
            for b in (1, -1)
        ]
    )
    return measure_prepare(povm, _random_mixtures(pauli_product_states(), 4, rng))


def incoherent_unitary_process(rng: np.random.Generator, dim: int = 4) -> ProcessMatrix:
    perm = np.eye(dim)[rng.permutation(dim)]
    phases = np.exp(2j * np.pi * rng.random(dim))
    return from_kraus([perm @ np.diag(phases)])


def _diagonal_states(dim: int) -> np.ndarray:
    return np.array([np.diag(np.eye(dim)[j]).astype(complex) for j in range(dim)])


def random_incapable(kind: CapabilityKind, rng: np.random.Generator) -> ProcessMatrix:
    """A random CPTP process in the incapable set of ``kind`` (two qubits)."""
    name = kind.name
    if name == ENTANGLEMENT_GENERATION:
        parts = [local_pauli_process(rng) for _ in range(2)]
    elif name == NON_CLASSICAL:
        parts = [pauli_measure_prepare(rng) for _ in range(2)]
    elif name == COHERENCE_CREATION:
        diag = _diagonal_states(4)
        basis_measure = measure_prepare(diag, _random_mixtures(diag, 4, rng))
        parts = [incoherent_unitary_process(rng), basis_measure]
    elif name == COHERENCE_PRESERVATION:
        diag = _diagonal_states(4)
        parts = [measure_prepare(_random_povm(4, rng, 3), _random_mixtures(diag, 3, rng)) for _ in range(2)]
    elif name == SUPERPOSITION:
        basis = FIG1_SUPERPOSITION_BASIS if kind.basis is None else kind.basis
        free = np.array([projector(h) for h in basis])
        parts = [measure_prepare(_random_povm(4, rng, 3), _random_mixtures(free, 3, rng)) for _ in range(2)]
    else:
        raise ValueError(f"no sampler for {name}")
    w = rng.dirichlet(np.ones(len(parts)))
    return mix(w, parts)


def random_process_with_capability(kind: CapabilityKind, rng: np.random.Generator) -> ProcessMatrix:
    """Random channel mixed with an incapable one, so alpha and beta are typically strictly inside (0, 1)."""
    q = rng.uniform(0.2, 0.9)
    n_kraus = int(rng.integers(1, 4))
    return mix([q, 1 - q], [random_channel(4, rng, n_kraus), random_incapable(kind, rng)])


@dataclass
class PropertyCheck:
    prop: str
    measure: str
    lhs: float
    rhs: float
    sample: int

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs + SLACK

    def __str__(self) -> str:
        mark = "ok" if self.passed else "VIOLATED"
        return f"{self.prop} {self.measure} sample {self.sample}: {self.lhs:.9f} <= {self.rhs:.9f} [{mark}]"


@dataclass
class PropertyReport:
    kind: CapabilityKind
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def count(self, prop: str, measure: str = "alpha") -> int:
        """Number of instances of ``prop`` checked for ``measure``."""
        return sum(1 for c in self.checks if c.prop == prop and c.measure == measure)


def _sample_checks(kind: CapabilityKind, index: int, seed: np.random.SeedSequence) -> list[PropertyCheck]:
    rng = np.random.default_rng(seed)
    chi = random_process_with_capability(kind, rng)
    inc1, inc2 = random_incapable(kind, rng), random_incapable(kind, rng)
    p = float(rng.uniform(0.1, 0.9))
    if index % 2 == 0:
        c1, c2 = compose(chi, inc1), compose(chi, inc2)
    else:
        c1, c2 = compose(inc1, chi), compose(inc2, chi)
    mixed = mix([p, 1 - p], [c1, c2])
    checks = []
    for name, fn in (("alpha", alpha), ("beta", beta)):
        v_inc1, v_inc2 = fn(inc1, kind).value, fn(inc2, kind).value
        v_chi = fn(chi, kind).value
        v1, v2 = fn(c1, kind).value, fn(c2, kind).value
        v_mix = fn(mixed, kind).value
        checks += [
            PropertyCheck("MP1", name, v_inc1, 0.0, index),
            PropertyCheck("MP1", name, v_inc2, 0.0, index),
            PropertyCheck("MP2a", name, v1, v_chi, index),
            PropertyCheck("MP2a", name, v2, v_chi, index),
            PropertyCheck("MP3", name, v_mix, p * v1 + (1 - p) * v2, index),
        ]
    return checks


def measure_properties(kind: CapabilityKind, n_samples: int, seed: int = 0, jobs: int = 1) -> PropertyReport:
    """Zero on incapable processes, monotonicity under incapable composition, convexity.

    Each sample draws a process chi, two incapable processes chi_I1, chi_I2
    and a weight p. That gives two (chi, chi_I) pairs per sample. alpha and
    beta must vanish on both chi_I, must not grow when chi is composed with
    either chi_I, and must be convex on the p-mixture of the two
    compositions. Even samples apply chi_I first, odd samples apply it last.
    Samples use independent child seeds, so results do not depend on ``jobs``.
    """
    seeds = np.random.SeedSequence(seed).spawn(n_samples)
    report = PropertyReport(kind)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_sample_checks, kind, i, s) for i, s in enumerate(seeds)]
            for fut in futures:
                report.checks += fut.result()
    else:
        for i, s in enumerate(seeds):
            report.checks += _sample_checks(kind, i, s)
    return report
