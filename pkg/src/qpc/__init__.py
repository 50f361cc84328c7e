"""Quantum process capability: composition, robustness and fidelity thresholds via SDP."""
from .capabilities import (
    CapabilityKind,
    IncapableModel,
    MeasureResult,
    SolverError,
    alpha,
    beta,
    build_incapable_model,
    fidelity_threshold,
    process_fidelity,
)
from .processes import (
    NoiseModel,
    ProcessMatrix,
    apply,
    compose,
    cz_process,
    demo_process,
    depolarizing_process,
    from_unitary,
    identity_process,
    mix,
)
from .resources import coherence_robustness, concurrence, eta_ent, eta_sup, superposition_robustness

__version__ = "0.1.0"

__all__ = [
    "CapabilityKind",
    "IncapableModel",
    "MeasureResult",
    "NoiseModel",
    "ProcessMatrix",
    "SolverError",
    "alpha",
    "apply",
    "beta",
    "build_incapable_model",
    "coherence_robustness",
    "compose",
    "concurrence",
    "cz_process",
    "demo_process",
    "depolarizing_process",
    "eta_ent",
    "eta_sup",
    "fidelity_threshold",
    "from_unitary",
    "identity_process",
    "mix",
    "process_fidelity",
    "superposition_robustness",
]
