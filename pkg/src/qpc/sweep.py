"""Configuration-driven sweeps of the demonstration process over interaction time."""
from __future__ import annotations

import csv
import io
import json
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import sdp
from .capabilities import (
    ENTANGLEMENT_GENERATION,
    FIG1_SUPERPOSITION_BASIS,
    SUPERPOSITION,
    CapabilityKind,
    SolverError,
    alpha,
    beta,
    default_kinds,
    fidelity_threshold,
    process_fidelity,
)
from .processes import NoiseModel, ProcessMatrix, cz_process, demo_process, identity_process
from .resources import eta_ent, eta_sup

CSV_HEADER = ("t", "capability", "alpha", "beta", "f_expt", "f_threshold", "eta", "status")
MEASURES = ("alpha", "beta", "fidelity")
NOT_APPLICABLE = "not-applicable"

# A target the incapable set reproduces perfectly carries no threshold information.
DEFAULT_NOT_APPLICABLE_TOL = 1e-5

_TIME = re.compile(r"^\s*(?P<num>[0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*(?P<den>[0-9.eE+-]+))?\s*$")


class ConfigError(ValueError):
    """The run configuration is unreadable or inconsistent."""


def parse_time(value) -> float:
    """A number, or a multiple of pi written as e.g. "pi", "4*pi", "pi/2"."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        m = _TIME.match(value)
        if m:
            num = float(m["num"]) if m["num"] else 1.0
            den = float(m["den"]) if m["den"] else 1.0
            return num * np.pi / den
        try:
            return float(value)
        except ValueError:
            pass
    raise ConfigError(f"cannot read time value {value!r}")


def parse_vector(raw) -> np.ndarray:
    """A state vector given as numbers or [re, im] pairs."""
    entries = []
    for z in raw:
        if isinstance(z, (list, tuple)):
            if len(z) != 2:
                raise ConfigError(f"complex entries must be [re, im] pairs, got {z!r}")
            entries.append(complex(float(z[0]), float(z[1])))
        else:
            entries.append(complex(float(z)))
    return np.array(entries)


def parse_basis(raw) -> np.ndarray:
    try:
        vectors = [parse_vector(v) for v in raw]
        basis = np.array(vectors)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed basis: {exc}") from exc
    if basis.ndim != 2:
        raise ConfigError("basis vectors must all have the same length")
    norms = np.linalg.norm(basis, axis=1)
    if np.any(norms == 0):
        raise ConfigError("basis contains a zero vector")
    return basis / norms[:, None]


def load_target(spec, base_dir: Path) -> ProcessMatrix:
    if spec == "cz":
        return cz_process()
    if spec == "identity":
        return identity_process(4)
    if isinstance(spec, dict) and "file" in spec:
        path = base_dir / spec["file"]
        try:
            return ProcessMatrix.from_json(json.loads(path.read_text()))
        except (OSError, json.JSONDecodeError, ValueError) as exc:
            raise ConfigError(f"cannot load target process {path}: {exc}") from exc
    raise ConfigError(f"unknown target {spec!r}; use 'cz', 'identity' or {{\"file\": ...}}")


@dataclass
class RunConfig:
    gamma: float = 0.02
    t_start: float = 0.0
    t_stop: float = 4 * np.pi
    steps: int = 100
    capabilities: list = field(default_factory=default_kinds)
    target_name: str = "cz"
    target: ProcessMatrix = field(default_factory=cz_process, repr=False)
    measures: tuple = MEASURES
    output_path: str | None = None
    noise_qubit: int = 0
    not_applicable_tol: float = DEFAULT_NOT_APPLICABLE_TOL

    def __post_init__(self):
        if self.steps < 1:
            raise ConfigError("t_grid.steps must be at least 1")
        if self.t_stop < self.t_start:
            raise ConfigError("t_grid.stop must not be smaller than t_grid.start")
        if self.t_start < 0:
            raise ConfigError("interaction times must be nonnegative")
        if self.gamma < 0:
            raise ConfigError("gamma must be nonnegative")
        unknown = set(self.measures) - set(MEASURES)
        if unknown:
            raise ConfigError(f"unknown measures {sorted(unknown)}; choose from {MEASURES}")

    @property
    def noise(self) -> NoiseModel:
        return NoiseModel(self.gamma, self.noise_qubit)

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_stop, self.steps)

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Path | str = ".") -> "RunConfig":
        if not isinstance(doc, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {"gamma", "t_grid", "capabilities", "target", "superposition_basis", "measures",
                 "output_path", "noise_qubit", "tolerances"}
        extra = set(doc) - known
        if extra:
            raise ConfigError(f"unknown configuration keys {sorted(extra)}")
        base_dir = Path(base_dir)
        kw = {}
        try:
            if "gamma" in doc:
                kw["gamma"] = float(doc["gamma"])
            grid = doc.get("t_grid", {})
            if "start" in grid:
                kw["t_start"] = parse_time(grid["start"])
            if "stop" in grid:
                kw["t_stop"] = parse_time(grid["stop"])
            if "steps" in grid:
                steps = grid["steps"]
                if not isinstance(steps, int) or isinstance(steps, bool):
                    raise ConfigError("t_grid.steps must be an integer")
                kw["steps"] = steps
            sup_basis = parse_basis(doc["superposition_basis"]) if "superposition_basis" in doc else None
            if "capabilities" in doc:
                kw["capabilities"] = [_parse_kind(c, sup_basis) for c in doc["capabilities"]]
            elif sup_basis is not None:
                kw["capabilities"] = [_parse_kind(k.name, sup_basis) for k in default_kinds()]
            if "target" in doc:
                spec = doc["target"]
                kw["target_name"] = spec if isinstance(spec, str) else str(spec.get("file"))
                kw["target"] = load_target(spec, base_dir)
            if "measures" in doc:
                kw["measures"] = tuple(doc["measures"])
            if "output_path" in doc:
                kw["output_path"] = str(doc["output_path"])
            if "noise_qubit" in doc:
                kw["noise_qubit"] = int(doc["noise_qubit"])
            tolerances = doc.get("tolerances", {})
            if set(tolerances) - {"not_applicable"}:
                raise ConfigError("only the 'not_applicable' tolerance can be overridden")
            if "not_applicable" in tolerances:
                kw["not_applicable_tol"] = float(tolerances["not_applicable"])
            return cls(**kw)
        except ConfigError:
            raise
        except (TypeError, ValueError, KeyError, AttributeError) as exc:
            raise ConfigError(f"invalid configuration: {exc}") from exc

    @classmethod
    def load(cls, path: Path | str) -> "RunConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(doc, path.parent)


def _parse_kind(spec, sup_basis) -> CapabilityKind:
    if isinstance(spec, str):
        name, basis = spec, None
    elif isinstance(spec, dict) and "name" in spec:
        name = spec["name"]
        basis = parse_basis(spec["basis"]) if "basis" in spec else None
    else:
        raise ConfigError(f"capability must be a name or {{name, basis}}, got {spec!r}")
    kind = CapabilityKind.parse(name)
    if kind.name == SUPERPOSITION and basis is None and sup_basis is not None:
        basis = sup_basis
    return CapabilityKind(kind.name, basis) if basis is not None else kind


@dataclass
class SweepRow:
    t: float
    capability: str
    alpha: float | None = None
    beta: float | None = None
    f_expt: float | None = None
    f_threshold: float | None = None
    eta: float | None = None
    status: str = sdp.OPTIMAL

    def cells(self) -> list[str]:
        def fmt(v):
            return "" if v is None else f"{v:.10g}"

        return [fmt(self.t), self.capability, fmt(self.alpha), fmt(self.beta), fmt(self.f_expt),
                fmt(self.f_threshold), fmt(self.eta), self.status]


@dataclass
class Threshold:
    value: float | None
    status: str


def _worse(current: str, new: str) -> str:
    rank = {sdp.OPTIMAL: 0, NOT_APPLICABLE: 1, sdp.UNBOUNDED: 2, sdp.INFEASIBLE: 2, sdp.NUMERICAL_FAILURE: 3}
    return new if rank.get(new, 3) > rank.get(current, 3) else current


def thresholds(config: RunConfig) -> dict:
    """F_I per capability, computed once per run since it does not depend on t."""
    out = {}
    if "fidelity" not in config.measures:
        return out
    for kind in config.capabilities:
        try:
            value = fidelity_threshold(config.target, kind).value
        except SolverError as exc:
            out[kind.name] = Threshold(None, exc.solution.status)
            continue
        if value >= 1 - config.not_applicable_tol:
            out[kind.name] = Threshold(None, NOT_APPLICABLE)
        else:
            out[kind.name] = Threshold(value, sdp.OPTIMAL)
    return out


def _eta(kind: CapabilityKind, t: float, noise: NoiseModel) -> float | None:
    if kind.name == ENTANGLEMENT_GENERATION:
        return eta_ent(t, noise, with_beta=False).eta
    if kind.name == SUPERPOSITION and (kind.basis is None or np.allclose(kind.basis, FIG1_SUPERPOSITION_BASIS)):
        return eta_sup(t, noise, with_beta=False).eta
    return None


def rows_at(t: float, config: RunConfig, fi: dict) -> list[SweepRow]:
    chi = demo_process(t, config.noise)
    rows = []
    for kind in config.capabilities:
        row = SweepRow(float(t), kind.name)
        for name, fn in (("alpha", alpha), ("beta", beta)):
            if name not in config.measures:
                continue
            try:
                setattr(row, name, fn(chi, kind).value)
            except SolverError as exc:
                row.status = _worse(row.status, exc.solution.status)
        if "fidelity" in config.measures:
            row.f_expt = process_fidelity(chi, config.target)
            th = fi[kind.name]
            row.f_threshold = th.value
            row.status = _worse(row.status, th.status)
        try:
            row.eta = _eta(kind, t, config.noise)
        except SolverError as exc:
            row.status = _worse(row.status, exc.solution.status)
        rows.append(row)
    return rows


def run_sweep(config: RunConfig, jobs: int = 1) -> list[SweepRow]:
    """All rows, ordered by t and then by the configured capability order."""
    fi = thresholds(config)
    times = config.times()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_t = list(pool.map(rows_at, times, [config] * len(times), [fi] * len(times)))
    else:
        per_t = [rows_at(t, config, fi) for t in times]
    return [row for rows in per_t for row in rows]


def render_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.cells())
    return buf.getvalue()


def all_optimal(rows: list[SweepRow]) -> bool:
    return all(r.status in (sdp.OPTIMAL, NOT_APPLICABLE) for r in rows)
