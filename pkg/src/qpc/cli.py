"""Command-line front end: ``qpc sweep``, ``qpc measure`` and ``qpc validate``.

Exit codes: 0 success, 1 input error, 2 solver failure (or a failed
validation row).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .capabilities import CapabilityKind, SolverError, measure
from .processes import NoiseModel, ProcessMatrix, cz_process, demo_process, identity_process
from .qmath import is_hermitian
from .sweep import ConfigError, RunConfig, all_optimal, parse_basis, parse_time, render_csv, run_sweep

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2

#: Hermiticity and trace tolerance for ingested process matrices.
INGEST_TOL = 1e-6

MEASURE_NAMES = {"alpha": "alpha", "beta": "beta", "fidelity": "fidelity_threshold"}


class InputError(ValueError):
    pass


def ingest_process(doc) -> ProcessMatrix:
    """Validate an externally measured process matrix and symmetrize round-off."""
    if not isinstance(doc, dict) or "dim" not in doc or "entries" not in doc:
        raise InputError("process file must be a JSON object with 'dim' and 'entries'")
    try:
        d = int(doc["dim"])
        entries = np.asarray(doc["entries"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed process file: {exc}") from exc
    if d < 1 or entries.shape != (d**4, 2):
        raise InputError(f"expected {d**4} [re, im] pairs for dim {d}, got array of shape {entries.shape}")
    choi = (entries[:, 0] + 1j * entries[:, 1]).reshape(d * d, d * d)
    if not np.all(np.isfinite(choi)):
        raise InputError("process matrix has non-finite entries")
    if not is_hermitian(choi, INGEST_TOL):
        dev = float(np.max(np.abs(choi - choi.conj().T)))
        raise InputError(f"process matrix is not Hermitian (max deviation {dev:.3g} > {INGEST_TOL})")
    tr = float(np.trace(choi).real)
    if abs(tr - 1) > INGEST_TOL:
        raise InputError(f"process matrix trace is {tr:.9g}, expected 1 within {INGEST_TOL}")
    return ProcessMatrix((choi + choi.conj().T) / 2, d)


def builtin_process(spec: str) -> ProcessMatrix:
    """'cz', 'identity' or 'ising:t=<time>,gamma=<rate>[,qubit=<0|1>]'."""
    spec = spec.strip()
    if spec == "cz":
        return cz_process()
    if spec == "identity":
        return identity_process(4)
    if spec.startswith("ising"):
        params = {"t": None, "gamma": "0", "qubit": "0"}
        _, _, rest = spec.partition(":")
        for item in filter(None, rest.split(",")):
            key, sep, value = item.partition("=")
            key = key.strip()
            if not sep or key not in params:
                raise InputError(f"bad ising parameter {item!r}; expected t=..., gamma=..., qubit=...")
            params[key] = value.strip()
        if params["t"] is None:
            raise InputError("ising builtin needs t=<time>")
        try:
            t = parse_time(params["t"])
            noise = NoiseModel(float(params["gamma"]), int(params["qubit"]))
            return demo_process(t, noise)
        except (ConfigError, ValueError) as exc:
            raise InputError(str(exc)) from exc
    raise InputError(f"unknown builtin process {spec!r}")


def cmd_sweep(args) -> int:
    try:
        config = RunConfig.load(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = args.out or config.output_path
    if out is None:
        print("error: no output path (use --out or output_path in the config)", file=sys.stderr)
        return EXIT_INPUT
    rows = run_sweep(config, jobs=args.jobs)
    Path(out).write_text(render_csv(rows))
    failed = [r for r in rows if not all_optimal([r])]
    print(f"wrote {len(rows)} rows to {out}" + (f"; {len(failed)} with solver failures" if failed else ""))
    return EXIT_OK if not failed else EXIT_SOLVER


def cmd_measure(args) -> int:
    try:
        if args.process:
            try:
                doc = json.loads(Path(args.process).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError(f"cannot read {args.process}: {exc}") from exc
            chi = ingest_process(doc)
        else:
            chi = builtin_process(args.builtin)
        basis = parse_basis(json.loads(args.basis)) if args.basis else None
        kind = CapabilityKind.parse(args.kind, basis)
    except (InputError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        result = measure(MEASURE_NAMES[args.measure], chi, kind)
    except SolverError as exc:
        doc = {"kind": kind.name, "measure": MEASURE_NAMES[args.measure], "value": None,
               "status": exc.solution.status, "solver": exc.solution.report()}
        print(json.dumps(doc, indent=2))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(json.dumps(result.report(include_witness=args.witness), indent=2))
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import acceptance_rows, run_rows

    rows = acceptance_rows(samples=args.samples, jobs=args.jobs)
    if args.only:
        wanted = {c.upper() for c in args.only}
        rows = [r for r in rows if r.criterion in wanted]
        if not rows:
            print(f"error: no acceptance rows match {sorted(wanted)}", file=sys.stderr)
            return EXIT_INPUT
    results = run_rows(rows, tolerance=args.tolerance_override, stream=sys.stdout)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} rows passed")
    return EXIT_OK if not failed else EXIT_SOLVER


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpc", description="Quantum process capability measures.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="evaluate the Ising demonstration over a time grid")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", help="CSV output path (overrides output_path in the config)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent time points")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("measure", help="evaluate one measure on one process")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--process", help="process-matrix JSON file {dim, entries: [[re, im], ...]}")
    src.add_argument("--builtin", help="cz | identity | ising:t=<time>,gamma=<rate>[,qubit=<0|1>]")
    p.add_argument("--kind", required=True,
                   help="non-classical | entanglement-generation | coherence-creation | "
                        "coherence-preservation | superposition")
    p.add_argument("--measure", required=True, choices=sorted(MEASURE_NAMES))
    p.add_argument("--basis", help="JSON list of basis vectors (numbers or [re, im] pairs) for the capability")
    p.add_argument("--witness", action="store_true", help="include the optimal incapable process matrix")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("validate", help="run the acceptance table")
    p.add_argument("--only", action="append", metavar="AC-N", help="restrict to one criterion (repeatable)")
    p.add_argument("--samples", type=int, default=10,
                   help="random samples per capability for the property rows (two pairs each)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the property rows")
    p.add_argument("--tolerance-override", type=float, default=None,
                   help="replace every row tolerance (negative-control hook)")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
