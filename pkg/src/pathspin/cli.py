"""Command-line front end.

Every subcommand prints one document (JSON by default)::

    {"schema_version": "pathspin/1", "command": ..., "inputs": {...}, "results": {...}}

Complex numbers appear as ``[re, im]``. Exit codes: 0 success, 1 contract
violation (e.g. the no-go scan finds an orthogonal triple, or sampling is
asked of an invalid POVM), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import discrimination as disc
from . import nogo, protocol
from .hilbert import complex_pair

SCHEMA_VERSION = "pathspin/1"

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

SWEEP_COLUMNS = (
    "alpha",
    "alpha_squared",
    "valid",
    "min_eigenvalue",
    "success_probability_computed",
    "paper_formula_value",
    "idp_optimum",
    "linearly_independent",
    "gram_determinant",
)


def to_jsonable(obj):
    """Plain JSON types; complex -> [re, im], numpy scalars/arrays unwrapped."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_pair(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def document(command: str, inputs: dict, results: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": to_jsonable(inputs),
        "results": to_jsonable(results),
    }


def dumps(doc: dict) -> str:
    # repr-based floats are the shortest strings that round-trip exactly
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}{k}.")
    elif isinstance(obj, list) and not _is_leaf_list(obj):
        for k, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}{k}.")
    else:
        yield prefix[:-1], obj


def _is_leaf_list(obj) -> bool:
    # a complex pair stays one cell
    return len(obj) == 2 and all(isinstance(x, float) for x in obj)


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(doc)
    rows = doc["results"].get("rows") if doc["command"] == "sweep" else None
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if rows is not None:
            writer.writerow(SWEEP_COLUMNS)
            for row in rows:
                writer.writerow([_cell(row[c]) for c in SWEEP_COLUMNS])
        else:
            writer.writerow(("key", "value"))
            for key, value in _flatten(doc["results"]):
                writer.writerow((key, _cell(value)))
        return buf.getvalue()
    lines = [f"{doc['command']} ({doc['schema_version']})"]
    lines += [f"  {k} = {v}" for k, v in _flatten(doc["results"])]
    return "\n".join(lines) + "\n"


def _cell(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return value


# subcommands


def cmd_transmit(bits: str, shots: int, seed: int, workers: int = 1) -> tuple[dict, int]:
    msg = protocol.Message.parse(bits)
    enc = protocol.encode(msg)
    dist = protocol.detection_distribution(protocol.evolve(enc))
    record = protocol.sample_shots(enc, shots, seed, workers=workers)
    fired = max(protocol.CHANNELS, key=lambda c: (record.counts[c.name], -protocol.CHANNELS.index(c)))
    decoded = protocol.decode(fired)
    results = {
        "settings": {"name": enc.name, "delta": enc.delta, "phi": enc.phi},
        "distribution": dist.to_dict(),
        "certain_channel": dist.argmax().name,
        "counts": record.counts,
        "decoded": str(decoded),
        "round_trip": decoded == msg,
    }
    inputs = {"bits": bits, "shots": shots, "seed": seed}
    return document("transmit", inputs, results), EXIT_OK


def cmd_channel() -> tuple[dict, int]:
    w = protocol.channel_matrix()
    prior = np.full(4, 0.25)
    is_perm = bool(
        np.all((np.abs(w) <= 1e-12) | (np.abs(w - 1) <= 1e-12))
        and np.allclose(w.sum(axis=0), 1, atol=1e-12, rtol=0)
        and np.allclose(w.sum(axis=1), 1, atol=1e-12, rtol=0)
    )
    results = {
        "messages": [str(m) for m in protocol.MESSAGES],
        "channels": [c.name for c in protocol.CHANNELS],
        "matrix": w,
        "is_permutation": is_perm,
        "prior": prior,
        "mutual_information_bits": protocol.mutual_information(w, prior),
    }
    return document("channel", {}, results), EXIT_OK


def _orth_report(r: nogo.OrthogonalityReport | None):
    if r is None:
        return None
    q = r.quadruple
    return {
        "quadruple": {"eta1": q.eta1, "eta2": q.eta2, "phi1": q.phi1, "phi2": q.phi2},
        "subset_size": r.max_subset_size,
        "witness": list(r.witness),
    }


def cmd_nogo(grid_steps: int, tol: float, workers: int = 1, timing: bool = False) -> tuple[dict, int]:
    t0 = time.perf_counter()
    rep = nogo.scan(grid_steps, tol, workers=workers)
    results = {
        "max_subset_size": rep.max_subset_size,
        "distinguishable_outcomes": rep.distinguishable_outcomes,
        "evaluated_quadruples": rep.evaluated,
        "size_histogram": rep.size_histogram,
        "size2_count": rep.size2_count,
        "witnesses": [_orth_report(w) for w in rep.witnesses],
        "phase_difference_pi_witness": _orth_report(rep.phase_pi_witness),
        "constrained_points": rep.constrained_points,
        "constrained_min_overlap": rep.constrained_min_overlap,
        "passed": rep.passed,
    }
    if timing:
        results["runtime_seconds"] = time.perf_counter() - t0
    inputs = {"grid_steps": grid_steps, "tol": tol}
    return document("nogo", inputs, results), EXIT_OK if rep.passed else EXIT_VIOLATION


def povm_summary(alpha: float, delta: float = 0.0) -> dict:
    prep = disc.SpinPreparation(alpha, delta=delta)
    povm = disc.paper_povm(prep)
    report = disc.povm_validate(povm)
    received = prep.spin_state()
    formal = disc.effect_expectations(povm, received)
    li = disc.linear_independence(prep.phi1, prep.phi2)
    probabilities = None
    if report.overall_valid:
        probabilities = disc.discrimination_probs(povm, received).probabilities
    return {
        "alpha": alpha,
        "beta": prep.beta,
        "alpha_squared": alpha * alpha,
        "effects": {lab: e.matrix for lab, e in zip(povm.labels, povm.effects)},
        "eigenvalues": {lab: list(ev) for lab, ev in zip(povm.labels, report.eigenvalues)},
        "is_positive": dict(zip(povm.labels, report.is_positive)),
        "completeness_residual": report.completeness_residual,
        "min_eigenvalue": report.min_eigenvalue,
        "valid": report.overall_valid,
        "probabilities": probabilities,
        "formal_expectations": formal,
        "success_probability_computed": 1.0 - formal["S3"],
        "paper_formula_value": disc.paper_formula_value(prep),
        "idp_optimum": disc.idp_optimum(prep),
        "linearly_independent": li.independent,
        "gram_determinant": li.gram_determinant,
    }


def cmd_povm(alpha: float, delta: float = 0.0) -> tuple[dict, int]:
    return document("povm", {"alpha": alpha, "delta": delta}, povm_summary(alpha, delta)), EXIT_OK


def cmd_sweep(param: str, start: float, stop: float, steps: int) -> tuple[dict, int]:
    if param != "alpha":
        raise ValueError(f"unknown sweep parameter {param!r}; supported: alpha")
    rows = []
    for a in np.linspace(start, stop, steps):
        full = povm_summary(float(a))
        rows.append({c: full[c] for c in SWEEP_COLUMNS})
    inputs = {"param": param, "from": start, "to": stop, "steps": steps}
    return document("sweep", inputs, {"columns": list(SWEEP_COLUMNS), "rows": rows}), EXIT_OK


def cmd_discriminate(alpha: float, bits: str, shots: int, seed: int, workers: int = 1) -> tuple[dict, int]:
    msg = protocol.Message.parse(bits)
    prep = disc.SpinPreparation(alpha)
    povm = disc.paper_povm(prep)
    inputs = {"alpha": alpha, "bits": bits, "shots": shots, "seed": seed}
    try:
        record = disc.sample_discrimination(povm, prep, msg, shots, seed, workers=workers)
    except disc.InvalidPovmError as err:
        rep = err.report
        results = {
            "error": "invalid_povm",
            "message": str(err),
            "eigenvalues": {lab: list(ev) for lab, ev in zip(povm.labels, rep.eigenvalues)},
            "min_eigenvalue": rep.min_eigenvalue,
            "completeness_residual": rep.completeness_residual,
        }
        return document("discriminate", inputs, results), EXIT_VIOLATION
    results = {
        "counts": record.counts,
        "round_trip_rate": disc.round_trip_rate(record, msg),
        "inconclusive_rate": sum(n for k, n in record.counts.items() if k.endswith("S3")) / shots,
    }
    return document("discriminate", inputs, results), EXIT_OK


# argument parsing


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _grid_steps(text: str) -> int:
    value = int(text)
    if value < 8:
        raise argparse.ArgumentTypeError("grid steps must be at least 8")
    return value


def _bits(text: str) -> str:
    try:
        protocol.Message.parse(text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from None
    return text


def _unit_interval(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("alpha must lie in [0, 1]")
    return value


def _finite(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError("must be finite")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--output", help="write the document to this path instead of stdout")

    parser = argparse.ArgumentParser(
        prog="pathspin", description="Path-spin dense coding simulator and diagnostics."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transmit", parents=[common], help="send two bits through the interferometer")
    p.add_argument("--bits", type=_bits, required=True)
    p.add_argument("--shots", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive_int, default=1)

    sub.add_parser("channel", parents=[common], help="channel matrix and mutual information")

    p = sub.add_parser("nogo", parents=[common], help="orthogonality scan with a third beam splitter")
    p.add_argument("--grid-steps", type=_grid_steps, default=nogo.DEFAULT_GRID_STEPS)
    p.add_argument("--tol", type=_finite, default=nogo.SCAN_TOL)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--timing", action="store_true", help="include wall-clock runtime")

    p = sub.add_parser("povm", parents=[common], help="diagnose the three-outcome spin measurement")
    p.add_argument("--alpha", type=_unit_interval, required=True)
    p.add_argument("--delta", type=_finite, default=0.0)

    p = sub.add_parser("sweep", parents=[common], help="tabulate povm diagnostics over alpha")
    p.add_argument("--param", default="alpha")
    p.add_argument("--from", dest="start", type=_unit_interval, default=0.5)
    p.add_argument("--to", dest="stop", type=_unit_interval, default=1.0)
    p.add_argument("--steps", type=int, default=6)

    p = sub.add_parser("discriminate", parents=[common], help="sample the probabilistic scheme")
    p.add_argument("--alpha", type=_unit_interval, required=True)
    p.add_argument("--bits", type=_bits, required=True)
    p.add_argument("--shots", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive_int, default=1)
    return parser


def run(args: argparse.Namespace) -> tuple[dict, int]:
    if args.command == "transmit":
        return cmd_transmit(args.bits, args.shots, args.seed, args.workers)
    if args.command == "channel":
        return cmd_channel()
    if args.command == "nogo":
        return cmd_nogo(args.grid_steps, args.tol, args.workers, args.timing)
    if args.command == "povm":
        return cmd_povm(args.alpha, args.delta)
    if args.command == "sweep":
        return cmd_sweep(args.param, args.start, args.stop, args.steps)
    return cmd_discriminate(args.alpha, args.bits, args.shots, args.seed, args.workers)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep":
        if args.param != "alpha":
            parser.error(f"unknown sweep parameter {args.param!r}; supported: alpha")
        if args.steps < 2 or not args.start < args.stop:
            parser.error("sweep needs --steps >= 2 and --from < --to")
    doc, code = run(args)
    text = render(doc, args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
