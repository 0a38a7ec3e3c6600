"""Command-line front end.

Subcommands: ``eval`` (QuEST values and Jacobian), ``invert`` (population
eigenvalue recovery), ``simulate`` (Monte Carlo convergence sweeps),
``check-jacobian`` (analytic vs finite-difference comparison).

Exit codes are fixed for scripting: 0 success, 2 usage error, 3
numerical failure (the message names the pipeline stage), 4 check
failure.  Every command is a pure function of its arguments, input files
and seed; outputs are reproducible byte for byte except for the measured
``seconds`` column of simulation records.  All numbers serialized to CSV
use 17 significant digits so 64-bit floats round-trip exactly.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .errors import QuestError
from .invert import InvertOptions, invert
from .pipeline import quest, quest_fd_jacobian
from .shapes import SHAPE_KINDS, ShapeSpec
from .simulate import DISTRIBUTIONS, SimulationConfig, run_convergence
from .spectrum import PopulationSpectrum

SCHEMA_VERSION = 1

OUTPUT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "$id": "https://questeig.invalid/schema/output/v1",
    "title": "questeig CLI JSON output",
    "oneOf": [
        {"$ref": "#/definitions/eval_result"},
        {"$ref": "#/definitions/invert_result"},
    ],
    "definitions": {
        "eval_result": {
            "type": "object",
            "required": ["schema_version", "kind", "p", "n", "lambda", "zero_atom", "support"],
            "properties": {
                "schema_version": {"const": SCHEMA_VERSION},
                "kind": {"const": "eval_result"},
                "p": {"type": "integer", "minimum": 1},
                "n": {"type": "integer", "minimum": 1},
                "lambda": {"type": "array", "items": {"type": "number", "minimum": 0}},
                "zero_atom": {"type": "integer", "minimum": 0},
                "support": {
                    "type": "object",
                    "required": ["nu", "u_endpoints", "interval_counts", "x_intervals"],
                    "properties": {
                        "nu": {"type": "integer", "minimum": 1},
                        "u_endpoints": {"type": "array", "items": {"type": "number"}},
                        "interval_counts": {"type": "array", "items": {"type": "integer"}},
                        "x_intervals": {
                            "type": "array",
                            "items": {
                                "type": "array",
                                "items": {"type": "number"},
                                "minItems": 2,
                                "maxItems": 2,
                            },
                        },
                    },
                    "additionalProperties": False,
                },
            },
            "additionalProperties": False,
        },
        "invert_result": {
            "type": "object",
            "required": [
                "schema_version", "kind", "p", "n",
                "tau_hat", "objective", "iterations", "converged",
            ],
            "properties": {
                "schema_version": {"const": SCHEMA_VERSION},
                "kind": {"const": "invert_result"},
                "p": {"type": "integer", "minimum": 1},
                "n": {"type": "integer", "minimum": 1},
                "tau_hat": {"type": "array", "items": {"type": "number", "minimum": 0}},
                "objective": {"type": "number", "minimum": 0},
                "iterations": {"type": "integer", "minimum": 0},
                "converged": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
    },
}


class UsageError(Exception):
    """Bad arguments or malformed input files (exit code 2)."""


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _read_values(path: str, what: str, require_nonnegative: bool = True) -> np.ndarray:
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as err:
        raise UsageError(f"cannot read {what} file {path!r}: {err}") from err
    values = []
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            v = float(text)
        except ValueError as err:
            raise UsageError(f"{what} file {path}: bad number at line {lineno}") from err
        if require_nonnegative and v < 0:
            raise UsageError(f"{what} file {path}: negative eigenvalue at line {lineno}")
        values.append(v)
    if not values:
        raise UsageError(f"{what} file {path} is empty")
    return np.array(values)


def _write_text(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _eval_json(out, n: int) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "eval_result",
        "p": int(out.lam.size),
        "n": int(n),
        "lambda": [float(v) for v in out.lam],
        "zero_atom": int(out.zero_atom),
        "support": {
            "nu": int(out.support.nu),
            "u_endpoints": [float(v) for v in out.support.endpoints],
            "interval_counts": [int(v) for v in out.support.counts],
            "x_intervals": [[float(a), float(b)] for a, b in out.x_intervals],
        },
    }


def cmd_eval(args) -> int:
    tau = _read_values(args.tau, "tau")
    spec = PopulationSpectrum.from_values(tau, args.n)
    out = quest(spec, with_jacobian=args.jacobian is not None)
    if args.jacobian is not None:
        rows = "\n".join(",".join(_fmt(v) for v in row) for row in out.jacobian)
        _write_text(args.jacobian, rows + "\n")
    if args.format == "json":
        doc = _eval_json(out, args.n)
        _write_text(args.out, json.dumps(doc, indent=2) + "\n")
    else:
        lines = ["index,lambda"]
        lines += [f"{i + 1},{_fmt(v)}" for i, v in enumerate(out.lam)]
        _write_text(args.out, "\n".join(lines) + "\n")
        print(
            f"nu={out.support.nu} counts={out.support.counts.tolist()} "
            f"u_endpoints={[float(v) for v in out.support.endpoints]}",
            file=sys.stderr,
        )
    return 0


def cmd_invert(args) -> int:
    lam = np.sort(_read_values(args.lam, "lambda"))
    opts = InvertOptions(max_iter=args.max_iter, f_tol=args.tol)
    result = invert(lam, args.n, opts)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "invert_result",
        "p": int(lam.size),
        "n": int(args.n),
        "tau_hat": [float(v) for v in result.tau_hat],
        "objective": float(result.objective),
        "iterations": int(result.iterations),
        "converged": bool(result.converged),
    }
    _write_text(args.out, json.dumps(doc, indent=2) + "\n")
    return 0


def _simulate_csv(records, summary) -> str:
    lines = ["shape,dist,p,n,rep,seed,nmse,seconds"]
    for r in records:
        lines.append(
            f"{r.shape},{r.distribution},{r.p},{r.n},{r.rep},{r.seed},"
            f"{_fmt(r.nmse)},{_fmt(r.seconds)}"
        )
    for p, mean, used in zip(summary.dims, summary.mean_nmse, summary.reps_used):
        lines.append(f"# summary p={p} mean_nmse={_fmt(mean)} reps_used={used}")
    lines.append(f"# slope {_fmt(summary.slope)}")
    return "\n".join(lines) + "\n"


def _render_plot(path: str, summary):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(summary.dims, summary.mean_nmse, "o-")
    ax.set_xlabel("matrix dimension p")
    ax.set_ylabel("mean NMSE")
    ax.set_title(f"convergence (log-log slope {summary.slope:.2f})")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def cmd_simulate(args) -> int:
    try:
        dims = tuple(int(d) for d in args.dims.split(",") if d)
    except ValueError as err:
        raise UsageError(f"bad --dims value {args.dims!r}") from err
    if not dims or any(d < 1 for d in dims):
        raise UsageError(f"bad --dims value {args.dims!r}")
    if args.conc <= 0:
        raise UsageError("--conc must be positive")
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    threads = args.threads if args.threads is not None else (os.cpu_count() or 1)
    config = SimulationConfig(
        shape=ShapeSpec(kind=args.shape, condition_number=args.kappa),
        distribution=args.dist,
        dims=dims,
        reps=args.reps,
        concentration=args.conc,
        seed=args.seed,
        threads=max(1, threads),
    )
    records, summary = run_convergence(config)
    _write_text(args.out, _simulate_csv(records, summary))
    if args.plot is not None:
        _render_plot(args.plot, summary)
    if args.out is not None:
        for p, mean, used in zip(summary.dims, summary.mean_nmse, summary.reps_used):
            print(f"p={p}: mean NMSE {mean:.6g} over {used} reps")
        print(f"log-log slope: {summary.slope:.4f}")
    return 0


def cmd_check_jacobian(args) -> int:
    tau = _read_values(args.tau, "tau")
    spec = PopulationSpectrum.from_values(tau, args.n)
    analytic = quest(spec).jacobian
    fd = quest_fd_jacobian(spec, args.h, relative=True)
    diff = np.abs(analytic - fd.jacobian)
    col_max = diff.max(axis=0)
    for k in range(spec.p):
        tag = " [flagged: support change]" if fd.flagged[k] else ""
        print(f"column {k + 1}: max|analytic - fd| = {col_max[k]:.3e}{tag}")
    unflagged = ~fd.flagged
    worst = float(col_max[unflagged].max()) if unflagged.any() else 0.0
    print(f"max discrepancy on unflagged columns: {worst:.3e}")
    if fd.flagged.any():
        flagged_cols = (np.flatnonzero(fd.flagged) + 1).tolist()
        print(f"flagged columns (excluded): {flagged_cols}", file=sys.stderr)
    return 0 if worst <= 1e-4 else 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="questeig",
        description="QuEST function evaluation, inversion, and Monte Carlo sweeps",
    )
    parser.add_argument(
        "--print-schema",
        action="store_true",
        help="print the versioned JSON schema for command outputs and exit",
    )
    sub = parser.add_subparsers(dest="command")

    p_eval = sub.add_parser("eval", help="map population eigenvalues to sample eigenvalues")
    p_eval.add_argument("--tau", required=True, help="file with one eigenvalue per line")
    p_eval.add_argument("--n", required=True, type=int, help="sample size")
    p_eval.add_argument("--jacobian", help="write the dense Jacobian as CSV to this file")
    p_eval.add_argument("--out", help="output file (default: stdout)")
    p_eval.add_argument("--format", choices=("json", "csv"), default="json")

    p_inv = sub.add_parser("invert", help="estimate population eigenvalues from sample ones")
    p_inv.add_argument("--lambda", dest="lam", required=True, help="file with sample eigenvalues")
    p_inv.add_argument("--n", required=True, type=int, help="sample size")
    p_inv.add_argument("--max-iter", type=int, default=300)
    p_inv.add_argument("--tol", type=float, default=1e-12, help="objective tolerance")
    p_inv.add_argument("--out", help="output file (default: stdout)")

    p_sim = sub.add_parser("simulate", help="Monte Carlo convergence sweep")
    p_sim.add_argument("--shape", required=True, choices=SHAPE_KINDS)
    p_sim.add_argument("--kappa", required=True, type=float, help="condition number")
    p_sim.add_argument("--conc", required=True, type=float, help="concentration ratio p/n")
    p_sim.add_argument("--dims", required=True, help="comma-separated dimensions")
    p_sim.add_argument("--reps", required=True, type=int)
    p_sim.add_argument("--dist", required=True, choices=DISTRIBUTIONS)
    p_sim.add_argument("--seed", required=True, type=int)
    p_sim.add_argument("--out", help="CSV output file (default: stdout)")
    p_sim.add_argument(
        "--threads", type=int, default=None,
        help="worker threads (default: available parallelism)",
    )
    p_sim.add_argument("--plot", help="also render the convergence figure to this file")

    p_chk = sub.add_parser("check-jacobian", help="compare analytic and FD Jacobians")
    p_chk.add_argument("--tau", required=True)
    p_chk.add_argument("--n", required=True, type=int)
    p_chk.add_argument("--h", type=float, default=1e-6, help="relative FD step (h * tau_k)")

    return parser


_COMMANDS = {
    "eval": cmd_eval,
    "invert": cmd_invert,
    "simulate": cmd_simulate,
    "check-jacobian": cmd_check_jacobian,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.print_schema:
        print(json.dumps(OUTPUT_SCHEMA, indent=2))
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except QuestError as err:
        stage = err.stage or "pipeline"
        print(f"numerical failure in {stage}: {err}", file=sys.stderr)
        return 3


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
