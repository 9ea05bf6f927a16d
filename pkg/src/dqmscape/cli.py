"""Command-line interface.

Exit codes: 0 success, 1 usage or parse error, 2 enumeration cap exceeded,
3 search exhausted, 4 degenerate instance.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .encode import EncodingKind, QuboPair, as_bits, decode, encode, export_qubo, import_qubo
from .errors import DegenerateInstanceError, EnumerationLimitError, FormatError
from .landscape import DEFAULT_MAX_VARS
from .model import parse_dqm, serialize_dqm
from .report import FILTERS, analysis_report, sweep_csv
from .sample import AnnealSchedule, exhaustive_min, greedy_descent, simulated_annealing
from .thresholds import PREDICATES, search_counterexample, threshold_report

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SIZE = 2
EXIT_NOT_FOUND = 3
EXIT_DEGENERATE = 4

ENCODINGS = (EncodingKind.ONE_HOT.value, EncodingKind.DOMAIN_WALL.value)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _perms(args):
    if not getattr(args, "perms", None):
        return None
    try:
        perms = json.loads(args.perms)
    except json.JSONDecodeError as exc:
        raise UsageError(f"--perms is not valid JSON: {exc.msg}") from None
    if not isinstance(perms, list) or not all(isinstance(p, list) for p in perms):
        raise UsageError("--perms must be a JSON list of permutations")
    return perms


def _load_qubo(args) -> QuboPair:
    """Input is either a DQM JSON document (encoded on the fly) or QUBO text."""
    text = _read_text(args.input)
    if text.lstrip().startswith("{"):
        dqm = parse_dqm(text)
        try:
            return encode(dqm, args.encoding, _perms(args))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return import_qubo(text)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_encode(args) -> int:
    dqm = parse_dqm(_read_text(args.input))
    try:
        q = encode(dqm, args.encoding, _perms(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(export_qubo(q), args.output)
    return EXIT_OK


def cmd_decode(args) -> int:
    q = _load_qubo(args)
    if q.descriptor is None:
        raise UsageError("QUBO input carries no encoding descriptor; cannot decode")
    try:
        bits = as_bits(args.bits, q.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = decode(bits, q.descriptor)
    doc = {
        "bits": args.bits,
        "valid": result.valid,
        "assignment": None if result.assignment is None else list(result.assignment),
        "violations": [v.__dict__ for v in result.violations],
    }
    _emit(_dump(doc), args.output)
    return EXIT_OK


def cmd_analyze(args) -> int:
    q = _load_qubo(args)
    doc = analysis_report(
        q, args.gamma, solutions=args.solutions, include_thresholds=not args.no_thresholds, max_vars=args.max_vars
    )
    _emit(_dump(doc), args.output)
    return EXIT_OK


def cmd_thresholds(args) -> int:
    q = _load_qubo(args)
    _emit(_dump(threshold_report(q, args.max_vars).to_dict()), args.output)
    return EXIT_OK


def _gamma_grid(args) -> np.ndarray:
    if not args.gamma_min < args.gamma_max:
        raise UsageError("--gamma-min must be smaller than --gamma-max")
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    return np.linspace(args.gamma_min, args.gamma_max, args.steps)


def cmd_sweep(args) -> int:
    q = _load_qubo(args)
    gammas = _gamma_grid(args)
    _emit(sweep_csv(q, gammas, wide=args.wide, max_vars=args.max_vars), args.output)
    return EXIT_OK


def cmd_solve(args) -> int:
    q = _load_qubo(args)
    gamma = args.gamma
    if args.method == "exhaustive":
        res = exhaustive_min(q, gamma, args.max_vars)
        bits, f, steps = res.bits, res.f, 0
    elif args.method == "greedy":
        if args.start is not None:
            start = args.start
        else:
            start = np.random.default_rng(args.seed).integers(0, 2, size=q.n)
        try:
            trace = greedy_descent(q, gamma, start)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        bits, f, steps = trace.final, trace.final_f, trace.step_count
    else:
        try:
            schedule = AnnealSchedule(args.temperature, args.cooling, args.sweeps, args.restarts)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        res = simulated_annealing(q, gamma, schedule, args.seed)
        bits, f, steps = res.bits, res.f, res.sweeps
    valid = decode(bits, q.descriptor).valid if q.descriptor is not None else None
    doc = {
        "method": args.method,
        "gamma": gamma,
        "seed": args.seed,
        "bits": bits,
        "f": f,
        "valid": valid,
        "steps_or_sweeps": steps,
    }
    _emit(_dump(doc), args.output)
    return EXIT_OK


def cmd_search(args) -> int:
    result = search_counterexample(
        args.encoding, args.k, args.l, args.coeff_lo, args.coeff_hi,
        args.predicate, args.seed, args.budget, args.max_vars,
    )
    if result is None:
        print(f"no instance satisfying {args.predicate} within {args.budget} draws", file=sys.stderr)
        return EXIT_NOT_FOUND
    doc = result.report.to_dict()
    doc["draws"] = result.draws
    doc["seed"] = args.seed
    if args.output:
        Path(args.output).write_text(serialize_dqm(result.dqm), encoding="utf-8")
        doc["dqm_file"] = args.output
    else:
        doc["dqm"] = json.loads(serialize_dqm(result.dqm))
    report = _dump(doc)
    if args.report:
        Path(args.report).write_text(report, encoding="utf-8")
    else:
        sys.stdout.write(report)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dqmscape", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, needs_input=True, output_help="write to this file instead of stdout"):
        if needs_input:
            p.add_argument("--input", required=True, help="DQM JSON document or QUBO text file")
            p.add_argument("--encoding", choices=ENCODINGS, default="one-hot",
                           help="encoding applied to DQM input (default: one-hot)")
            p.add_argument("--perms", help="JSON list of per-register value permutations")
        p.add_argument("--max-vars", type=int, default=DEFAULT_MAX_VARS,
                       help=f"enumeration cap on binary variables (default: {DEFAULT_MAX_VARS})")
        p.add_argument("--output", help=output_help)

    p = sub.add_parser("encode", help="encode a DQM as a QUBO text file")
    common(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a bitstring back to a discrete assignment")
    common(p)
    p.add_argument("--bits", required=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("analyze", help="enumerate and characterize every solution")
    common(p)
    p.add_argument("--gamma", type=float, help="report local minima at this penalty weight")
    p.add_argument("--solutions", choices=FILTERS, default="all")
    p.add_argument("--no-thresholds", action="store_true", help="omit the threshold section")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("thresholds", help="compute penalty thresholds with witnesses")
    common(p)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("sweep", help="energies of every solution on a gamma grid (CSV)")
    common(p)
    p.add_argument("--gamma-min", type=float, required=True)
    p.add_argument("--gamma-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--wide", action="store_true", help="one column per bitstring")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("solve", help="minimize f at a fixed gamma")
    common(p)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--method", choices=("exhaustive", "greedy", "sa"), default="exhaustive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=0)
    p.add_argument("--sweeps", type=int, default=AnnealSchedule.sweeps)
    p.add_argument("--temperature", type=float, default=AnnealSchedule.initial_temperature)
    p.add_argument("--cooling", type=float, default=AnnealSchedule.cooling)
    p.add_argument("--start", help="greedy start bitstring (default: random from --seed)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("search", help="randomly search for threshold-separating instances")
    common(p, needs_input=False, output_help="write the found DQM here (default: embed in report)")
    p.add_argument("--encoding", choices=ENCODINGS, default="one-hot")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--coeff-lo", type=int, default=1)
    p.add_argument("--coeff-hi", type=int, default=10)
    p.add_argument("--predicate", choices=PREDICATES, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--report", help="write the threshold report here instead of stdout")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, FormatError) as exc:
        print(f"dqmscape: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EnumerationLimitError as exc:
        print(f"dqmscape: error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except DegenerateInstanceError as exc:
        print(f"dqmscape: degenerate instance: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ValueError as exc:
        print(f"dqmscape: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
