"""Command-line front end.

One executable, subcommand style.  Text output is for humans (canonical
atom ordering everywhere); ``--json`` emits the stable machine contract
documented in the README.  Identical inputs (and seed) produce
byte-identical output.  Exit codes: 0 on success and positive verdicts,
1 for negative verdicts (``decide`` answering Out, ``check`` failing),
2 for parse/configuration errors.

Set ``HORN_LIMITS_COLOR=0`` to disable ANSI styling (styling is only used
on a terminal).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import IO

from .decider import Membership, ProofTree, decide_membership
from .engine import FixpointReport, bounded_least_model
from .errors import HornLimitsError
from .guard import GuardReport, inspect_program
from .limits import (
    ComparisonVerdict,
    ModelLimitReport,
    clause_limits,
    load_schema,
    model_limit_comparison,
)
from .metric import DyadicDistance, distance, perturbation_family, stability_probe
from .parser import parse_ground_atom, parse_interpretation, parse_program
from .syntax import Interpretation, Program, Signature

# ---------------------------------------------------------------------------
# Configuration


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation, fully determined (seed included) for reproducibility."""

    command: str
    paths: tuple[str, ...] = ()
    depth: int | None = None
    horizon: int | None = None
    epsilon: DyadicDistance | None = None
    steps: int | None = None
    levels: tuple[int, int] | None = None
    fixpoint: str | None = None
    query: str | None = None
    show_trace: bool = False
    show_proof: bool = False
    json_output: bool = False
    seed: int = 0


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _epsilon(text: str) -> DyadicDistance:
    match = re.fullmatch(r"2\^-(\d+)", text)
    if not match or int(match.group(1)) < 1:
        raise argparse.ArgumentTypeError("expected a dyadic tolerance like 2^-3")
    return DyadicDistance.exact(int(match.group(1)))


def _level_range(text: str) -> tuple[int, int]:
    match = re.fullmatch(r"(\d+)\.\.(\d+)", text)
    if not match:
        raise argparse.ArgumentTypeError("expected a level range like 3..8")
    lo, hi = int(match.group(1)), int(match.group(2))
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError("level range must satisfy 1 <= a <= b")
    return lo, hi


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="horn-limits",
        description="Fixpoint semantics, limits and stability analysis of Horn programs.",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed recorded in the run configuration")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="guard checks: term coverage and range restriction")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("model", help="depth-bounded least model")
    p.add_argument("file")
    p.add_argument("--depth", type=_positive, required=True)
    p.add_argument("--trace", action="store_true", help="also print per-stage deltas")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("decide", help="least-model membership for a certified program")
    p.add_argument("file")
    p.add_argument("--query", required=True, metavar="ATOM")
    p.add_argument("--proof", action="store_true", help="print the derivation tree")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("prooftree", help="minimal-height derivation of a query atom")
    p.add_argument("file")
    p.add_argument("--query", required=True, metavar="ATOM")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("limit", help="clause-set limit and model-limit comparison")
    p.add_argument("seqfile")
    p.add_argument("--depth", type=_positive, required=True)
    p.add_argument("--horizon", type=_positive, required=True)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("distance", help="dyadic level distance between two interpretations")
    p.add_argument("file_i")
    p.add_argument("file_j")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("stability", help="probe a fixed point with perturbations")
    p.add_argument("file")
    p.add_argument("--fixpoint", required=True, metavar="FILE|auto")
    p.add_argument("--eps", type=_epsilon, required=True, metavar="2^-K")
    p.add_argument("--levels", type=_level_range, required=True, metavar="A..B")
    p.add_argument("--steps", type=_positive, required=True)
    p.add_argument("--depth", type=_positive, required=True)
    p.add_argument("--json", action="store_true")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    paths: tuple[str, ...]
    if args.command == "distance":
        paths = (args.file_i, args.file_j)
    elif args.command == "limit":
        paths = (args.seqfile,)
    else:
        paths = (args.file,)
    return RunConfig(
        command=args.command,
        paths=paths,
        depth=getattr(args, "depth", None),
        horizon=getattr(args, "horizon", None),
        epsilon=getattr(args, "eps", None),
        steps=getattr(args, "steps", None),
        levels=getattr(args, "levels", None),
        fixpoint=getattr(args, "fixpoint", None),
        query=getattr(args, "query", None),
        show_trace=getattr(args, "trace", False),
        show_proof=getattr(args, "proof", False),
        json_output=getattr(args, "json", False),
        seed=args.seed,
    )


# ---------------------------------------------------------------------------
# Output helpers


class _Style:
    def __init__(self, stream: IO[str]) -> None:
        enabled = os.environ.get("HORN_LIMITS_COLOR", "1") != "0"
        self.on = enabled and hasattr(stream, "isatty") and stream.isatty()

    def good(self, text: str) -> str:
        return f"\x1b[32m{text}\x1b[0m" if self.on else text

    def bad(self, text: str) -> str:
        return f"\x1b[31m{text}\x1b[0m" if self.on else text


def _emit_json(payload: dict, out: IO[str]) -> None:
    print(json.dumps(payload, indent=2, sort_keys=False), file=out)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_program(path: str) -> Program:
    return parse_program(_read(path), source=path)


def _proof_payload(tree: ProofTree | None):
    if tree is None:
        return None
    return {
        "atom": str(tree.root),
        "clause": str(tree.clause),
        "substitution": {name: str(term) for name, term in tree.bindings},
        "children": [_proof_payload(c) for c in tree.children],
    }


# ---------------------------------------------------------------------------
# Subcommands


def _run_check(config: RunConfig, out: IO[str]) -> int:
    program = _load_program(config.paths[0])
    report = inspect_program(program)
    ok = report.coverage_all and report.range_restricted_all
    if config.json_output:
        _emit_json(_check_payload(report), out)
        return 0 if ok else 1
    style = _Style(out)
    rows = []
    for v in report.clauses:
        coverage = "pass" if v.covered else f"fail: {v.coverage_offender}"
        if v.covered != v.covered_args:
            arg_note = "pass" if v.covered_args else "fail"
            coverage += f" (argument reading: {arg_note})"
        restricted = "pass" if v.range_restricted else f"fail: {v.unbound_variable}"
        rows.append((str(v.clause), coverage, restricted))
    headers = ("clause", "term-coverage", "range-restricted")
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in rows)) if rows else len(headers[i])
        for i in range(3)
    ]
    print("  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)), file=out)
    for row in rows:
        print("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)), file=out)
    summary = (
        f"term-coverage={'pass' if report.coverage_all else 'fail'} "
        f"range-restricted={'pass' if report.range_restricted_all else 'fail'}"
    )
    print(f"program: {style.good(summary) if ok else style.bad(summary)}", file=out)
    return 0 if ok else 1


def _check_payload(report: GuardReport) -> dict:
    return {
        "clauses": [
            {
                "clause": str(v.clause),
                "term_coverage": "pass" if v.covered else "fail",
                "coverage_offender": str(v.coverage_offender) if v.coverage_offender else None,
                "argument_coverage": "pass" if v.covered_args else "fail",
                "range_restricted": "pass" if v.range_restricted else "fail",
                "unbound_variable": v.unbound_variable,
            }
            for v in report.clauses
        ],
        "term_coverage_all": report.coverage_all,
        "range_restricted_all": report.range_restricted_all,
    }


def _run_model(config: RunConfig, out: IO[str]) -> int:
    program = _load_program(config.paths[0])
    assert config.depth is not None
    report = bounded_least_model(program, config.depth)
    if config.json_output:
        _emit_json(_model_payload(report), out)
        return 0
    if config.show_trace:
        print(f"% depth {config.depth}, {report.iterations} iterations, "
              f"exact={'yes' if report.exact else 'no'}, "
              f"dropped_above_depth={report.dropped_above_depth}", file=out)
        for stage, size in enumerate(report.delta_sizes, start=1):
            print(f"% stage {stage}: +{size}", file=out)
    for atom in report.model.in_canonical_order():
        print(atom, file=out)
    return 0


def _model_payload(report: FixpointReport) -> dict:
    return {
        "model": [str(a) for a in report.model.in_canonical_order()],
        "iterations": report.iterations,
        "delta_sizes": list(report.delta_sizes),
        "exact": report.exact,
        "dropped_above_depth": report.dropped_above_depth,
    }


def _run_decide(config: RunConfig, out: IO[str], *, tree_only: bool = False) -> int:
    program = _load_program(config.paths[0])
    assert config.query is not None
    query = parse_ground_atom(config.query, source="<query>")
    verdict = decide_membership(program, query)
    if config.json_output:
        payload: dict = {"status": verdict.status.value}
        if not tree_only:
            payload["universe_size"] = verdict.universe_size
        payload["proof"] = _proof_payload(verdict.proof)
        _emit_json(payload, out)
        return 0 if verdict.is_member else 1
    if tree_only:
        if verdict.proof is None:
            print("no proof: atom is not in the least model", file=out)
            return 1
        print(verdict.proof.format(), file=out)
        return 0
    print(verdict.status.value, file=out)
    if config.show_proof and verdict.proof is not None:
        print(verdict.proof.format(), file=out)
    return 0 if verdict.is_member else 1


def _run_limit(config: RunConfig, out: IO[str]) -> int:
    schema = load_schema(config.paths[0])
    verdict = clause_limits(schema)
    assert config.depth is not None and config.horizon is not None
    report = None
    if verdict.limit_exists:
        report = model_limit_comparison(schema, config.depth, config.horizon)
    if config.json_output:
        payload = {
            "limit_exists": verdict.limit_exists,
            "limit_program": (
                [str(c) for c in verdict.limit_program.clauses]
                if verdict.limit_program is not None
                else None
            ),
            "obstruction": str(verdict.obstruction) if verdict.obstruction else None,
            "comparison": _comparison_payload(report) if report else None,
        }
        _emit_json(payload, out)
        return 0
    style = _Style(out)
    if not verdict.limit_exists:
        print("clause limit: does not exist", file=out)
        print(f"  oscillating clause: {verdict.obstruction}", file=out)
        return 0
    print("clause limit: exists", file=out)
    assert verdict.limit_program is not None
    if verdict.limit_program.clauses:
        for clause in verdict.limit_program.clauses:
            print(f"  {clause}", file=out)
    else:
        print("  (empty program)", file=out)
    assert report is not None
    print(
        f"models compared at depth {report.depth} over n = 1..{report.horizon} "
        f"(tail window {report.tail_window})",
        file=out,
    )
    print(f"  model of limit: {_atom_list(report.model_of_limit)}", file=out)
    print(f"  tail liminf:    {_atom_list(report.liminf_models)}", file=out)
    print(f"  tail limsup:    {_atom_list(report.limsup_models)}", file=out)
    if report.unsettled:
        print(f"  unsettled:      {', '.join(str(a) for a in report.unsettled)}", file=out)
    line = f"verdict: {report.verdict.value}"
    if report.witness is not None:
        line += f"  witness: {report.witness}"
    good = report.verdict is ComparisonVerdict.EQUAL
    print(f"  {style.good(line) if good else style.bad(line)}", file=out)
    print(f"  certainty: {report.certainty}", file=out)
    return 0


def _atom_list(interp: Interpretation) -> str:
    atoms = interp.in_canonical_order()
    if not atoms:
        return "(empty)"
    return ", ".join(str(a) for a in atoms)


def _comparison_payload(report: ModelLimitReport) -> dict:
    return {
        "depth": report.depth,
        "horizon": report.horizon,
        "tail_window": report.tail_window,
        "verdict": report.verdict.value,
        "witness": str(report.witness) if report.witness else None,
        "certainty": report.certainty,
        "model_of_limit": [str(a) for a in report.model_of_limit.in_canonical_order()],
        "liminf_models": [str(a) for a in report.liminf_models.in_canonical_order()],
        "limsup_models": [str(a) for a in report.limsup_models.in_canonical_order()],
        "unsettled": [str(a) for a in report.unsettled],
        "membership": [
            {"atom": str(atom), "present": list(presence)}
            for atom, presence in report.membership
        ],
    }


def _run_distance(config: RunConfig, out: IO[str]) -> int:
    left = parse_interpretation(_read(config.paths[0]), source=config.paths[0])
    right = parse_interpretation(_read(config.paths[1]), source=config.paths[1])
    result = distance(left, right)
    if config.json_output:
        _emit_json({"distance": str(result)}, out)
    else:
        print(result, file=out)
    return 0


def _run_stability(config: RunConfig, out: IO[str]) -> int:
    program = _load_program(config.paths[0])
    assert config.depth is not None and config.steps is not None
    assert config.epsilon is not None and config.levels is not None
    if config.fixpoint == "auto":
        fixpoint = bounded_least_model(program, config.depth).model
    else:
        assert config.fixpoint is not None
        fixpoint = parse_interpretation(_read(config.fixpoint), source=config.fixpoint)
    signature = program.signature.merge(Signature.of_atoms(fixpoint.atoms))
    lo, hi = config.levels
    perturbations = perturbation_family(fixpoint, signature, range(lo, hi + 1))
    report = stability_probe(
        program, fixpoint, perturbations, config.epsilon, config.steps, config.depth
    )
    if config.json_output:
        payload = {
            "fixpoint": [str(a) for a in report.fixpoint.in_canonical_order()],
            "epsilon": str(report.epsilon),
            "steps": report.steps,
            "depth": report.depth,
            "trials": [
                {
                    "perturbation": [str(a) for a in t.perturbation.in_canonical_order()],
                    "initial_distance": str(t.initial_distance),
                    "trajectory": [str(d) for d in t.trajectory],
                    "max_distance": str(t.max_distance),
                }
                for t in report.trials
            ],
            "classification": report.classification,
            "witness_trial": report.witness_trial,
        }
        _emit_json(payload, out)
        return 0
    style = _Style(out)
    print(
        f"fixpoint: {_atom_list(report.fixpoint)}  "
        f"(depth {report.depth}, eps {report.epsilon}, {report.steps} steps)",
        file=out,
    )
    for i, trial in enumerate(report.trials):
        escaped = any(d >= report.epsilon for d in trial.trajectory)
        note = "escape" if escaped else "ok"
        start = ", ".join(str(a) for a in trial.perturbation.in_canonical_order())
        print(
            f"trial {i + 1}: start {{{start}}} "
            f"d0={trial.initial_distance} max={trial.max_distance} -> {note}",
            file=out,
        )
    line = report.classification
    if report.witness_trial is not None:
        line += f" (trial {report.witness_trial + 1})"
        print(style.bad(f"classification: {line}"), file=out)
    else:
        print(style.good(f"classification: {line}"), file=out)
    return 0


# ---------------------------------------------------------------------------
# Entry points

_HANDLERS = {
    "check": _run_check,
    "model": _run_model,
    "decide": _run_decide,
    "limit": _run_limit,
    "distance": _run_distance,
    "stability": _run_stability,
}


def run(config: RunConfig, out: IO[str], err: IO[str]) -> int:
    """Dispatch a configuration to its command; returns the exit code."""
    try:
        if config.command == "prooftree":
            return _run_decide(config, out, tree_only=True)
        return _HANDLERS[config.command](config, out)
    except HornLimitsError as exc:
        print(f"error: {exc}", file=err)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc.filename}: file not found", file=err)
        return 2


def main(argv: list[str] | None = None, stdout: IO[str] | None = None, stderr: IO[str] | None = None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(_config_from_args(args), out, err)


def entry() -> None:
    sys.exit(main())
