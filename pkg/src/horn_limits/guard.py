"""Syntactic certification of Horn programs.

Two independent per-clause checks, both polynomial in program size:

* **term coverage**: every term occurring in a body atom also occurs in
  the clause head.  "Occurring" is read as *any subterm*; the coarser
  reading (top-level arguments only) is computed alongside for
  diagnostics, since the two disagree on clauses like
  ``p(f(X)) :- p(X).`` (subterm reading passes, argument reading fails).
  All downstream certification uses the subterm reading: it is the one
  that bounds every atom in a derivation by the level of the root, which
  the membership decider and the stability results rely on.
* **range restriction**: every head variable occurs in the body, and
  facts are ground.  This keeps forward chaining finitary: applying the
  consequence operator to a finite atom set yields a finite set.

Facts pass coverage vacuously.  Both checks are pure and per-clause.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .syntax import (
    HornClause,
    Program,
    Term,
    atom_variables,
    subterms,
    term_sort_key,
)


@dataclass(frozen=True)
class ClauseVerdict:
    clause: HornClause
    covered: bool
    coverage_offender: Term | None  # first body subterm missing from the head
    covered_args: bool  # coarser reading: body arguments among head arguments
    args_offender: Term | None
    range_restricted: bool
    unbound_variable: str | None  # head variable missing from the body


@dataclass(frozen=True)
class GuardReport:
    clauses: tuple[ClauseVerdict, ...]
    coverage_all: bool
    range_restricted_all: bool


def _check_clause(clause: HornClause) -> ClauseVerdict:
    head_pool = subterms(clause.head)
    missing: list[Term] = []
    for b in clause.body:
        missing.extend(t for t in subterms(b) if t not in head_pool)
    missing.sort(key=term_sort_key)
    covered = not missing

    head_args = set(clause.head.args)
    arg_missing: list[Term] = []
    for b in clause.body:
        arg_missing.extend(t for t in b.args if t not in head_args)
    arg_missing.sort(key=term_sort_key)

    if clause.is_fact:
        free = sorted(atom_variables(clause.head))
        return ClauseVerdict(
            clause=clause,
            covered=True,
            coverage_offender=None,
            covered_args=True,
            args_offender=None,
            range_restricted=not free,
            unbound_variable=free[0] if free else None,
        )

    body_vars: set[str] = set()
    for b in clause.body:
        body_vars |= atom_variables(b)
    unbound = sorted(atom_variables(clause.head) - body_vars)
    return ClauseVerdict(
        clause=clause,
        covered=covered,
        coverage_offender=missing[0] if missing else None,
        covered_args=not arg_missing,
        args_offender=arg_missing[0] if arg_missing else None,
        range_restricted=not unbound,
        unbound_variable=unbound[0] if unbound else None,
    )


@lru_cache(maxsize=256)  # pure; per-query callers re-inspect the same program
def inspect_program(program: Program) -> GuardReport:
    """Run both checks on every clause."""
    verdicts = tuple(_check_clause(c) for c in program.clauses)
    return GuardReport(
        clauses=verdicts,
        coverage_all=all(v.covered for v in verdicts),
        range_restricted_all=all(v.range_restricted for v in verdicts),
    )


def check_term_coverage(program: Program) -> GuardReport:
    """Per-clause term-coverage verdicts (full report; see module docstring)."""
    return inspect_program(program)


def check_range_restriction(program: Program) -> GuardReport:
    """Per-clause range-restriction verdicts (full report; see module docstring)."""
    return inspect_program(program)


def is_certified(program: Program) -> bool:
    """True when the program passes both checks."""
    report = inspect_program(program)
    return report.coverage_all and report.range_restricted_all
