"""Forward chaining over a depth-bounded Herbrand base.

The immediate consequence operator maps an interpretation I to the set of
clause-head instances whose body atoms all hold in I.  Matching is
one-way: clause atoms are patterns, interpretation atoms are ground and
never instantiated.  Atoms derived above the depth bound are counted and
dropped, not an error; under term coverage (see :mod:`horn_limits.guard`)
a derivation of a shallow atom never passes through a deeper one, so the
truncation is lossless for certified programs.  For uncertified programs
the bounded fixpoint is an explicit under-approximation and the report
says so via its ``exact`` flag.

The least fixpoint is computed by stage iteration from the empty set.
The default strategy uses delta joins (only substitutions touching at
least one newly derived atom are re-enumerated); a naive full
re-evaluation is kept for cross-checking, and both produce identical
models, iteration counts and per-stage delta sizes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import NonFinitaryError
from .guard import inspect_program
from .syntax import (
    Application,
    Atom,
    Constant,
    HornClause,
    Interpretation,
    Program,
    Signature,
    Term,
    Variable,
    atom_is_ground,
    atom_sort_key,
    atom_variables,
    count_bounded_base,
    ground_terms,
    level,
    replace_variables,
)

#: Variable name -> ground term.  Applying a substitution replaces all
#: occurrences simultaneously; substitutions are treated as values and
#: never mutated once returned.
Substitution = Mapping[str, Term]


# ---------------------------------------------------------------------------
# Matching


def substitute_atom(atom: Atom, bindings: Substitution) -> Atom:
    return Atom(atom.predicate, tuple(replace_variables(a, bindings) for a in atom.args))


def _match_term(pattern: Term, target: Term, bindings: dict) -> bool:
    """Extend ``bindings`` in place so that pattern instantiates to target."""
    if isinstance(pattern, Variable):
        bound = bindings.get(pattern.name)
        if bound is None:
            bindings[pattern.name] = target
            return True
        return bound == target
    if isinstance(pattern, Constant):
        return pattern == target
    if isinstance(pattern, Application):
        if (
            not isinstance(target, Application)
            or pattern.functor != target.functor
            or len(pattern.args) != len(target.args)
        ):
            return False
        return all(_match_term(p, t, bindings) for p, t in zip(pattern.args, target.args))
    raise TypeError(f"not a matchable term: {pattern!r}")


def match_atom(pattern: Atom, target: Atom, seed: Substitution | None = None) -> dict | None:
    """The unique extension of ``seed`` under which ``pattern`` becomes ``target``.

    Returns None when no such extension exists.  One-way: only pattern
    variables bind; ``target`` must be ground.
    """
    if pattern.predicate != target.predicate or len(pattern.args) != len(target.args):
        return None
    bindings = dict(seed) if seed else {}
    for p, t in zip(pattern.args, target.args):
        if not _match_term(p, t, bindings):
            return None
    return bindings


# ---------------------------------------------------------------------------
# Consequence enumeration

_AtomIndex = Mapping[str, Sequence[Atom]]


def _index_atoms(atoms: Iterable[Atom]) -> dict[str, list[Atom]]:
    """Group by predicate, canonically ordered for deterministic enumeration."""
    index: dict[str, list[Atom]] = {}
    for a in sorted(atoms, key=atom_sort_key):
        index.setdefault(a.predicate, []).append(a)
    return index


def _match_body(
    body: Sequence[Atom],
    sources: Sequence[_AtomIndex],
    bindings: dict,
) -> Iterator[dict]:
    """All extensions of ``bindings`` matching body atoms left to right.

    ``sources[i]`` supplies the ground candidates for body position i.
    """
    if not body:
        yield bindings
        return
    first = body[0]
    for target in sources[0].get(first.predicate, ()):
        extended = match_atom(first, target, bindings)
        if extended is not None:
            yield from _match_body(body[1:], sources[1:], extended)


def _ground_head(clause: HornClause, bindings: dict) -> Atom:
    head = substitute_atom(clause.head, bindings)
    if not atom_is_ground(head):
        free = sorted(atom_variables(head))
        raise NonFinitaryError(clause, free[0])
    return head


def _consequences(program: Program, atoms: Iterable[Atom], depth: int) -> tuple[set[Atom], set[Atom]]:
    """One full application of the consequence operator.

    Returns (heads of level <= depth, heads above depth).
    """
    index = _index_atoms(atoms)
    within: set[Atom] = set()
    dropped: set[Atom] = set()
    for clause in program.clauses:
        sources = [index] * len(clause.body)
        for bindings in _match_body(clause.body, sources, {}):
            head = _ground_head(clause, bindings)
            (within if level(head) <= depth else dropped).add(head)
    return within, dropped


def tp_step(program: Program, interp: Interpretation, depth: int) -> Interpretation:
    """The immediate consequence operator, truncated at ``depth``.

    Ground facts contribute unconditionally; rule heads are produced for
    every substitution under which the whole body lies in ``interp``.
    Atoms of the input do not carry over unless re-derived.
    """
    if depth < 1:
        raise ValueError("depth must be a positive integer")
    for a in interp.atoms:
        if level(a) > depth:
            raise ValueError(f"interpretation atom {a} exceeds depth {depth}")
    within, _ = _consequences(program, interp.atoms, depth)
    return Interpretation(frozenset(within), depth_bound=depth)


# ---------------------------------------------------------------------------
# Bounded least fixpoint


@dataclass(frozen=True)
class FixpointReport:
    """Result of the bounded least-model computation.

    ``iterations`` counts operator applications including the final one
    that adds nothing; ``delta_sizes`` holds the per-stage counts of newly
    derived atoms (their sum is the model size).  ``exact`` is set when
    the guard certifies term coverage, which makes the truncation equal to
    the depth slice of the full least model; ``dropped_above_depth``
    counts distinct derived atoms discarded for exceeding the bound.
    """

    model: Interpretation
    iterations: int
    delta_sizes: tuple[int, ...]
    exact: bool
    dropped_above_depth: int


def _delta_consequences(
    program: Program,
    older: _AtomIndex,
    delta: _AtomIndex,
    full: _AtomIndex,
    depth: int,
) -> tuple[set[Atom], set[Atom]]:
    """Heads of matches that touch at least one delta atom.

    For body position i taken from the delta, positions before i range
    over the pre-delta set and positions after i over the full set, so
    each new match is enumerated exactly once.
    """
    within: set[Atom] = set()
    dropped: set[Atom] = set()
    for clause in program.clauses:
        arity = len(clause.body)
        if arity == 0:
            continue  # facts fire at stage one only
        for i in range(arity):
            sources = [older] * i + [delta] + [full] * (arity - 1 - i)
            for bindings in _match_body(clause.body, sources, {}):
                head = _ground_head(clause, bindings)
                (within if level(head) <= depth else dropped).add(head)
    return within, dropped


def bounded_least_model(program: Program, depth: int, *, naive: bool = False) -> FixpointReport:
    """Least fixpoint of the consequence operator within level <= ``depth``.

    Terminates unconditionally: the depth-bounded base is finite and the
    stage sequence is increasing.  Raises :class:`NonFinitaryError` for
    programs failing the range-restriction check.
    """
    if depth < 1:
        raise ValueError("depth must be a positive integer")
    report = inspect_program(program)
    if not report.range_restricted_all:
        offender = next(v for v in report.clauses if not v.range_restricted)
        raise NonFinitaryError(offender.clause, offender.unbound_variable)

    cap = count_bounded_base(program.signature, depth) + 1
    full: set[Atom] = set()
    older: set[Atom] = set()
    delta: set[Atom] = set()
    dropped: set[Atom] = set()
    delta_sizes: list[int] = []
    iterations = 0
    while True:
        iterations += 1
        assert iterations <= cap, "fixpoint failed to close over the finite base"
        if naive:
            new, drop = _consequences(program, full, depth)
        elif iterations == 1:
            new, drop = _consequences(program, (), depth)
        else:
            new, drop = _delta_consequences(
                program,
                _index_atoms(older),
                _index_atoms(delta),
                _index_atoms(full),
                depth,
            )
        new -= full
        dropped |= drop
        delta_sizes.append(len(new))
        if not new:
            break
        older = set(full)
        full |= new
        delta = new

    return FixpointReport(
        model=Interpretation(frozenset(full), depth_bound=depth),
        iterations=iterations,
        delta_sizes=tuple(delta_sizes),
        exact=report.coverage_all,
        dropped_above_depth=len(dropped),
    )


# ---------------------------------------------------------------------------
# Bounded model checking


@dataclass(frozen=True)
class ModelCheck:
    """Outcome of bounded model checking; falsy when a violation was found.

    Satisfaction is relative to the level-bounded instance space: only
    ground instances whose head and body atoms all have level <= depth
    are examined.
    """

    holds: bool
    violation: HornClause | None

    def __bool__(self) -> bool:
        return self.holds


def is_bounded_model(program: Program, interp: Interpretation, depth: int) -> ModelCheck:
    """Check every level-bounded ground instance of every clause against ``interp``.

    The instance space ranges over the merged signature of the program and
    the interpretation, so extra constants in ``interp`` participate.
    Cost grows with (number of ground terms) ** (variables per clause);
    intended for the small depths used in tests and reports.
    """
    if depth < 1:
        raise ValueError("depth must be a positive integer")
    for a in interp.atoms:
        if level(a) > depth:
            raise ValueError(f"interpretation atom {a} exceeds depth {depth}")
    signature = program.signature.merge(Signature.of_atoms(interp.atoms))
    terms = ground_terms(signature, depth - 1)
    for clause in program.clauses:
        variables = _clause_variables_in_order(clause)
        for combo in _assignments(terms, len(variables)):
            bindings = dict(zip(variables, combo))
            head = substitute_atom(clause.head, bindings)
            if not atom_is_ground(head) or level(head) > depth:
                continue
            body = tuple(substitute_atom(b, bindings) for b in clause.body)
            if any(not atom_is_ground(b) or level(b) > depth for b in body):
                continue
            if all(b in interp.atoms for b in body) and head not in interp.atoms:
                return ModelCheck(False, HornClause(head, body))
    return ModelCheck(True, None)


def _clause_variables_in_order(clause: HornClause) -> list[str]:
    seen: list[str] = []
    for atom in (clause.head, *clause.body):
        for name in sorted(atom_variables(atom)):
            if name not in seen:
                seen.append(name)
    return seen


def _assignments(terms: Sequence[Term], count: int) -> Iterator[tuple[Term, ...]]:
    if count == 0:
        yield ()
        return
    yield from itertools.product(terms, repeat=count)
