"""Program sequences, their set-theoretic limits, and model-limit comparison.

An infinite sequence of programs is described finitely by a schema with
four entry kinds:

* ``stable``   -- clause present in every program from some index on;
* ``sporadic`` -- clause present at an explicit finite index set;
* ``periodic`` -- clause present at one residue class modulo m >= 2;
* ``indexed``  -- clause template whose ground exponent positions may use
  the sequence index (``f^{n}(a)``, ``f^{n+c}(a)``), instantiated per n.

Clause-set limits follow the standard lim-inf / lim-sup construction on
sets: a clause is in the upper limit iff it occurs at infinitely many
indices and in the lower limit iff it occurs at all but finitely many.
Stable clauses and constant templates land in both; periodic clauses land
only in the upper limit (so their presence kills the limit); sporadic
clauses and properly index-dependent template instances land in neither.

Model limits are observed through a finite window: least models are
computed per index at a fixed depth bound and per-atom membership is read
off the tail of the window.  Finite sampling cannot prove a set limit, so
atoms whose tail membership still oscillates are reported *unsettled* and
make the comparison verdict Inconclusive rather than a guess.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path

from .engine import bounded_least_model
from .errors import LimitUndefinedError, NonFinitaryError, SchemaError
from .guard import inspect_program
from .parser import parse_clause
from .syntax import (
    Application,
    Atom,
    HornClause,
    Interpretation,
    MetaPower,
    Program,
    atom_sort_key,
    canonical_clause,
    level,
    subterms,
    term_is_ground,
)

# ---------------------------------------------------------------------------
# Schema model


@dataclass(frozen=True)
class StableEntry:
    clause: HornClause
    start: int = 1  # present in every program from this index on


@dataclass(frozen=True)
class SporadicEntry:
    clause: HornClause
    indices: frozenset[int]


@dataclass(frozen=True)
class PeriodicEntry:
    clause: HornClause
    modulus: int
    residue: int
    start: int = 1  # present iff n >= start and n % modulus == residue


@dataclass(frozen=True)
class IndexedEntry:
    template: HornClause  # may contain MetaPower nodes

    @property
    def is_constant(self) -> bool:
        return not _has_meta(self.template)


@dataclass(frozen=True)
class SequenceSchema:
    stable: tuple[StableEntry, ...] = ()
    sporadic: tuple[SporadicEntry, ...] = ()
    periodic: tuple[PeriodicEntry, ...] = ()
    indexed: tuple[IndexedEntry, ...] = ()


def _walk_terms(clause: HornClause):
    for atom in (clause.head, *clause.body):
        stack = list(atom.args)
        while stack:
            term = stack.pop()
            yield term
            if isinstance(term, Application):
                stack.extend(term.args)
            elif isinstance(term, MetaPower):
                stack.append(term.arg)


def _has_meta(clause: HornClause) -> bool:
    return any(isinstance(t, MetaPower) for t in _walk_terms(clause))


def _validate_template(clause: HornClause, source: str) -> None:
    for term in _walk_terms(clause):
        if isinstance(term, MetaPower):
            inner = _walk_terms(HornClause(Atom("q", (term.arg,))))
            if any(isinstance(t, MetaPower) for t in inner):
                raise SchemaError(f"{source}: nested meta exponents are not supported")
            if not term_is_ground(term.arg):
                raise SchemaError(
                    f"{source}: meta exponent applies to non-ground term {term.arg}"
                )
            if term.offset < 0:
                raise SchemaError(f"{source}: meta exponent offset must be non-negative")


def _instantiate_term(term, n: int):
    if isinstance(term, MetaPower):
        count = n + term.offset
        if count < 1:
            raise SchemaError(f"exponent {count} is not positive at index {n}")
        result = _instantiate_term(term.arg, n)
        for _ in range(count):
            result = Application(term.functor, (result,))
        return result
    if isinstance(term, Application):
        return Application(term.functor, tuple(_instantiate_term(a, n) for a in term.args))
    return term


def instantiate_template(template: HornClause, n: int) -> HornClause:
    """Replace meta exponents by ``n + offset`` and expand to plain terms."""

    def instantiate(atom: Atom) -> Atom:
        return Atom(atom.predicate, tuple(_instantiate_term(a, n) for a in atom.args))

    return HornClause(instantiate(template.head), tuple(instantiate(b) for b in template.body))


# ---------------------------------------------------------------------------
# Schema files (JSON)


def schema_from_dict(data: dict, source: str = "<schema>") -> SequenceSchema:
    if not isinstance(data, dict):
        raise SchemaError(f"{source}: schema must be a JSON object")
    known = {"stable", "sporadic", "periodic", "indexed"}
    unknown = set(data) - known
    if unknown:
        raise SchemaError(f"{source}: unknown schema keys {sorted(unknown)}")

    def clause_of(entry: dict, key: str = "clause", allow_meta: bool = False) -> HornClause:
        if key not in entry:
            raise SchemaError(f"{source}: entry is missing the {key!r} field: {entry}")
        return parse_clause(entry[key], source, allow_meta=allow_meta)

    stable = []
    for entry in data.get("stable", ()):
        start = int(entry.get("from", 1))
        if start < 1:
            raise SchemaError(f"{source}: 'from' must be >= 1")
        stable.append(StableEntry(clause_of(entry), start))

    sporadic = []
    for entry in data.get("sporadic", ()):
        indices = entry.get("indices", [])
        if not indices or any(int(i) < 1 for i in indices):
            raise SchemaError(f"{source}: sporadic indices must be a non-empty list of positive integers")
        sporadic.append(SporadicEntry(clause_of(entry), frozenset(int(i) for i in indices)))

    periodic = []
    for entry in data.get("periodic", ()):
        modulus = int(entry.get("modulus", 0))
        if modulus < 2:
            raise SchemaError(f"{source}: periodic modulus must be >= 2")
        residue = int(entry.get("residue", 0))
        if not 0 <= residue < modulus:
            raise SchemaError(f"{source}: residue must lie in [0, modulus)")
        start = int(entry.get("from", 1))
        if start < 1:
            raise SchemaError(f"{source}: 'from' must be >= 1")
        periodic.append(PeriodicEntry(clause_of(entry), modulus, residue, start))

    indexed = []
    for entry in data.get("indexed", ()):
        template = clause_of(entry, key="template", allow_meta=True)
        _validate_template(template, source)
        indexed.append(IndexedEntry(canonical_clause(template)))

    return SequenceSchema(tuple(stable), tuple(sporadic), tuple(periodic), tuple(indexed))


def load_schema(path: str | Path) -> SequenceSchema:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    return schema_from_dict(data, source=str(path))


# ---------------------------------------------------------------------------
# Expansion and clause limits


def expand_schema_at(schema: SequenceSchema, n: int) -> Program:
    """The program at index ``n``: all entries active at ``n``, deduplicated."""
    if n < 1:
        raise ValueError("sequence index must be >= 1")
    clauses: list[HornClause] = []
    clauses.extend(e.clause for e in schema.stable if n >= e.start)
    clauses.extend(e.clause for e in schema.sporadic if n in e.indices)
    clauses.extend(
        e.clause for e in schema.periodic if n >= e.start and n % e.modulus == e.residue
    )
    clauses.extend(instantiate_template(e.template, n) for e in schema.indexed)
    return Program.from_clauses(clauses)


@dataclass(frozen=True)
class LimitVerdict:
    limit_exists: bool
    limit_program: Program | None  # present iff the limit exists
    obstruction: HornClause | None  # a clause in the upper but not the lower limit


def clause_limits(schema: SequenceSchema) -> LimitVerdict:
    """Set-theoretic limit of the clause sequence described by the schema.

    The lower limit collects stable clauses and constant templates; the
    upper limit additionally collects periodic clauses.  The limit exists
    iff the two coincide, i.e. iff no periodic clause lies outside the
    lower limit.
    """
    liminf: list[HornClause] = []
    seen: set[HornClause] = set()
    for entry in schema.stable:
        clause = canonical_clause(entry.clause)
        if clause not in seen:
            seen.add(clause)
            liminf.append(clause)
    for entry in schema.indexed:
        if entry.is_constant:
            clause = canonical_clause(instantiate_template(entry.template, 1))
            if clause not in seen:
                seen.add(clause)
                liminf.append(clause)

    for entry in schema.periodic:
        clause = canonical_clause(entry.clause)
        if clause not in seen:
            return LimitVerdict(False, None, clause)

    return LimitVerdict(True, Program.from_clauses(liminf), None)


# ---------------------------------------------------------------------------
# Model-limit comparison


class ComparisonVerdict(enum.Enum):
    EQUAL = "Equal"
    NOT_EQUAL = "NotEqual"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class ModelLimitReport:
    """Window observation of least-model limits at a fixed depth.

    ``membership`` maps each atom (canonical order) to its presence per
    index 1..horizon.  ``liminf_models`` / ``limsup_models`` hold the
    atoms present in all / at least one sample of the tail window; atoms
    in the gap are ``unsettled``.  ``certainty`` is "theorem-backed" when
    the tail-window programs and the limit program are all certified for
    term coverage (the condition under which model limits provably
    commute with the program limit), else "heuristic".
    """

    depth: int
    horizon: int
    tail_window: int
    membership: tuple[tuple[Atom, tuple[bool, ...]], ...]
    liminf_models: Interpretation
    limsup_models: Interpretation
    model_of_limit: Interpretation
    unsettled: tuple[Atom, ...]
    verdict: ComparisonVerdict
    witness: Atom | None
    certainty: str


def _max_fact_level(program: Program) -> int:
    return max((level(c.head) for c in program.facts), default=0)


def _head_args_covered_by_body(program: Program) -> bool:
    """Every head argument of every rule occurs as a subterm of a body atom.

    Under this condition no derived atom outranks the deepest fact, so the
    full least model lives below the fact levels and can be computed
    exactly at a finite depth.
    """
    for clause in program.rules:
        body_pool = set()
        for b in clause.body:
            body_pool |= subterms(b)
        if any(arg not in body_pool for arg in clause.head.args):
            return False
    return True


def truncated_least_model(program: Program, depth: int) -> tuple[Interpretation, bool]:
    """The depth slice of the full least model, when attainable.

    Returns (model restricted to ``depth``, exact flag).  Certified
    programs are exact at any depth.  Programs whose rule heads are
    covered by their bodies are computed at the fact-level depth and
    sliced, which is also exact.  Anything else is computed at the deeper
    bound as a best effort and flagged inexact.
    """
    report = inspect_program(program)
    if report.coverage_all:
        return bounded_least_model(program, depth).model, True
    inner_depth = max(depth, _max_fact_level(program))
    model = bounded_least_model(program, inner_depth).model
    return model.restrict(depth), _head_args_covered_by_body(program)


def model_limit_comparison(schema: SequenceSchema, depth: int, horizon: int) -> ModelLimitReport:
    """Compare the model of the limit program with the limit of the models.

    Preconditions: the clause limit exists and every program in the
    window passes the range-restriction check.  The tail window spans the
    final ``max(5, horizon // 4)`` indices (the whole window for short
    horizons).
    """
    if depth < 1 or horizon < 1:
        raise ValueError("depth and horizon must be positive integers")
    verdict0 = clause_limits(schema)
    if not verdict0.limit_exists:
        raise LimitUndefinedError(verdict0.obstruction)
    limit_program = verdict0.limit_program
    assert limit_program is not None

    programs = [expand_schema_at(schema, n) for n in range(1, horizon + 1)]
    for program in programs:
        report = inspect_program(program)
        if not report.range_restricted_all:
            offender = next(v for v in report.clauses if not v.range_restricted)
            raise NonFinitaryError(offender.clause, offender.unbound_variable)

    models = [truncated_least_model(p, depth)[0] for p in programs]
    model_of_limit, _ = truncated_least_model(limit_program, depth)

    tail_window = min(horizon, max(5, horizon // 4))
    universe: set[Atom] = set(model_of_limit.atoms)
    for m in models:
        universe |= m.atoms
    ordered = sorted(universe, key=atom_sort_key)

    membership = tuple(
        (atom, tuple(atom in m.atoms for m in models)) for atom in ordered
    )
    liminf_atoms: set[Atom] = set()
    limsup_atoms: set[Atom] = set()
    for atom, presence in membership:
        tail = presence[-tail_window:]
        if all(tail):
            liminf_atoms.add(atom)
        if any(tail):
            limsup_atoms.add(atom)
    unsettled = tuple(sorted(limsup_atoms - liminf_atoms, key=atom_sort_key))

    tail_programs = programs[-tail_window:]
    theorem_backed = inspect_program(limit_program).coverage_all and all(
        inspect_program(p).coverage_all for p in tail_programs
    )
    certainty = "theorem-backed" if theorem_backed else "heuristic"

    if unsettled:
        verdict = ComparisonVerdict.INCONCLUSIVE
        witness = None
    elif liminf_atoms == model_of_limit.atoms:
        verdict = ComparisonVerdict.EQUAL
        witness = None
    else:
        verdict = ComparisonVerdict.NOT_EQUAL
        witness = min(liminf_atoms ^ model_of_limit.atoms, key=atom_sort_key)

    return ModelLimitReport(
        depth=depth,
        horizon=horizon,
        tail_window=tail_window,
        membership=membership,
        liminf_models=Interpretation(frozenset(liminf_atoms), depth_bound=depth),
        limsup_models=Interpretation(frozenset(limsup_atoms), depth_bound=depth),
        model_of_limit=model_of_limit,
        unsettled=unsettled,
        verdict=verdict,
        witness=witness,
        certainty=certainty,
    )
