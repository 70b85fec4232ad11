"""Syntax of Horn programs: terms, atoms, clauses, programs, interpretations.

Ground atoms are ranked by the height of their expression tree (their
*level*): a constant has height 1, an application adds one to the tallest
argument, and the atom node adds one more on top.  The level drives the
canonical ordering used whenever atom sets are printed, the depth-bounded
Herbrand base, and the dyadic metric in :mod:`horn_limits.metric`.

All values here are immutable; every operation is a pure function.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

from .errors import ArityError

# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Variable:
    """Named placeholder. Names start with an uppercase letter or ``_``."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Application:
    functor: str
    args: tuple["Term", ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError(f"application of {self.functor!r} needs arguments")
        # cached structural hash: deep terms live in many sets and maps
        object.__setattr__(self, "_hash", hash((Application, self.functor, self.args)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return f"{self.functor}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class MetaPower:
    """Template-only term: ``functor`` applied ``n + offset`` times to ``arg``.

    ``n`` is the index of a program sequence.  MetaPower nodes appear only
    inside sequence-schema templates; they are instantiated to concrete
    nested applications before any semantic operation sees them.
    """

    functor: str
    offset: int
    arg: "Term"

    def __str__(self) -> str:
        exp = "n" if self.offset == 0 else f"n+{self.offset}"
        return f"{self.functor}^{{{exp}}}({self.arg})"


Term = Union[Variable, Constant, Application]


def term_is_ground(term: Term) -> bool:
    if isinstance(term, Variable):
        return False
    if isinstance(term, Constant):
        return True
    if isinstance(term, Application):
        return all(term_is_ground(a) for a in term.args)
    raise TypeError(f"not a concrete term: {term!r}")


@lru_cache(maxsize=None)  # terms are immutable; fixpoints revisit them often
def term_height(term: Term) -> int:
    """Height of the expression tree; a variable counts like a constant."""
    if isinstance(term, (Variable, Constant)):
        return 1
    if isinstance(term, Application):
        return 1 + max(term_height(a) for a in term.args)
    raise TypeError(f"not a concrete term: {term!r}")


@lru_cache(maxsize=None)
def term_subterms(term: Term) -> frozenset[Term]:
    """All subterms of ``term``, including ``term`` itself."""
    if isinstance(term, (Variable, Constant)):
        return frozenset((term,))
    if isinstance(term, Application):
        acc: set[Term] = {term}
        for a in term.args:
            acc |= term_subterms(a)
        return frozenset(acc)
    raise TypeError(f"not a concrete term: {term!r}")


def term_variables(term: Term) -> frozenset[str]:
    if isinstance(term, Variable):
        return frozenset((term.name,))
    if isinstance(term, Constant):
        return frozenset()
    if isinstance(term, (Application, MetaPower)):
        args = term.args if isinstance(term, Application) else (term.arg,)
        acc: set[str] = set()
        for a in args:
            acc |= term_variables(a)
        return frozenset(acc)
    raise TypeError(f"not a term: {term!r}")


def replace_variables(term, mapping: Mapping[str, Term]):
    """Substitute variables simultaneously; unmapped variables stay."""
    if isinstance(term, Variable):
        return mapping.get(term.name, term)
    if isinstance(term, Constant):
        return term
    if isinstance(term, Application):
        return Application(term.functor, tuple(replace_variables(a, mapping) for a in term.args))
    if isinstance(term, MetaPower):
        return MetaPower(term.functor, term.offset, replace_variables(term.arg, mapping))
    raise TypeError(f"not a term: {term!r}")


def term_sort_key(term: Term) -> tuple[int, str]:
    return (term_height(term), str(term))


# ---------------------------------------------------------------------------
# Atoms


@dataclass(frozen=True)
class Atom:
    """Predicate applied to terms; ``args`` may be empty and may hold variables."""

    predicate: str
    args: tuple[Term, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((Atom, self.predicate, self.args)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"


#: Alias for documentation purposes: a ground atom is an Atom whose
#: arguments contain no variables.  Operations that require groundness
#: state it in their contract and validate at the boundary.
GroundAtom = Atom


def atom_is_ground(atom: Atom) -> bool:
    return all(term_is_ground(a) for a in atom.args)


def atom_variables(atom: Atom) -> frozenset[str]:
    acc: set[str] = set()
    for a in atom.args:
        acc |= term_variables(a)
    return frozenset(acc)


@lru_cache(maxsize=None)
def level(atom: Atom) -> int:
    """Height of the atom's expression tree.

    A 0-ary atom has level 1; ``p(a)`` has level 2; ``p(f(a))`` has level 3.
    Variables are tolerated (height 1) for non-ground diagnostics only.
    """
    if not atom.args:
        return 1
    return 1 + max(term_height(a) for a in atom.args)


def subterms(atom: Atom) -> frozenset[Term]:
    """The subterm-closed set of all terms occurring in the atom's arguments."""
    acc: set[Term] = set()
    for a in atom.args:
        acc |= term_subterms(a)
    return frozenset(acc)


@lru_cache(maxsize=None)
def atom_sort_key(atom: Atom) -> tuple[int, str, tuple[str, ...]]:
    """Canonical order: ascending (level, predicate name, argument spelling)."""
    return (level(atom), atom.predicate, tuple(str(a) for a in atom.args))


# ---------------------------------------------------------------------------
# Clauses


@dataclass(frozen=True)
class HornClause:
    """Definite clause: exactly one head atom, zero or more body atoms.

    An empty body makes the clause a fact.  Variables are clause-local and
    implicitly universally quantified.
    """

    head: Atom
    body: tuple[Atom, ...] = ()

    @property
    def is_fact(self) -> bool:
        return not self.body

    def variables(self) -> frozenset[str]:
        acc = set(atom_variables(self.head))
        for b in self.body:
            acc |= atom_variables(b)
        return frozenset(acc)

    def __str__(self) -> str:
        if self.is_fact:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(b) for b in self.body)}."


_CANONICAL_NAMES = ("X", "Y", "Z", "U", "V", "W")


def _canonical_name(index: int) -> str:
    if index < len(_CANONICAL_NAMES):
        return _CANONICAL_NAMES[index]
    return f"X{index - len(_CANONICAL_NAMES) + 1}"


def canonical_clause(clause: HornClause) -> HornClause:
    """Rename variables to a canonical sequence in order of first occurrence.

    Clause equality (and duplicate detection inside :class:`Program`) is
    syntactic equality after this renaming.
    """
    order: list[str] = []
    seen: set[str] = set()

    def walk(term) -> None:
        if isinstance(term, Variable):
            if term.name not in seen:
                seen.add(term.name)
                order.append(term.name)
        elif isinstance(term, Application):
            for a in term.args:
                walk(a)
        elif isinstance(term, MetaPower):
            walk(term.arg)

    for atom in (clause.head, *clause.body):
        for a in atom.args:
            walk(a)

    mapping = {name: Variable(_canonical_name(i)) for i, name in enumerate(order)}

    def rename(atom: Atom) -> Atom:
        return Atom(atom.predicate, tuple(replace_variables(a, mapping) for a in atom.args))

    return HornClause(rename(clause.head), tuple(rename(b) for b in clause.body))


# ---------------------------------------------------------------------------
# Signatures and programs


@dataclass(frozen=True)
class Signature:
    """Symbols of a program: constants, functors and predicates with arities."""

    constants: frozenset[str] = frozenset()
    functors: frozenset[tuple[str, int]] = frozenset()
    predicates: frozenset[tuple[str, int]] = frozenset()

    @classmethod
    def of_clauses(cls, clauses: Iterable[HornClause]) -> "Signature":
        term_arity: dict[str, int] = {}
        pred_arity: dict[str, int] = {}

        def see_term(term) -> None:
            if isinstance(term, Variable):
                return
            if isinstance(term, Constant):
                _record(term_arity, term.name, 0, kind="term symbol")
                return
            if isinstance(term, Application):
                _record(term_arity, term.functor, len(term.args), kind="term symbol")
                for a in term.args:
                    see_term(a)
                return
            if isinstance(term, MetaPower):
                _record(term_arity, term.functor, 1, kind="term symbol")
                see_term(term.arg)
                return
            raise TypeError(f"not a term: {term!r}")

        for clause in clauses:
            for atom in (clause.head, *clause.body):
                _record(pred_arity, atom.predicate, len(atom.args), kind="predicate")
                for a in atom.args:
                    see_term(a)

        return cls(
            constants=frozenset(n for n, k in term_arity.items() if k == 0),
            functors=frozenset((n, k) for n, k in term_arity.items() if k > 0),
            predicates=frozenset(pred_arity.items()),
        )

    def merge(self, other: "Signature") -> "Signature":
        term_arity: dict[str, int] = {}
        pred_arity: dict[str, int] = {}
        for sig in (self, other):
            for c in sig.constants:
                _record(term_arity, c, 0, kind="term symbol")
            for f, k in sig.functors:
                _record(term_arity, f, k, kind="term symbol")
            for p, k in sig.predicates:
                _record(pred_arity, p, k, kind="predicate")
        return Signature(
            constants=frozenset(n for n, k in term_arity.items() if k == 0),
            functors=frozenset((n, k) for n, k in term_arity.items() if k > 0),
            predicates=frozenset(pred_arity.items()),
        )

    @classmethod
    def of_atoms(cls, atoms: Iterable[Atom]) -> "Signature":
        return cls.of_clauses(HornClause(a) for a in atoms)


def _record(table: dict[str, int], name: str, arity: int, *, kind: str) -> None:
    known = table.setdefault(name, arity)
    if known != arity:
        raise ArityError(
            name,
            f"{kind} {name!r} used with arities {known} and {arity}",
        )


@dataclass(frozen=True)
class Program:
    """A finite, duplicate-free, variable-normalized list of Horn clauses.

    Build programs with :meth:`from_clauses` (or the parser), which
    canonicalizes variables, drops duplicate clauses and derives the
    signature with arity-consistency checking.
    """

    clauses: tuple[HornClause, ...] = ()
    signature: Signature = Signature()

    @classmethod
    def from_clauses(cls, clauses: Iterable[HornClause]) -> "Program":
        normalized: list[HornClause] = []
        seen: set[HornClause] = set()
        for clause in clauses:
            clause = canonical_clause(clause)
            if clause not in seen:
                seen.add(clause)
                normalized.append(clause)
        return cls(tuple(normalized), Signature.of_clauses(normalized))

    @property
    def facts(self) -> tuple[HornClause, ...]:
        return tuple(c for c in self.clauses if c.is_fact)

    @property
    def rules(self) -> tuple[HornClause, ...]:
        return tuple(c for c in self.clauses if not c.is_fact)

    def __str__(self) -> str:
        return "\n".join(str(c) for c in self.clauses)


# ---------------------------------------------------------------------------
# Interpretations


@dataclass(frozen=True)
class Interpretation:
    """A finite set of ground atoms, optionally a depth-bounded truncation.

    ``depth_bound = D`` marks the set as the level-at-most-D slice of a
    possibly larger interpretation; every member must then have level <= D.
    """

    atoms: frozenset[Atom] = frozenset()
    depth_bound: int | None = None

    def __post_init__(self) -> None:
        for a in self.atoms:
            if not atom_is_ground(a):
                raise ValueError(f"interpretation atom is not ground: {a}")
        if self.depth_bound is not None:
            if self.depth_bound < 1:
                raise ValueError("depth bound must be a positive integer")
            for a in self.atoms:
                if level(a) > self.depth_bound:
                    raise ValueError(
                        f"atom {a} has level {level(a)} above the depth bound "
                        f"{self.depth_bound}"
                    )

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.atoms

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.in_canonical_order())

    def in_canonical_order(self) -> list[Atom]:
        return sorted(self.atoms, key=atom_sort_key)

    def restrict(self, depth: int) -> "Interpretation":
        """The level-at-most-``depth`` slice, marked as a truncation."""
        return Interpretation(
            frozenset(a for a in self.atoms if level(a) <= depth), depth_bound=depth
        )

    def without_bound(self) -> "Interpretation":
        return Interpretation(self.atoms)


# ---------------------------------------------------------------------------
# Depth-bounded Herbrand enumeration


def ground_terms(signature: Signature, max_height: int) -> list[Term]:
    """All ground terms over ``signature`` of height <= ``max_height``.

    Deterministic order: by height, then spelling.
    """
    if max_height < 0:
        return []
    by_height: list[list[Term]] = []
    cumulative: list[Term] = []
    constants: list[Term] = [Constant(c) for c in sorted(signature.constants)]
    functors = sorted(signature.functors)
    for h in range(1, max_height + 1):
        layer: list[Term] = []
        if h == 1:
            layer = list(constants)
        else:
            for name, arity in functors:
                for combo in itertools.product(cumulative, repeat=arity):
                    if max(term_height(t) for t in combo) == h - 1:
                        layer.append(Application(name, combo))
        layer.sort(key=term_sort_key)
        by_height.append(layer)
        cumulative = cumulative + layer
        if not layer and h > 1:
            break  # no taller terms can appear
    return cumulative


def bounded_base(signature: Signature, depth: int) -> Interpretation:
    """All ground atoms over ``signature`` of level <= ``depth``.

    The Herbrand universe must be non-empty, so the signature needs at
    least one constant.
    """
    if depth < 1:
        raise ValueError("depth must be a positive integer")
    if not signature.constants:
        raise ValueError("signature has no constants: the Herbrand universe is empty")
    terms = ground_terms(signature, depth - 1)
    atoms: set[Atom] = set()
    for pred, arity in sorted(signature.predicates):
        if arity == 0:
            atoms.add(Atom(pred))
            continue
        for combo in itertools.product(terms, repeat=arity):
            atoms.add(Atom(pred, combo))
    return Interpretation(frozenset(atoms), depth_bound=depth)


def count_bounded_base(signature: Signature, depth: int) -> int:
    """``len(bounded_base(signature, depth))`` without enumerating it.

    Tolerates constant-free signatures (counts 0-ary atoms only).
    """
    if depth < 1:
        return 0
    per_height = [0] * (depth + 1)  # index by height, 0 unused
    per_height[1] = len(signature.constants)
    cum_prev = 0
    cum = per_height[1]
    for h in range(2, depth):
        total = 0
        for _, arity in signature.functors:
            total += cum**arity - cum_prev**arity
        per_height[h] = total
        cum_prev, cum = cum, cum + total
    terms_below_depth = sum(per_height[1:depth])
    count = 0
    for _, arity in signature.predicates:
        count += terms_below_depth**arity if arity else 1
    return count
