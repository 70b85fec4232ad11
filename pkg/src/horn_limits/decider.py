"""Decision procedure for least-model membership of certified programs.

For programs passing both guard checks, every derivation of a ground atom
uses only atoms built from the query's own subterms: term coverage forces
each child in a derivation to reuse terms of its parent.  Membership is
therefore decided inside the finite universe of atoms over the query's
subterm pool, and a positive answer comes with a minimal-height
derivation tree.

Programs that fail certification are rejected: without term coverage the
subterm universe is not exhaustive and membership is not decidable this
way (or, in general, at all).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .engine import _index_atoms, _match_body, match_atom, substitute_atom
from .errors import UncertifiedProgramError
from .guard import inspect_program
from .syntax import (
    Atom,
    HornClause,
    Program,
    Term,
    atom_is_ground,
    atom_sort_key,
    subterms,
)


class Membership(enum.Enum):
    IN = "In"
    OUT = "Out"


@dataclass(frozen=True)
class ProofTree:
    """Derivation witness: ``root`` is the clause head under ``bindings``.

    Children are the instantiated body atoms in order; facts have no
    children.  Every atom in the tree only uses subterms of the root atom
    at the top of the whole proof.
    """

    root: Atom
    clause: HornClause
    bindings: tuple[tuple[str, Term], ...]  # sorted by variable name
    children: tuple["ProofTree", ...] = ()

    @property
    def substitution(self) -> dict[str, Term]:
        return dict(self.bindings)

    def height(self) -> int:
        if not self.children:
            return 1
        return 1 + max(c.height() for c in self.children)

    def format(self, indent: int = 0) -> str:
        pad = "  " * indent
        if self.clause.is_fact:
            via = f"fact {self.clause}"
        else:
            shown = ", ".join(f"{name} = {term}" for name, term in self.bindings)
            via = f"rule {self.clause}" + (f"  {{{shown}}}" if shown else "")
        lines = [f"{pad}{self.root}   [{via}]"]
        lines.extend(c.format(indent + 1) for c in self.children)
        return "\n".join(lines)


@dataclass(frozen=True)
class Verdict:
    status: Membership
    proof: ProofTree | None
    universe_size: int

    @property
    def is_member(self) -> bool:
        return self.status is Membership.IN


def decide_membership(program: Program, query: Atom) -> Verdict:
    """Decide whether ``query`` lies in the least Herbrand model of ``program``.

    Requires a ground query and a certified program.  ``universe_size``
    reports how many candidate atoms the restricted fixpoint ranged over.
    """
    if not atom_is_ground(query):
        raise ValueError(f"query atom must be ground: {query}")
    report = inspect_program(program)
    if not (report.coverage_all and report.range_restricted_all):
        raise UncertifiedProgramError(report)

    pool = subterms(query)
    predicates = sorted(program.signature.predicates)
    universe_size = sum(len(pool) ** arity for _, arity in predicates)
    max_arity = max((arity for _, arity in predicates), default=0)
    assert universe_size <= len(predicates) * max(1, len(pool)) ** max_arity

    known_preds = set(predicates)

    def in_universe(atom: Atom) -> bool:
        if (atom.predicate, len(atom.args)) not in known_preds:
            return False
        return all(arg in pool for arg in atom.args)

    # Stage-numbered fixpoint inside the universe, with delta joins; the
    # stage of an atom is the minimal height of any derivation of it.
    # Closing can stop as soon as the query shows up: its stage is final
    # and every atom a proof can mention was staged in an earlier round.
    stage_of: dict[Atom, int] = {}
    derived: set[Atom] = set()
    older: set[Atom] = set()
    delta: set[Atom] = set()
    stage = 0
    while query not in derived:
        stage += 1
        new: set[Atom] = set()
        if stage == 1:
            for clause in program.clauses:
                if clause.is_fact and in_universe(clause.head):
                    new.add(clause.head)
        else:
            idx_older = _index_atoms(older)
            idx_delta = _index_atoms(delta)
            idx_full = _index_atoms(derived)
            for clause in program.clauses:
                arity = len(clause.body)
                if arity == 0:
                    continue
                for i in range(arity):
                    sources = [idx_older] * i + [idx_delta] + [idx_full] * (arity - 1 - i)
                    for bindings in _match_body(clause.body, sources, {}):
                        head = substitute_atom(clause.head, bindings)
                        if head not in derived and in_universe(head):
                            new.add(head)
        if not new:
            break
        for atom in new:
            stage_of[atom] = stage
        older = set(derived)
        derived |= new
        delta = new

    if query not in derived:
        return Verdict(Membership.OUT, None, universe_size)
    proof = _build_proof(program, query, stage_of)
    return Verdict(Membership.IN, proof, universe_size)


def proof_tree(program: Program, query: Atom) -> ProofTree | None:
    """Minimal-height derivation of ``query``, or None when not derivable.

    Ties are broken by clause order in the program, then by the canonical
    enumeration order of substitutions, so the result is deterministic.
    """
    return decide_membership(program, query).proof


def _build_proof(program: Program, atom: Atom, stage_of: dict[Atom, int]) -> ProofTree:
    target_stage = stage_of[atom]
    earlier = [a for a, s in stage_of.items() if s < target_stage]
    index = _index_atoms(earlier)
    for clause in program.clauses:
        seed = match_atom(clause.head, atom)
        if seed is None:
            continue
        sources = [index] * len(clause.body)
        for bindings in _match_body(clause.body, sources, seed):
            children_atoms = [substitute_atom(b, bindings) for b in clause.body]
            children = tuple(_build_proof(program, c, stage_of) for c in children_atoms)
            return ProofTree(
                root=atom,
                clause=clause,
                bindings=tuple(sorted(bindings.items())),
                children=children,
            )
    raise AssertionError(f"no clause re-derives staged atom {atom}")


def proof_is_valid(program: Program, tree: ProofTree) -> bool:
    """Replay check: each node is its clause head under the node's bindings,
    children line up with the instantiated body, and the clause is in the
    program."""
    bindings = tree.substitution
    if tree.clause not in program.clauses:
        return False
    if substitute_atom(tree.clause.head, bindings) != tree.root:
        return False
    body = [substitute_atom(b, bindings) for b in tree.clause.body]
    if [c.root for c in tree.children] != body:
        return False
    return all(proof_is_valid(program, c) for c in tree.children)
