"""Shared test utilities: term builders, independent oracles, random generators.

The oracles here deliberately re-derive facts from first principles
(string-free recursive walks, brute-force enumeration) so that tests
check the package against something other than itself.
"""

from __future__ import annotations

import random
from pathlib import Path

from horn_limits import (
    Application,
    Atom,
    Constant,
    HornClause,
    Interpretation,
    Program,
    Signature,
    Variable,
    tp_step,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


# ---------------------------------------------------------------------------
# Builders


def v(name: str) -> Variable:
    return Variable(name)


def c(name: str) -> Constant:
    return Constant(name)


def app(functor: str, *args) -> Application:
    return Application(functor, tuple(args))


def atom(pred: str, *args) -> Atom:
    return Atom(pred, tuple(args))


def fact(head: Atom) -> HornClause:
    return HornClause(head)


def rule(head: Atom, *body: Atom) -> HornClause:
    return HornClause(head, tuple(body))


def fpow(k: int, base=None, functor: str = "f"):
    """f applied k times to the base (default constant a); k = 0 gives the base."""
    term = base if base is not None else c("a")
    for _ in range(k):
        term = app(functor, term)
    return term


def p_chain(k: int) -> Atom:
    """The atom p(f^k(a)); p(a) when k = 0."""
    return atom("p", fpow(k))


def interp(*atoms: Atom, depth: int | None = None) -> Interpretation:
    return Interpretation(frozenset(atoms), depth_bound=depth)


# ---------------------------------------------------------------------------
# Independent oracles


def oracle_height(term) -> int:
    if isinstance(term, Application):
        best = 0
        for sub in term.args:
            h = oracle_height(sub)
            if h > best:
                best = h
        return best + 1
    return 1


def oracle_level(a: Atom) -> int:
    if not a.args:
        return 1
    return 1 + max(oracle_height(t) for t in a.args)


def oracle_subterms(term) -> set:
    found = {term}
    if isinstance(term, Application):
        for sub in term.args:
            found |= oracle_subterms(sub)
    return found


def oracle_atom_subterms(a: Atom) -> set:
    found: set = set()
    for t in a.args:
        found |= oracle_subterms(t)
    return found


def oracle_ground_terms(constants: list[str], functors: list[tuple[str, int]], max_height: int) -> set:
    """Grow the ground-term universe height by height, by brute force."""
    levels: list[set] = [set()]
    levels.append({Constant(name) for name in constants})
    everything = set(levels[1])
    for h in range(2, max_height + 1):
        layer = set()
        for name, arity in functors:
            def tuples(slots):
                if slots == 0:
                    yield ()
                    return
                for prefix in tuples(slots - 1):
                    for t in everything:
                        yield prefix + (t,)
            for combo in tuples(arity):
                if combo and max(oracle_height(t) for t in combo) == h - 1:
                    layer.add(Application(name, combo))
        levels.append(layer)
        everything |= layer
    return everything


# ---------------------------------------------------------------------------
# Random generation

#: (constants, functors, predicates) triples.  Kept small so query and
#: instance enumeration stays cheap.
PROFILES = [
    (["a"], [("f", 1)], [("p", 1)]),
    (["a", "b"], [("f", 1)], [("p", 1), ("q", 1)]),
    (["a", "b"], [("f", 1), ("g", 1)], [("p", 1), ("q", 2)]),
    (["a"], [("g", 2)], [("p", 1)]),
    (["a", "b", "e"], [], [("p", 1), ("q", 2), ("r", 0)]),
]


def random_ground_term(rng: random.Random, constants, functors, max_height: int):
    if max_height <= 1 or not functors or rng.random() < 0.35:
        return c(rng.choice(constants))
    name, arity = rng.choice(functors)
    return app(name, *(random_ground_term(rng, constants, functors, max_height - 1) for _ in range(arity)))


def random_term(rng: random.Random, constants, functors, var_names, max_height: int):
    if var_names and rng.random() < 0.3:
        return v(rng.choice(var_names))
    if max_height <= 1 or not functors or rng.random() < 0.35:
        return c(rng.choice(constants))
    name, arity = rng.choice(functors)
    return app(name, *(random_term(rng, constants, functors, var_names, max_height - 1) for _ in range(arity)))


def random_certified_program(rng: random.Random, profile=None, max_clauses: int = 6) -> Program:
    """A program passing both guard checks.

    Rule bodies draw their arguments from the head's subterm pool, which
    makes coverage hold by construction; missing head variables are bound
    by appended body atoms, which restores range restriction.
    """
    constants, functors, predicates = profile or rng.choice(PROFILES)
    var_names = ["X", "Y"]
    clauses: list[HornClause] = []
    n_clauses = rng.randint(1, max_clauses)
    for _ in range(n_clauses):
        if rng.random() < 0.45:
            pred, arity = rng.choice(predicates)
            head = Atom(pred, tuple(random_ground_term(rng, constants, functors, 3) for _ in range(arity)))
            clauses.append(fact(head))
            continue
        pred, arity = rng.choice(predicates)
        head = Atom(pred, tuple(random_term(rng, constants, functors, var_names, 3) for _ in range(arity)))
        pool = sorted(oracle_atom_subterms(head), key=lambda t: (oracle_height(t), str(t)))
        body: list[Atom] = []
        if pool:
            for _ in range(rng.randint(0, 2)):
                bp, barity = rng.choice(predicates)
                body.append(Atom(bp, tuple(rng.choice(pool) for _ in range(barity))))
        head_vars = {t.name for t in pool if isinstance(t, Variable)}
        bound = set()
        for b in body:
            bound |= _vars_of(b)
        positive = [p for p in predicates if p[1] > 0]
        for missing in sorted(head_vars - bound):
            if not positive:
                break
            bp, barity = rng.choice(positive)
            args = [v(missing)] + [rng.choice(pool) for _ in range(barity - 1)]
            body.append(Atom(bp, tuple(args)))
            bound.add(missing)
        if head_vars - bound:
            continue  # could not range-restrict this head; skip the clause
        clauses.append(HornClause(head, tuple(body)))
    if not clauses:
        clauses.append(fact(Atom(predicates[0][0], tuple(c(constants[0]) for _ in range(predicates[0][1])))))
    return Program.from_clauses(clauses)


def random_finitary_program(rng: random.Random, profile=None, max_clauses: int = 5) -> Program:
    """Range-restricted but not necessarily term-covered."""
    constants, functors, predicates = profile or rng.choice(PROFILES)
    var_names = ["X", "Y"]
    clauses: list[HornClause] = []
    for _ in range(rng.randint(1, max_clauses)):
        pred, arity = rng.choice(predicates)
        if rng.random() < 0.4:
            head = Atom(pred, tuple(random_ground_term(rng, constants, functors, 3) for _ in range(arity)))
            clauses.append(fact(head))
            continue
        body = []
        for _ in range(rng.randint(1, 2)):
            bp, barity = rng.choice(predicates)
            body.append(Atom(bp, tuple(random_term(rng, constants, functors, var_names, 2) for _ in range(barity))))
        body_vars = sorted({name for b in body for name in _vars_of(b)})
        head_args = []
        for _ in range(arity):
            if body_vars and rng.random() < 0.6:
                head_args.append(v(rng.choice(body_vars)))
            else:
                head_args.append(random_ground_term(rng, constants, functors, 2))
        clauses.append(HornClause(Atom(pred, tuple(head_args)), tuple(body)))
    return Program.from_clauses(clauses)


def _vars_of(a: Atom) -> set[str]:
    return {t.name for arg in a.args for t in oracle_subterms(arg) if isinstance(t, Variable)}


def random_interpretation(
    rng: random.Random,
    signature: Signature,
    depth: int,
    density: float = 0.3,
    max_atoms: int = 25,
) -> Interpretation:
    from horn_limits import bounded_base

    if not signature.constants:
        return Interpretation()
    base = bounded_base(signature, depth).in_canonical_order()
    want = min(max_atoms, max(0, round(density * len(base))))
    if want >= len(base):
        chosen = frozenset(base)
    else:
        chosen = frozenset(rng.sample(base, want))
    return Interpretation(chosen)


def close_under(program: Program, start: frozenset, depth: int) -> Interpretation:
    """Smallest depth-bounded superset of ``start`` closed under the clauses."""
    current = frozenset(start)
    while True:
        step = tp_step(program, Interpretation(current), depth)
        merged = current | step.atoms
        if merged == current:
            return Interpretation(current, depth_bound=depth)
        current = merged
