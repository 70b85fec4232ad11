"""Membership decision in the query's subterm universe, with proof trees."""

import random

import pytest

from horn_limits import (
    Membership,
    UncertifiedProgramError,
    bounded_base,
    bounded_least_model,
    decide_membership,
    level,
    parse_ground_atom,
    parse_program,
    proof_tree,
    tp_step,
)
from horn_limits.decider import proof_is_valid
from .helpers import interp, p_chain, random_certified_program

ASCENDING_1 = parse_program("p(f(X)) :- p(X).\np(f(a)).")


class TestDecideMembership:
    def test_derivable_atom_is_in(self):
        verdict = decide_membership(ASCENDING_1, p_chain(3))
        assert verdict.status is Membership.IN
        assert verdict.proof is not None

    def test_below_the_seed_is_out(self):
        verdict = decide_membership(ASCENDING_1, p_chain(0))
        assert verdict.status is Membership.OUT
        assert verdict.proof is None

    def test_empty_program_answers_out(self):
        verdict = decide_membership(parse_program(""), p_chain(2))
        assert verdict.status is Membership.OUT

    def test_uncertified_program_rejected(self):
        descending = parse_program("p(X) :- p(f(X)).\np(f^3(a)).")
        with pytest.raises(UncertifiedProgramError):
            decide_membership(descending, p_chain(0))

    def test_non_ground_query_rejected(self):
        from horn_limits import Atom, Variable

        with pytest.raises(ValueError):
            decide_membership(ASCENDING_1, Atom("p", (Variable("X"),)))

    def test_universe_size_is_pool_times_predicates(self):
        # query p(f^3(a)): pool {a, f(a), f^2(a), f^3(a)}, one unary predicate
        verdict = decide_membership(ASCENDING_1, p_chain(3))
        assert verdict.universe_size == 4

    def test_fact_outside_query_pool_is_ignored(self):
        program = parse_program("p(f(a)).\nq(b).")
        verdict = decide_membership(program, p_chain(1))
        assert verdict.status is Membership.IN

    def test_multi_predicate_chain(self):
        program = parse_program("q(X) :- p(X).\np(a).")
        assert decide_membership(program, parse_ground_atom("q(a)")).is_member
        assert not decide_membership(program, parse_ground_atom("q(b)")).is_member


class TestProofTree:
    def test_two_step_derivation(self):
        tree = proof_tree(ASCENDING_1, p_chain(2))
        assert tree is not None
        assert tree.root == p_chain(2)
        assert not tree.clause.is_fact
        assert len(tree.children) == 1
        child = tree.children[0]
        assert child.root == p_chain(1)
        assert child.clause.is_fact
        assert tree.height() == 2

    def test_fact_is_a_leaf(self):
        tree = proof_tree(ASCENDING_1, p_chain(1))
        assert tree is not None and tree.clause.is_fact and not tree.children

    def test_underivable_atom_has_no_tree(self):
        assert proof_tree(ASCENDING_1, p_chain(0)) is None

    def test_minimal_height_equals_chain_length(self):
        for k in range(1, 6):
            tree = proof_tree(ASCENDING_1, p_chain(k))
            assert tree is not None and tree.height() == k

    def test_shorter_derivation_preferred(self):
        # p(f^2(a)) is both a fact and derivable in two steps
        program = parse_program("p(f(X)) :- p(X).\np(f(a)).\np(f^2(a)).")
        tree = proof_tree(program, p_chain(2))
        assert tree is not None and tree.clause.is_fact and tree.height() == 1

    def test_replay_and_descent_on_random_programs(self):
        rng = random.Random(37)
        programs_checked = 0
        proofs_checked = 0
        while programs_checked < 40:
            program = random_certified_program(rng)
            if not program.signature.constants:
                continue
            programs_checked += 1
            model = bounded_least_model(program, 5).model
            for query in model.in_canonical_order():
                verdict = decide_membership(program, query)
                assert verdict.is_member
                tree = verdict.proof
                assert tree is not None and proof_is_valid(program, tree)
                proofs_checked += 1
                stack = [tree]
                root_pool = None
                while stack:
                    node = stack.pop()
                    for child in node.children:
                        # descent: children never outrank their parent
                        assert level(child.root) <= level(node.root)
                        stack.append(child)
                    # replay: the node is re-derived from its children alone
                    children_atoms = frozenset(ch.root for ch in node.children)
                    depth = max((level(a) for a in children_atoms | {node.root}), default=1)
                    step = tp_step(program, interp(*children_atoms), depth)
                    assert node.root in step.atoms
        assert proofs_checked >= 40


class TestOracleAgreement:
    def test_matches_bounded_model_on_small_signatures(self):
        rng = random.Random(41)
        checked_programs = 0
        while checked_programs < 30:
            program = random_certified_program(rng)
            if not program.signature.constants:
                continue
            checked_programs += 1
            model = bounded_least_model(program, 5).model
            for query in bounded_base(program.signature, 5).in_canonical_order():
                expected = query in model.atoms
                assert decide_membership(program, query).is_member == expected
