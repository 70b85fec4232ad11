"""Matching, the consequence operator, bounded fixpoints, model checking."""

import itertools
import random

import pytest

from horn_limits import (
    HornClause,
    Interpretation,
    NonFinitaryError,
    bounded_base,
    bounded_least_model,
    is_bounded_model,
    level,
    match_atom,
    parse_program,
    substitute_atom,
    tp_step,
)
from .helpers import (
    app,
    atom,
    c,
    close_under,
    fpow,
    interp,
    p_chain,
    random_certified_program,
    random_finitary_program,
    random_interpretation,
    v,
)

ASCENDING_1 = parse_program("p(f(X)) :- p(X).\np(f(a)).")
DESCENDING_3 = parse_program("p(X) :- p(f(X)).\np(f^3(a)).")


class TestMatchAtom:
    def test_binds_single_variable(self):
        assert match_atom(atom("p", v("X")), p_chain(1)) == {"X": fpow(1)}

    def test_functor_clash(self):
        assert match_atom(atom("p", app("f", v("X"))), p_chain(0)) is None

    def test_inconsistent_repeated_variable(self):
        assert match_atom(atom("p", v("X"), v("X")), atom("p", c("a"), c("b"))) is None

    def test_repeated_variable_consistent(self):
        got = match_atom(atom("p", v("X"), v("X")), atom("p", c("a"), c("a")))
        assert got == {"X": c("a")}

    def test_seed_is_respected(self):
        seed = {"X": c("a")}
        assert match_atom(atom("p", v("X")), p_chain(0), seed) == {"X": c("a")}
        assert match_atom(atom("p", v("X")), p_chain(1), seed) is None

    def test_seed_not_mutated(self):
        seed = {"X": c("a")}
        match_atom(atom("p", v("Y")), p_chain(0), seed)
        assert seed == {"X": c("a")}

    def test_match_then_apply_recovers_target(self):
        rng = random.Random(5)
        for _ in range(200):
            program = random_certified_program(rng)
            for clause in program.rules:
                ground = random_interpretation(rng, program.signature, 4, density=0.5)
                for target in ground.in_canonical_order():
                    got = match_atom(clause.head, target)
                    if got is not None:
                        assert substitute_atom(clause.head, got) == target


class TestTpStep:
    def test_only_fact_fires_on_empty(self):
        out = tp_step(ASCENDING_1, interp(), 9)
        assert out.atoms == {p_chain(1)}

    def test_rule_fires_once_seeded(self):
        out = tp_step(ASCENDING_1, interp(p_chain(1)), 9)
        assert out.atoms == {p_chain(1), p_chain(2)}

    def test_empty_program(self):
        empty = parse_program("")
        assert tp_step(empty, interp(p_chain(0)), 5).atoms == frozenset()

    def test_does_not_keep_unsupported_input_atoms(self):
        out = tp_step(DESCENDING_3, interp(p_chain(1)), 9)
        # input p(f(a)) is not re-derivable; only the fact and the stripped atom
        assert out.atoms == {p_chain(0), p_chain(3)}

    def test_depth_truncation(self):
        out = tp_step(ASCENDING_1, interp(p_chain(1), depth=3), 3)
        assert out.atoms == {p_chain(1)}  # p(f^2(a)) has level 4

    def test_rejects_interpretation_above_depth(self):
        with pytest.raises(ValueError):
            tp_step(ASCENDING_1, interp(p_chain(5)), 4)

    def test_non_finitary_clause_detected(self):
        program = parse_program("q(X, Y) :- p(X).\np(a).")
        with pytest.raises(NonFinitaryError):
            tp_step(program, interp(p_chain(0)), 5)


class TestBoundedLeastModel:
    def test_descending_chain_collects_prefix(self):
        report = bounded_least_model(DESCENDING_3, 10)
        assert report.model.atoms == {p_chain(k) for k in range(4)}
        assert report.exact is False

    def test_ascending_chain_truncates(self):
        program = parse_program("p(f(X)) :- p(X).\np(f^2(a)).")
        report = bounded_least_model(program, 6)
        assert report.model.atoms == {p_chain(2), p_chain(3), p_chain(4)}
        assert report.exact is True
        assert report.dropped_above_depth == 1

    def test_empty_program(self):
        report = bounded_least_model(parse_program(""), 5)
        assert report.model.atoms == frozenset()
        assert report.iterations == 1
        assert report.delta_sizes == (0,)

    def test_delta_sizes_sum_to_model_size(self):
        rng = random.Random(11)
        for _ in range(60):
            program = random_finitary_program(rng)
            report = bounded_least_model(program, 5)
            assert sum(report.delta_sizes) == len(report.model)
            assert report.iterations == len(report.delta_sizes)
            assert report.delta_sizes[-1] == 0

    def test_non_finitary_program_rejected_upfront(self):
        with pytest.raises(NonFinitaryError):
            bounded_least_model(parse_program("p(X)."), 4)

    def test_semi_naive_equals_naive(self):
        rng = random.Random(13)
        for _ in range(80):
            program = random_finitary_program(rng)
            fast = bounded_least_model(program, 5)
            slow = bounded_least_model(program, 5, naive=True)
            assert fast.model == slow.model
            assert fast.iterations == slow.iterations
            assert fast.delta_sizes == slow.delta_sizes
            assert fast.dropped_above_depth == slow.dropped_above_depth

    def test_model_is_a_fixed_point_of_the_operator(self):
        rng = random.Random(17)
        for _ in range(60):
            program = random_finitary_program(rng)
            model = bounded_least_model(program, 5).model
            again = tp_step(program, model, 5)
            assert again.atoms == model.atoms


class TestMonotonicity:
    def test_on_random_interpretation_pairs(self):
        rng = random.Random(19)
        for _ in range(120):
            program = random_finitary_program(rng)
            if not program.signature.constants:
                continue
            small = random_interpretation(rng, program.signature, 5, density=0.25)
            extra = random_interpretation(rng, program.signature, 5, density=0.25)
            large = Interpretation(small.atoms | extra.atoms)
            lo = tp_step(program, small, 5)
            hi = tp_step(program, large, 5)
            assert lo.atoms <= hi.atoms


class TestIsBoundedModel:
    def test_empty_interpretation_models_pure_rule(self):
        program = parse_program("p(f(X)) :- p(X).")
        assert is_bounded_model(program, interp(), 6)

    def test_violation_witness_is_the_first_unsupported_instance(self):
        check = is_bounded_model(ASCENDING_1, interp(p_chain(1)), 4)
        assert not check.holds
        assert str(check.violation) == "p(f(f(a))) :- p(f(a))."

    def test_fact_program_with_its_fact(self):
        program = parse_program("p(a).")
        assert is_bounded_model(program, interp(p_chain(0)), 3)

    def test_fact_program_without_its_fact(self):
        program = parse_program("p(a).")
        check = is_bounded_model(program, interp(), 3)
        assert not check.holds
        assert str(check.violation) == "p(a)."

    def test_witness_matches_exhaustive_search(self):
        # independent enumeration: all instances X -> f^j(a), levels <= 4
        program = ASCENDING_1
        holder = interp(p_chain(1))
        violated = []
        for j in range(3):
            head = p_chain(j + 1)
            body = p_chain(j)
            if level(head) <= 4 and level(body) <= 4:
                if body in holder.atoms and head not in holder.atoms:
                    violated.append(HornClause(head, (body,)))
        assert violated and str(violated[0]) == "p(f(f(a))) :- p(f(a))."

    def test_bounded_least_model_is_a_model(self):
        rng = random.Random(23)
        for _ in range(40):
            program = random_finitary_program(rng)
            model = bounded_least_model(program, 4).model
            assert is_bounded_model(program, model, 4)


class TestLeastness:
    def test_model_contained_in_every_closed_superset(self):
        rng = random.Random(29)
        for _ in range(60):
            program = random_finitary_program(rng)
            if not program.signature.constants:
                continue
            model = bounded_least_model(program, 4).model
            noise = random_interpretation(rng, program.signature, 4, density=0.3)
            closed = close_under(program, model.atoms | noise.atoms, 4)
            assert is_bounded_model(program, closed, 4)
            assert model.atoms <= closed.atoms


class TestModelIntersection:
    def test_intersection_of_models_is_a_model(self):
        rng = random.Random(31)
        done = 0
        while done < 60:
            program = random_finitary_program(rng)
            if not program.signature.constants:
                continue
            one = close_under(
                program, random_interpretation(rng, program.signature, 4, 0.35).atoms, 4
            )
            two = close_under(
                program, random_interpretation(rng, program.signature, 4, 0.35).atoms, 4
            )
            assert is_bounded_model(program, one, 4)
            assert is_bounded_model(program, two, 4)
            both = Interpretation(one.atoms & two.atoms)
            assert is_bounded_model(program, both, 4)
            done += 1
