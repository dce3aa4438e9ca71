from __future__ import annotations

from random import Random

import pytest

from corpus_util import (
    compile_bits,
    layered_call_consistent_clauses,
    mask_to_atoms,
    random_ground_clauses,
    stable_models_bits,
)
from xnmr.parser import parse_program
from xnmr.stable import (
    Assignment,
    EMPTY_ASSIGNMENT,
    OracleBudgetError,
    call_consistent,
    enumerate_stable,
    gl_check,
    models_where_true,
    oracle_enumerate,
    propagate,
    true_in_all,
)
from xnmr.terms import Atom, Clause, Constant
from xnmr.wfs import PartialInterpretation, ResidualProgram, phi, program_atoms

p = Atom("p")
q = Atom("q")
r = Atom("r")
ua = Atom("u", (Constant("a"),))


def res(text):
    return ResidualProgram.from_clauses(parse_program(text).clauses)


TWO_CYCLE = res("p :- tnot(q).\nq :- tnot(p).")
SELF_NEG = res("u(a) :- tnot(u(a)).")
NO_MODEL_RESIDUAL = res("q(a) :- tnot(p(a)).\nq(a) :- u(a).\np(a) :- tnot(q(a)).\nu(a) :- tnot(u(a)).")
CONSTRAINED_CYCLE = res("r :- p, tnot(r).\np :- tnot(q).\nq :- tnot(p).")


def names(model):
    return sorted(a.predicate for a in model.true_atoms)


# -- propagate ---------------------------------------------------------------

def test_propagate_forces_complement_false():
    out = propagate(TWO_CYCLE, Assignment(frozenset([1]), frozenset()))
    assert out == Assignment(frozenset([1]), frozenset([2]))


def test_propagate_self_negation_conflict():
    # u(a) true needs tnot(u(a)); confirmed by the oracle having no models.
    assert propagate(SELF_NEG, Assignment(frozenset([1]), frozenset())) is None
    assert oracle_enumerate(SELF_NEG) == []


def test_propagate_clauseless_atom_forced_false():
    program = res("p :- q, tnot(x).")
    out = propagate(program, EMPTY_ASSIGNMENT)
    handle_q = program.atom_table.handle_of(q)
    assert handle_q in out.forced_false


def test_propagate_satisfied_body_forces_head():
    program = res("p :- tnot(q).\nq :- x.")
    out = propagate(program, EMPTY_ASSIGNMENT)
    table = program.atom_table
    assert table.handle_of(q) in out.forced_false  # x unfounded, q unsupported
    assert table.handle_of(p) in out.forced_true


def test_propagate_unfounded_set_rule():
    looped = res("p :- p.")
    with_rule = propagate(looped, Assignment(frozenset([1]), frozenset()))
    without_rule = propagate(looped, Assignment(frozenset([1]), frozenset()),
                             use_unfounded=False)
    assert with_rule is None  # p supported only by itself
    assert without_rule == Assignment(frozenset([1]), frozenset())


def test_propagate_never_contradicts_a_stable_model():
    rng = Random(6001)
    for _ in range(60):
        program = ResidualProgram.from_clauses(
            random_ground_clauses(rng, max_atoms=8, max_clauses=16))
        models = [m.handles for m in oracle_enumerate(program)]
        out = propagate(program, EMPTY_ASSIGNMENT)
        if out is None:
            assert models == []
            continue
        for handles in models:
            assert out.forced_true <= handles
            assert not out.forced_false & handles


# -- enumerate_stable ------------------------------------------------------------

def test_enumerate_two_cycle_order():
    assert [names(m) for m in enumerate_stable(TWO_CYCLE)] == [["q"], ["p"]]


def test_enumerate_inconsistent_residual_no_models():
    assert list(enumerate_stable(NO_MODEL_RESIDUAL)) == []


def test_enumerate_constrained_cycle_residual():
    assert [names(m) for m in enumerate_stable(CONSTRAINED_CYCLE)] == [["q"]]


def test_enumerate_empty_residual_has_empty_model():
    empty = ResidualProgram.from_clauses(())
    models = list(enumerate_stable(empty))
    assert len(models) == 1
    assert models[0].true_atoms == frozenset()


def test_every_emitted_model_passes_gl_check():
    rng = Random(6002)
    for _ in range(80):
        program = ResidualProgram.from_clauses(
            random_ground_clauses(rng, max_atoms=9, max_clauses=18))
        for model in enumerate_stable(program):
            assert gl_check(program, model.true_atoms)
            assert gl_check(program, model.handles)


def test_engine_matches_oracle_random():
    rng = Random(6003)
    for _ in range(80):
        program = ResidualProgram.from_clauses(
            random_ground_clauses(rng, max_atoms=9, max_clauses=18))
        engine = [m.handles for m in enumerate_stable(program)]
        assert len(set(engine)) == len(engine), "duplicate model emitted"
        assert set(engine) == {m.handles for m in oracle_enumerate(program)}


def test_engine_matches_oracle_without_unfounded_propagation():
    rng = Random(6004)
    for _ in range(40):
        program = ResidualProgram.from_clauses(
            random_ground_clauses(rng, max_atoms=7, max_clauses=14))
        fitting_only = {m.handles for m in enumerate_stable(program,
                                                            use_unfounded=False)}
        assert fitting_only == {m.handles for m in oracle_enumerate(program)}


# -- gl_check -----------------------------------------------------------------------

def test_gl_check_examples():
    assert gl_check(TWO_CYCLE, [p])
    assert not gl_check(TWO_CYCLE, [p, q])
    assert not gl_check(SELF_NEG, [])


def test_gl_check_unknown_atom_fails():
    assert not gl_check(TWO_CYCLE, [Atom("nope")])


def test_gl_check_equals_two_valued_phi_fixpoint():
    rng = Random(6005)
    for _ in range(50):
        clauses = random_ground_clauses(rng, max_atoms=7, max_clauses=14)
        program = ResidualProgram.from_clauses(clauses)
        universe = frozenset(program_atoms(clauses))
        atoms, comp = compile_bits(clauses)
        for mask in range(1 << len(atoms)):
            subset = mask_to_atoms(atoms, mask)
            two_valued = PartialInterpretation(subset, universe - subset)
            assert gl_check(program, subset) == (phi(clauses, two_valued) == two_valued)


# -- oracle ------------------------------------------------------------------------

def test_oracle_two_cycle():
    assert sorted(names(m) for m in oracle_enumerate(TWO_CYCLE)) == [["p"], ["q"]]


def test_oracle_empty_program():
    models = oracle_enumerate(ResidualProgram.from_clauses(()))
    assert [m.true_atoms for m in models] == [frozenset()]


def test_oracle_self_negation_no_models():
    assert oracle_enumerate(SELF_NEG) == []


def test_oracle_budget():
    big = ResidualProgram.from_clauses(
        [Clause(Atom(f"x{i}")) for i in range(25)])
    with pytest.raises(OracleBudgetError):
        oracle_enumerate(big)
    small = ResidualProgram.from_clauses(
        [Clause(Atom(f"x{i}")) for i in range(6)])
    with pytest.raises(OracleBudgetError):
        oracle_enumerate(small, budget=5)
    assert len(oracle_enumerate(small, budget=6)) == 1


def test_oracle_agrees_with_independent_bits_reference():
    rng = Random(6006)
    for _ in range(60):
        clauses = random_ground_clauses(rng, max_atoms=8, max_clauses=16)
        program = ResidualProgram.from_clauses(clauses)
        atoms, comp = compile_bits(clauses)
        reference = {mask_to_atoms(atoms, m) for m in stable_models_bits(comp, len(atoms))}
        assert {m.true_atoms for m in oracle_enumerate(program)} == reference


# -- filters --------------------------------------------------------------------------

def test_models_where_true_examples():
    assert [names(m) for m in models_where_true(TWO_CYCLE, p)] == [["p"]]
    assert [names(m) for m in models_where_true(TWO_CYCLE, q)] == [["q"]]
    assert list(models_where_true(NO_MODEL_RESIDUAL, Atom("q", (Constant("a"),)))) == []


def test_models_where_true_unknown_atom_empty():
    assert list(models_where_true(TWO_CYCLE, Atom("zz"))) == []


def test_true_in_all_examples():
    assert true_in_all(TWO_CYCLE, p) == (False, False)
    single = res("q :- tnot(x).")
    assert true_in_all(single, q) == (True, False)
    verdict = true_in_all(NO_MODEL_RESIDUAL, Atom("q", (Constant("a"),)))
    assert verdict.holds is False
    assert verdict.no_models is True


# -- call consistency --------------------------------------------------------------------

def test_call_consistent_even_cycle():
    assert call_consistent(TWO_CYCLE)


def test_call_consistent_negative_self_loop():
    assert not call_consistent(SELF_NEG)


def test_call_consistent_constrained_cycle():
    assert not call_consistent(CONSTRAINED_CYCLE)


def test_call_consistent_positive_cycle_ok():
    assert call_consistent(res("p :- q.\nq :- p."))


def test_call_consistent_odd_cycle_through_three_atoms():
    assert not call_consistent(res("p :- tnot(q).\nq :- tnot(r).\nr :- tnot(p)."))


def test_call_consistent_mixed_even_cycle():
    # one negative edge and one positive edge: even count of negatives is 1 -> odd
    assert not call_consistent(res("p :- tnot(q).\nq :- p."))
    # two negative edges across a 3-cycle with one positive edge
    assert call_consistent(res("p :- tnot(q).\nq :- tnot(r).\nr :- p."))


def test_call_consistent_generated_programs_have_models():
    rng = Random(6007)
    for _ in range(30):
        program = ResidualProgram.from_clauses(layered_call_consistent_clauses(rng))
        assert call_consistent(program)
        assert next(iter(enumerate_stable(program)), None) is not None
