from __future__ import annotations

import pytest

from xnmr.parser import format_clause, load_program, parse_query
from xnmr.session import NoCurrentModelError, Session, answer_holds_in
from xnmr.stable import enumerate_stable
from xnmr.terms import Atom, Constant
from xnmr.wfs import TruthValue

TWO_CYCLE = "p :- tnot(q).\nq :- tnot(p)."
RESIDUAL_DEMO = """
p(X) :- s(X), tnot(r(X)), tnot(q(X)).
q(X) :- s(X), tnot(p(X)), t(X).
q(X) :- u(X).
s(X) :- t(X).
u(a) :- tnot(u(a)).
t(a).
t(b).
r(c).
"""


def ca(name):
    return Atom(name, (Constant("a"),))


def two_cycle_session():
    s = Session(load_program(TWO_CYCLE))
    s.init_stable(parse_query("p."))
    return s


def demo_session():
    s = Session(load_program(RESIDUAL_DEMO))
    s.init_stable(parse_query("q(a)."))
    return s


# -- init_stable -----------------------------------------------------------

def test_init_stable_two_cycle():
    s = two_cycle_session()
    assert s.answer_count() == 1
    assert len(s.current_answer().residual.clauses) == 2


def test_init_stable_residual_demo():
    s = demo_session()
    assert s.answer_count() == 1
    assert len(s.current_answer().residual.clauses) == 4


def test_init_stable_true_query_empty_residual():
    s = Session(load_program("t(a)."))
    assert s.init_stable(parse_query("t(a).")) == 1
    answer = s.current_answer()
    assert answer.truth is TruthValue.TRUE
    assert answer.residual.clauses == ()
    assert answer.delay_lists == ()


def test_init_stable_false_query_has_no_answers():
    s = Session(load_program("t(a)."))
    assert s.init_stable(parse_query("t(b).")) == 0
    assert s.next_stable_model() is None


def test_delay_lists_residual_demo():
    from xnmr.parser import format_literal
    lists = demo_session().current_answer().delay_lists
    rendered = [[format_literal(lit) for lit in dl] for dl in lists]
    assert rendered == [["tnot(p(a))"], ["u(a)"]]


# -- atom_handle -------------------------------------------------------------

def test_atom_handle_first_appearance_numbering():
    s = demo_session()
    assert s.atom_handle(atom=ca("q")) == [(ca("q"), 1)]


def test_atom_handle_enumerates_all_pairs():
    s = demo_session()
    assert s.atom_handle() == [(ca("q"), 1), (ca("p"), 2), (ca("u"), 3)]


def test_atom_handle_unknown_is_empty():
    s = demo_session()
    assert s.atom_handle(atom=Atom("nonexistent")) == []
    assert s.atom_handle(handle=99) == []


def test_atom_handle_reverse_lookup():
    s = demo_session()
    assert s.atom_handle(handle=2) == [(ca("p"), 2)]
    assert s.atom_handle(atom=ca("p"), handle=2) == [(ca("p"), 2)]
    assert s.atom_handle(atom=ca("p"), handle=1) == []


# -- model cursor ----------------------------------------------------------------

def test_next_stable_model_two_cycle_sequence():
    s = two_cycle_session()
    first = s.next_stable_model()
    assert {a.predicate for a in first.true_atoms} == {"q"}
    second = s.next_stable_model()
    assert {a.predicate for a in second.true_atoms} == {"p"}
    assert s.next_stable_model() is None
    assert s.next_stable_model() is None  # stays exhausted


def test_next_stable_model_no_models_immediately_absent():
    s = demo_session()
    assert s.next_stable_model() is None
    assert s.next_stable_model() is None


def test_next_stable_model_empty_residual():
    s = Session(load_program("t(a)."))
    s.init_stable(parse_query("t(a)."))
    model = s.next_stable_model()
    assert model is not None and model.true_atoms == frozenset()
    assert s.current_model_atoms() == []
    assert s.next_stable_model() is None


def test_current_model_atoms_two_cycle():
    s = two_cycle_session()
    s.next_stable_model()
    assert s.current_model_atoms() == [Atom("q")]


def test_current_model_without_next_raises():
    s = two_cycle_session()
    with pytest.raises(NoCurrentModelError):
        s.current_model_atoms()
    with pytest.raises(NoCurrentModelError):
        s.in_current_model(1)


def test_in_current_model():
    s = two_cycle_session()
    s.next_stable_model()  # {q}
    handle_q = s.atom_handle(atom=Atom("q"))[0][1]
    handle_p = s.atom_handle(atom=Atom("p"))[0][1]
    assert s.in_current_model(handle_q)
    assert not s.in_current_model(handle_p)
    assert not s.in_current_model(42)


def test_reinit_resets_cursor():
    s = two_cycle_session()
    while s.next_stable_model() is not None:
        pass
    s.init_stable(parse_query("p."))
    assert s.next_stable_model() is not None


# -- determinism -------------------------------------------------------------------

def test_full_determinism_across_sessions():
    runs = []
    for _ in range(2):
        s = Session(load_program(RESIDUAL_DEMO))
        s.init_stable(parse_query("q(a)."))
        models = []
        while True:
            m = s.next_stable_model()
            if m is None:
                break
            models.append(m.handles)
        runs.append((
            [format_clause(c) for c in s.current_answer().residual.clauses],
            s.atom_handle(),
            models,
        ))
    assert runs[0] == runs[1]


def test_cursor_exhaustion_matches_enumerate_stable():
    s = two_cycle_session()
    expected = [m.handles for m in enumerate_stable(s.current_answer().residual)]
    got = []
    while True:
        m = s.next_stable_model()
        if m is None:
            break
        got.append(m.handles)
    assert got == expected


# -- multiple answers ------------------------------------------------------------------

MULTI = """
p(X) :- t(X), tnot(s(X)).
s(X) :- t(X), tnot(p(X)).
t(a).
t(b).
"""


def test_multi_answer_query_keeps_residuals_separate():
    s = Session(load_program(MULTI))
    count = s.init_stable(parse_query("p(X)."))
    assert count == 2
    first_atoms = {atom for atom, _ in s.atom_handle()}
    assert first_atoms == {ca("p"), ca("s")}

    s.select_answer(1)
    cb = Constant("b")
    assert {atom for atom, _ in s.atom_handle()} == \
        {Atom("p", (cb,)), Atom("s", (cb,))}
    model = s.next_stable_model()
    assert model.true_atoms in ({Atom("s", (cb,))}, {Atom("p", (cb,))})


def test_select_answer_resets_cursor():
    s = Session(load_program(MULTI))
    s.init_stable(parse_query("p(X)."))
    first = s.next_stable_model()
    s.select_answer(0)
    assert s.next_stable_model() == first


def test_select_answer_out_of_range():
    s = two_cycle_session()
    with pytest.raises(IndexError):
        s.select_answer(3)


def test_answer_holds_in():
    s = two_cycle_session()
    answer = s.current_answer()
    holds = [answer_holds_in(answer, m)
             for m in enumerate_stable(answer.residual)]
    assert holds == [False, True]  # {q} then {p}; query was p
