"""Query-driven relevance grounding.

From a program and a query this produces the finite ground subprogram the
query can reach under tabled, left-to-right resolution.  Positive subgoals
are memoized in a variant-based call table and consume recorded answers;
the whole evaluation is iterated to a fixpoint so answers discovered late
still feed earlier consumers.  Negative subgoals must be ground when
selected (otherwise they flounder); they spawn the negated atom as a fresh
sub-query and are then treated as unconditionally satisfiable, leaving
their truth to the well-founded evaluation downstream.

Clause instances whose bodies succeed are emitted fully instantiated;
variables that survive (the body never bound them) are skolemized to fresh
reserved constants, consistently within one instance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .parser import format_literal
from .terms import (
    Atom,
    Clause,
    EMPTY_SUBST,
    Literal,
    Program,
    SkolemCounter,
    Substitution,
    Term,
    apply,
    is_ground,
    rename,
    skolemize_into,
    unify,
    variables,
    variant_key,
)

DEFAULT_BUDGET = 1_000_000
FULL_GROUND_BUDGET = 200_000


class FlounderingError(Exception):
    """A negative literal was selected with an unbound variable."""

    def __init__(self, literal: Literal):
        self.literal = literal
        super().__init__(f"floundering: selected nonground negative literal "
                         f"{format_literal(literal)}")


class BudgetExceededError(Exception):
    def __init__(self, steps: int, budget: int):
        self.steps = steps
        self.budget = budget
        super().__init__(f"resource limit: {steps} resolution steps exceed "
                         f"the budget of {budget}")


@dataclass(frozen=True)
class QueryAnswer:
    """One solution of the query: a grounding substitution for its
    variables plus the instantiated (skolem-ground) query literals."""
    substitution: Substitution
    literals: tuple[Literal, ...]


@dataclass(frozen=True)
class GroundRelevantProgram:
    clauses: tuple[Clause, ...]
    relevant_atoms: frozenset[Atom]
    answers: tuple[QueryAnswer, ...] = ()


class CallRecord:
    """One tabled call: the stored pattern and its ground answers."""

    __slots__ = ("atom", "answers", "_answer_set")

    def __init__(self, atom: Atom):
        self.atom = atom
        self.answers: list[Atom] = []
        self._answer_set: set[Atom] = set()

    def add_answer(self, answer: Atom) -> bool:
        if answer in self._answer_set:
            return False
        self._answer_set.add(answer)
        self.answers.append(answer)
        return True


class CallTable:
    """Variant-based call table: no two stored calls are variants."""

    def __init__(self):
        self._records: dict[object, CallRecord] = {}

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[CallRecord]:
        return iter(self._records.values())

    def lookup(self, atom: Atom) -> CallRecord | None:
        return self._records.get(variant_key(atom))

    def register(self, atom: Atom) -> CallRecord:
        key = variant_key(atom)
        rec = self._records.get(key)
        if rec is None:
            rec = CallRecord(atom)
            self._records[key] = rec
        return rec

    def records(self) -> list[CallRecord]:
        return list(self._records.values())


class _Grounding:
    def __init__(self, program: Program, budget: int, skolems: SkolemCounter):
        self.program = program
        self.budget = budget
        self.skolems = skolems
        self.table = CallTable()
        self.emitted: dict[object, Clause] = {}
        self.query_answers: dict[object, QueryAnswer] = {}
        self.steps = 0
        self.changed = False

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetExceededError(self.steps, self.budget)

    def ensure_call(self, atom: Atom) -> CallRecord:
        rec = self.table.lookup(atom)
        if rec is None:
            rec = self.table.register(atom)
            self.changed = True
        return rec

    def solve(self, literals: Sequence[Literal], idx: int,
              subst: Substitution) -> Iterator[Substitution]:
        """Left-to-right resolution against current table answers."""
        if idx == len(literals):
            yield subst
            return
        lit = literals[idx]
        goal = apply(subst, lit.atom)
        if lit.positive:
            rec = self.ensure_call(goal)
            for answer in list(rec.answers):
                self.tick()
                extended = unify(goal, answer, subst)
                if extended is not None:
                    yield from self.solve(literals, idx + 1, extended)
        else:
            if not is_ground(goal):
                raise FlounderingError(Literal(goal, positive=False))
            self.ensure_call(goal)
            yield from self.solve(literals, idx + 1, subst)

    def expand(self, rec: CallRecord) -> None:
        for clause in self.program.clauses:
            if (clause.head.predicate != rec.atom.predicate
                    or clause.head.arity != rec.atom.arity):
                continue
            self.tick()
            renamed = rename(clause)
            subst = unify(renamed.head, rec.atom)
            if subst is None:
                continue
            for solution in self.solve(renamed.body, 0, subst):
                self.emit(apply(solution, renamed), rec)

    def emit(self, instance: Clause, rec: CallRecord) -> None:
        key = variant_key(instance)
        ground = self.emitted.get(key)
        if ground is None:
            ground = skolemize_into(instance, self.skolems, {})
            self.emitted[key] = ground
            self.changed = True
        if rec.add_answer(ground.head):
            self.changed = True

    def solve_query(self, query: Sequence[Literal]) -> None:
        qvars = variables(tuple(query))
        for solution in self.solve(query, 0, EMPTY_SUBST):
            instance = tuple(apply(solution, lit) for lit in query)
            key = variant_key(instance)
            if key in self.query_answers:
                continue
            smap: dict = {}
            ground_lits = skolemize_into(instance, self.skolems, smap)
            bindings = {
                v: skolemize_into(apply(solution, v), self.skolems, smap)
                for v in qvars
            }
            self.query_answers[key] = QueryAnswer(Substitution(bindings), ground_lits)
            self.changed = True

    def run(self, query: Sequence[Literal]) -> GroundRelevantProgram:
        while True:
            self.changed = False
            self.solve_query(query)
            for rec in self.table.records():
                self.expand(rec)
            if not self.changed:
                break
        clauses, answers = self.replay(query)
        return GroundRelevantProgram(
            clauses=clauses,
            relevant_atoms=frozenset(_atoms_of(clauses)),
            answers=answers,
        )

    def replay(self, query: Sequence[Literal]) -> tuple[tuple[Clause, ...],
                                                        tuple[QueryAnswer, ...]]:
        """Reorder emissions into left-to-right depth-first discovery order.

        The saturation rounds above compute the right clause and answer
        sets but interleave emissions across rounds.  With the tables
        complete, one recursive pass over the call graph (each call's
        clauses in program order, a callee visited before its answers are
        consumed) reconstructs the order a one-pass tabled search would
        have discovered them in."""
        ordered: dict[object, Clause] = {}
        ordered_answers: dict[object, QueryAnswer] = {}
        visited: set[object] = set()

        def visit(atom: Atom) -> None:
            key = variant_key(atom)
            if key in visited:
                return
            visited.add(key)
            rec = self.table.lookup(atom)
            if rec is None:
                return
            for clause in self.program.clauses:
                if (clause.head.predicate != rec.atom.predicate
                        or clause.head.arity != rec.atom.arity):
                    continue
                self.tick()
                renamed = rename(clause)
                subst = unify(renamed.head, rec.atom)
                if subst is None:
                    continue
                for solution in walk(renamed.body, 0, subst):
                    instance = apply(solution, renamed)
                    k = variant_key(instance)
                    ground = self.emitted.get(k)
                    if ground is None:
                        ground = skolemize_into(instance, self.skolems, {})
                        self.emitted[k] = ground
                    ordered.setdefault(k, ground)

        def walk(literals: Sequence[Literal], idx: int,
                 subst: Substitution) -> Iterator[Substitution]:
            if idx == len(literals):
                yield subst
                return
            lit = literals[idx]
            goal = apply(subst, lit.atom)
            visit(goal)
            if lit.positive:
                rec = self.table.lookup(goal)
                for answer in (rec.answers if rec else ()):
                    self.tick()
                    extended = unify(goal, answer, subst)
                    if extended is not None:
                        yield from walk(literals, idx + 1, extended)
            else:
                yield from walk(literals, idx + 1, subst)

        for solution in walk(list(query), 0, EMPTY_SUBST):
            instance = tuple(apply(solution, lit) for lit in query)
            key = variant_key(instance)
            known = self.query_answers.get(key)
            if known is not None:
                ordered_answers.setdefault(key, known)

        for key, clause in self.emitted.items():
            ordered.setdefault(key, clause)
        for key, answer in self.query_answers.items():
            ordered_answers.setdefault(key, answer)
        return tuple(ordered.values()), tuple(ordered_answers.values())


def _atoms_of(clauses: Iterable[Clause]) -> list[Atom]:
    seen: dict[Atom, None] = {}
    for clause in clauses:
        seen.setdefault(clause.head)
        for lit in clause.body:
            seen.setdefault(lit.atom)
    return list(seen)


def ground_relevant(program: Program, query: Sequence[Literal],
                    budget: int = DEFAULT_BUDGET,
                    skolems: SkolemCounter | None = None) -> GroundRelevantProgram:
    """Ground the part of `program` relevant to `query`.

    Raises FlounderingError on nonground negative selection and
    BudgetExceededError when the grounding does not stay within `budget`
    resolution steps (the language admits infinite relevant groundings).
    """
    if skolems is None:
        skolems = SkolemCounter()
    return _Grounding(program, budget, skolems).run(list(query))


def full_ground(program: Program, universe: Iterable[Term],
                budget: int = FULL_GROUND_BUDGET) -> GroundRelevantProgram:
    """Instantiate every clause over every combination of universe terms.

    Test-oracle support only: validates relevance grounding on programs
    whose full grounding is finite.
    """
    terms = list(universe)
    if not terms:
        raise ValueError("full_ground needs a nonempty universe")
    out: dict[Clause, None] = {}
    produced = 0
    for clause in program.clauses:
        cvars = variables(clause)
        for combo in itertools.product(terms, repeat=len(cvars)):
            produced += 1
            if produced > budget:
                raise BudgetExceededError(produced, budget)
            subst = Substitution(dict(zip(cvars, combo)))
            out.setdefault(apply(subst, clause))
    clauses = tuple(out)
    return GroundRelevantProgram(
        clauses=clauses,
        relevant_atoms=frozenset(_atoms_of(clauses)),
        answers=(),
    )
