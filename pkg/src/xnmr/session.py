"""Programmatic interface: bind a query to its residual program and walk
stable models through a cursor.

A Session owns one loaded program, a skolem counter, and the state left
behind by the last `init_stable` call: one record per well-founded answer
(true or undefined; false instances are not answers), each with its own
residual program and handle table.  The model cursor enumerates stable
models of the selected answer's residual lazily and stays exhausted until
the next `init_stable` or `select_answer`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .grounder import DEFAULT_BUDGET, ground_relevant
from .stable import StableModel, enumerate_stable
from .terms import Atom, Literal, Program, SkolemCounter, Substitution
from .wfs import (
    PartialInterpretation,
    ResidualProgram,
    TruthValue,
    conjunction_truth,
    literal_truth,
    program_atoms,
    residual,
    wfm,
)


class NoCurrentModelError(Exception):
    """A model operation was called before any model was produced."""


@dataclass(frozen=True)
class Answer:
    """One non-false answer of the current query."""
    substitution: Substitution
    literals: tuple[Literal, ...]
    literal_truths: tuple[TruthValue, ...]
    truth: TruthValue
    residual: ResidualProgram
    delay_lists: tuple[tuple[Literal, ...], ...]


def answer_holds_in(answer: Answer, model: StableModel) -> bool:
    """Whether the answer's instantiated query is true in a stable model of
    its residual (well-founded-true literals hold implicitly)."""
    for lit, truth in zip(answer.literals, answer.literal_truths):
        if truth is TruthValue.TRUE:
            continue
        in_model = lit.atom in model.true_atoms
        if lit.positive != in_model:
            return False
    return True


class Session:
    def __init__(self, program: Program | None = None,
                 budget: int = DEFAULT_BUDGET):
        self.program = program or Program()
        self.budget = budget
        self.skolems = SkolemCounter()
        self.answers: list[Answer] = []
        self.well_founded: PartialInterpretation | None = None
        self._answer_index = 0
        self._iterator = None
        self._current: StableModel | None = None
        self._exhausted = False

    # -- setup --------------------------------------------------------------

    def set_program(self, program: Program) -> None:
        """Replace the loaded program and drop all query state."""
        self.program = program
        self.answers = []
        self.well_founded = None
        self._reset_cursor()

    def _reset_cursor(self) -> None:
        self._iterator = None
        self._current = None
        self._exhausted = False

    # -- query binding --------------------------------------------------------

    def init_stable(self, query: Sequence[Literal]) -> int:
        """Ground, evaluate and extract residuals for `query`.

        Returns the number of answers (true or undefined instances).
        Floundering and budget errors propagate.
        """
        query = tuple(query)
        gp = ground_relevant(self.program, query, self.budget, self.skolems)
        w = wfm(gp)
        universe = frozenset(program_atoms(gp))

        answers: list[Answer] = []
        for qa in gp.answers:
            truths = tuple(literal_truth(w, universe, lit) for lit in qa.literals)
            truth = conjunction_truth(truths)
            if truth is TruthValue.FALSE:
                continue
            if truth is TruthValue.TRUE:
                res = ResidualProgram.from_clauses(())
                delay_lists: tuple[tuple[Literal, ...], ...] = ()
            else:
                roots = [lit.atom for lit in qa.literals]
                res = residual(gp, w, roots=roots)
                delay_lists = self._delay_lists(qa.literals, truths, res)
            answers.append(Answer(qa.substitution, qa.literals, truths,
                                  truth, res, delay_lists))

        self.answers = answers
        self.well_founded = w
        self._answer_index = 0
        self._reset_cursor()
        return len(answers)

    @staticmethod
    def _delay_lists(literals: tuple[Literal, ...],
                     truths: tuple[TruthValue, ...],
                     res: ResidualProgram) -> tuple[tuple[Literal, ...], ...]:
        """Delay lists shown for an undefined answer: the reduced bodies of
        the answer atom's residual clauses, or for conjunctions the reduced
        conjunction itself."""
        if len(literals) == 1 and literals[0].positive:
            atom = literals[0].atom
            lists = tuple(c.body for c in res.clauses if c.head == atom)
            if lists:
                return lists
        return (tuple(l for l, t in zip(literals, truths)
                      if t is TruthValue.UNDEFINED),)

    # -- answers and handles ---------------------------------------------------

    def answer_count(self) -> int:
        return len(self.answers)

    def current_answer(self) -> Answer:
        return self.answers[self._answer_index]

    def select_answer(self, index: int) -> Answer:
        """Point the cursor at one answer's residual; resets enumeration."""
        if not 0 <= index < len(self.answers):
            raise IndexError(f"no answer with index {index}")
        self._answer_index = index
        self._reset_cursor()
        return self.answers[index]

    def atom_handle(self, atom: Atom | None = None,
                    handle: int | None = None) -> list[tuple[Atom, int]]:
        """Bidirectional atom/handle lookup on the current residual.
        Enumerates every pair when both arguments are omitted; unknown
        atoms or handles give an empty result."""
        if not self.answers:
            return []
        table = self.current_answer().residual.atom_table
        if atom is None and handle is None:
            return table.pairs()
        if atom is not None:
            found = table.handle_of(atom)
            if found is None or (handle is not None and handle != found):
                return []
            return [(atom, found)]
        looked_up = table.atom_of(handle)
        return [] if looked_up is None else [(looked_up, handle)]

    # -- model cursor ------------------------------------------------------------

    def next_stable_model(self) -> StableModel | None:
        """Advance to the next stable model of the selected residual, or
        None once exhausted (and on every later call until re-init)."""
        if self._exhausted or not self.answers:
            return None
        if self._iterator is None:
            self._iterator = enumerate_stable(self.current_answer().residual)
        try:
            self._current = next(self._iterator)
        except StopIteration:
            self._current = None
            self._exhausted = True
            return None
        return self._current

    def current_model_atoms(self) -> list[Atom]:
        """Atoms of the current model in ascending handle order."""
        if self._current is None:
            raise NoCurrentModelError("no stable model is current")
        return self._current.atoms_by_handle(self.current_answer().residual)

    def in_current_model(self, handle: int) -> bool:
        if self._current is None:
            raise NoCurrentModelError("no stable model is current")
        return handle in self._current.handles
