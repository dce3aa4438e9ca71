"""Well-founded evaluation of ground normal programs.

The pipeline here is the classic three-valued one: replace negative
premises by truth constants relative to a partial interpretation
(`quotient`), take the least partial model of the resulting non-negative
program (`lpm`, computed as two monotone closures), and iterate the
composition (`phi`) from the empty interpretation up to its least fixpoint
(`wfm`).  `residual` then projects a ground program onto its undefined
atoms, resolving away everything the well-founded model already decides.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, Union

from . import parser
from .grounder import GroundRelevantProgram
from .terms import Atom, Clause, Literal


class TruthConstant(Enum):
    T = "t"
    U = "u"
    F = "f"


class TruthValue(Enum):
    TRUE = "true"
    FALSE = "false"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class PartialInterpretation:
    """Three-valued interpretation: true atoms, false atoms, rest undefined."""
    pos: frozenset[Atom] = frozenset()
    neg: frozenset[Atom] = frozenset()

    def __post_init__(self) -> None:
        if self.pos & self.neg:
            raise ValueError("inconsistent interpretation: pos and neg overlap")

    def is_total_over(self, universe: frozenset[Atom]) -> bool:
        return universe <= (self.pos | self.neg)


EMPTY_INTERPRETATION = PartialInterpretation()

BodyElement = Union[Atom, TruthConstant]


@dataclass(frozen=True)
class NNClause:
    head: Atom
    body: tuple[BodyElement, ...]


@dataclass(frozen=True)
class NonNegativeProgram:
    clauses: tuple[NNClause, ...]
    universe: frozenset[Atom]


GroundProgramLike = Union[GroundRelevantProgram, Sequence[Clause]]


def ground_clauses(p: GroundProgramLike) -> tuple[Clause, ...]:
    if isinstance(p, GroundRelevantProgram):
        return p.clauses
    return tuple(p)


def program_atoms(p: GroundProgramLike) -> list[Atom]:
    """Atom universe in first-appearance order, heads before bodies."""
    seen: dict[Atom, None] = {}
    for clause in ground_clauses(p):
        seen.setdefault(clause.head)
        for lit in clause.body:
            seen.setdefault(lit.atom)
    return list(seen)


def quotient(p: GroundProgramLike, i: PartialInterpretation) -> NonNegativeProgram:
    """Replace each tnot(C) by t / u / f according to C's value in i."""
    clauses = []
    for clause in ground_clauses(p):
        body: list[BodyElement] = []
        for lit in clause.body:
            if lit.positive:
                body.append(lit.atom)
            elif lit.atom in i.neg:
                body.append(TruthConstant.T)
            elif lit.atom in i.pos:
                body.append(TruthConstant.F)
            else:
                body.append(TruthConstant.U)
        clauses.append(NNClause(clause.head, tuple(body)))
    return NonNegativeProgram(tuple(clauses), frozenset(program_atoms(p)))


def t3p_step(p: NonNegativeProgram, i: PartialInterpretation) -> PartialInterpretation:
    """One application of the three-valued immediate consequence operator."""
    pos = set()
    for clause in p.clauses:
        if all(b is TruthConstant.T or (isinstance(b, Atom) and b in i.pos)
               for b in clause.body):
            pos.add(clause.head)

    refuted = set()
    by_head: dict[Atom, list[NNClause]] = {}
    for clause in p.clauses:
        by_head.setdefault(clause.head, []).append(clause)
    for atom in p.universe:
        defs = by_head.get(atom, [])
        if all(any(b is TruthConstant.F or (isinstance(b, Atom) and b in i.neg)
                   for b in clause.body)
               for clause in defs):
            refuted.add(atom)

    return PartialInterpretation(frozenset(pos), frozenset(refuted))


def _closure(p: NonNegativeProgram, optimistic: bool) -> frozenset[Atom]:
    """Least fixpoint of positive derivation.  In optimistic mode the
    undefined constant counts as satisfied; in strict mode it blocks."""
    derived: set[Atom] = set()
    changed = True
    while changed:
        changed = False
        for clause in p.clauses:
            if clause.head in derived:
                continue
            ok = True
            for b in clause.body:
                if b is TruthConstant.T:
                    continue
                if b is TruthConstant.U:
                    if optimistic:
                        continue
                    ok = False
                    break
                if b is TruthConstant.F:
                    ok = False
                    break
                if b not in derived:
                    ok = False
                    break
            if ok:
                derived.add(clause.head)
                changed = True
    return frozenset(derived)


def lpm(p: NonNegativeProgram) -> PartialInterpretation:
    """Least partial model of a non-negative program.

    True atoms are the strict positive closure; false atoms are everything
    the optimistic closure (undefined treated as satisfied) cannot derive.
    The result is the truth-ordering-least fixpoint of t3p_step.
    """
    pos = _closure(p, optimistic=False)
    optimistic = _closure(p, optimistic=True)
    return PartialInterpretation(pos, p.universe - optimistic)


def phi(p: GroundProgramLike, i: PartialInterpretation) -> PartialInterpretation:
    return lpm(quotient(p, i))


def wfm(p: GroundProgramLike) -> PartialInterpretation:
    """Well-founded model: iterate phi from empty up to its least fixpoint."""
    current = EMPTY_INTERPRETATION
    while True:
        nxt = phi(p, current)
        if nxt == current:
            return current
        current = nxt


def atom_truth(w: PartialInterpretation, universe: frozenset[Atom],
               atom: Atom) -> TruthValue:
    if atom in w.pos:
        return TruthValue.TRUE
    if atom in w.neg or atom not in universe:
        return TruthValue.FALSE
    return TruthValue.UNDEFINED


def literal_truth(w: PartialInterpretation, universe: frozenset[Atom],
                  lit: Literal) -> TruthValue:
    value = atom_truth(w, universe, lit.atom)
    if lit.positive:
        return value
    if value is TruthValue.TRUE:
        return TruthValue.FALSE
    if value is TruthValue.FALSE:
        return TruthValue.TRUE
    return TruthValue.UNDEFINED


def conjunction_truth(values: Iterable[TruthValue]) -> TruthValue:
    out = TruthValue.TRUE
    for value in values:
        if value is TruthValue.FALSE:
            return TruthValue.FALSE
        if value is TruthValue.UNDEFINED:
            out = TruthValue.UNDEFINED
    return out


def truth_value(p: GroundProgramLike, atom: Atom) -> TruthValue:
    """Classify an atom by the well-founded model.  Atoms outside the
    relevant universe are false (closed world over the relevant atoms)."""
    return atom_truth(wfm(p), frozenset(program_atoms(p)), atom)


# ---------------------------------------------------------------------------
# Residual program

class AtomTable:
    """Bijection between ground atoms and integer handles, 1-based."""

    def __init__(self, atoms: Iterable[Atom]):
        self._by_atom: dict[Atom, int] = {}
        for atom in atoms:
            self._by_atom.setdefault(atom, len(self._by_atom) + 1)
        self._by_handle = {h: a for a, h in self._by_atom.items()}

    def __len__(self) -> int:
        return len(self._by_atom)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, AtomTable) and self._by_atom == other._by_atom

    def handle_of(self, atom: Atom) -> int | None:
        return self._by_atom.get(atom)

    def atom_of(self, handle: int) -> Atom | None:
        return self._by_handle.get(handle)

    def pairs(self) -> list[tuple[Atom, int]]:
        """All (atom, handle) pairs in ascending handle order."""
        return [(a, h) for h, a in sorted(self._by_handle.items())]

    def handles(self) -> range:
        return range(1, len(self._by_atom) + 1)


@dataclass(frozen=True, eq=False)
class ResidualProgram:
    clauses: tuple[Clause, ...]
    undefined_atoms: frozenset[Atom]
    atom_table: AtomTable

    @classmethod
    def from_clauses(cls, clauses: Iterable[Clause]) -> "ResidualProgram":
        clauses = tuple(clauses)
        table = AtomTable(_first_appearance(clauses))
        return cls(clauses, frozenset(a for a, _ in table.pairs()), table)

    def numeric_clauses(self) -> tuple[tuple[int, tuple[int, ...], tuple[int, ...]], ...]:
        """(head handle, positive body handles, negative body handles)."""
        out = []
        for clause in self.clauses:
            pos = tuple(self.atom_table.handle_of(l.atom)
                        for l in clause.body if l.positive)
            neg = tuple(self.atom_table.handle_of(l.atom)
                        for l in clause.body if not l.positive)
            out.append((self.atom_table.handle_of(clause.head), pos, neg))
        return tuple(out)

    def lines(self) -> list[str]:
        """One clause per line, tnot syntax."""
        return [parser.format_clause(c) for c in self.clauses]


def _first_appearance(clauses: Iterable[Clause]) -> list[Atom]:
    seen: dict[Atom, None] = {}
    for clause in clauses:
        seen.setdefault(clause.head)
        for lit in clause.body:
            seen.setdefault(lit.atom)
    return list(seen)


def residual(p: GroundProgramLike, w: PartialInterpretation,
             roots: Iterable[Atom] | None = None) -> ResidualProgram:
    """Project p onto its undefined atoms.

    Clauses with heads decided by w disappear; bodies lose their true
    literals; clauses with false body literals are dropped; duplicates are
    collapsed.  The result is ordered by a traversal from `roots` (the
    recorded query answers by default) so the queried atom's clauses come
    first and handle numbering follows first appearance.
    """
    clauses = ground_clauses(p)
    universe = frozenset(program_atoms(p))
    undefined = universe - w.pos - w.neg

    reduced: dict[Atom, dict[Clause, None]] = {}
    for clause in clauses:
        if clause.head not in undefined:
            continue
        body: list[Literal] = []
        dropped = False
        for lit in clause.body:
            value = literal_truth(w, universe, lit)
            if value is TruthValue.TRUE:
                continue
            if value is TruthValue.FALSE:
                dropped = True
                break
            body.append(lit)
        if dropped:
            continue
        reduced.setdefault(clause.head, {}).setdefault(Clause(clause.head, tuple(body)))

    if roots is None:
        if isinstance(p, GroundRelevantProgram) and p.answers:
            roots = [lit.atom for ans in p.answers for lit in ans.literals]
        else:
            roots = [clause.head for clause in clauses]

    queue = []
    visited: set[Atom] = set()
    for atom in roots:
        if atom in undefined and atom not in visited:
            visited.add(atom)
            queue.append(atom)

    out: list[Clause] = []
    while queue:
        atom = queue.pop(0)
        for clause in reduced.get(atom, {}):
            out.append(clause)
            for lit in clause.body:
                if lit.atom in undefined and lit.atom not in visited:
                    visited.add(lit.atom)
                    queue.append(lit.atom)

    return ResidualProgram.from_clauses(out)


def residual_text(r: ResidualProgram) -> str:
    return "\n".join(r.lines())
