"""Stable-model enumeration over residual programs.

Search is a depth-first, backtracking enumeration over the residual's
atom handles: propagate deterministic consequences, branch on the lowest
unassigned handle trying false first, and verify every total assignment
with the Gelfond-Lifschitz reduct before emitting it.  Propagation is
purely a pruning step; correctness rests on the final reduct check.

A brute-force oracle (`oracle_enumerate`) checks all subsets and serves
as the independent reference for the search engine.  Internally atoms are
handled as bit positions (handle h -> bit h-1), which keeps the oracle's
2^n sweep cheap.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Union

from .terms import Atom
from .wfs import ResidualProgram

ORACLE_BUDGET = 20


@dataclass(frozen=True)
class StableModel:
    true_atoms: frozenset[Atom]
    handles: frozenset[int]

    def atoms_by_handle(self, r: ResidualProgram) -> list[Atom]:
        return [r.atom_table.atom_of(h) for h in sorted(self.handles)]


@dataclass(frozen=True)
class Assignment:
    forced_true: frozenset[int] = frozenset()
    forced_false: frozenset[int] = frozenset()

    def assigned(self) -> frozenset[int]:
        return self.forced_true | self.forced_false


EMPTY_ASSIGNMENT = Assignment()


class TrueInAll(NamedTuple):
    holds: bool
    no_models: bool


class OracleBudgetError(Exception):
    pass


# Compiled clause form: (head bit, positive-body mask, negative-body mask).
_BitClause = tuple[int, int, int]


def _compiled(r: ResidualProgram) -> tuple[int, list[_BitClause]]:
    clauses = []
    for head, pos, neg in r.numeric_clauses():
        pos_mask = 0
        for p in pos:
            pos_mask |= 1 << (p - 1)
        neg_mask = 0
        for q in neg:
            neg_mask |= 1 << (q - 1)
        clauses.append((1 << (head - 1), pos_mask, neg_mask))
    return len(r.atom_table), clauses


def _mask_of(handles: Iterable[int]) -> int:
    mask = 0
    for h in handles:
        mask |= 1 << (h - 1)
    return mask


def _handles_of(mask: int) -> frozenset[int]:
    out = set()
    h = 1
    while mask:
        if mask & 1:
            out.add(h)
        mask >>= 1
        h += 1
    return frozenset(out)


def _model(r: ResidualProgram, mask: int) -> StableModel:
    handles = _handles_of(mask)
    return StableModel(frozenset(r.atom_table.atom_of(h) for h in handles), handles)


def _propagate_masks(n: int, clauses: list[_BitClause], tmask: int, fmask: int,
                     use_unfounded: bool) -> tuple[int, int] | None:
    all_mask = (1 << n) - 1
    while True:
        start = (tmask, fmask)

        for head, pos, neg in clauses:
            if pos & ~tmask == 0 and neg & ~fmask == 0:
                tmask |= head

        supported = 0
        for head, pos, neg in clauses:
            if not (pos & fmask or neg & tmask):
                supported |= head
        fmask |= all_mask & ~supported

        if use_unfounded:
            derivable = 0
            growing = True
            while growing:
                growing = False
                for head, pos, neg in clauses:
                    if head & ~derivable and pos & ~derivable == 0 and not neg & tmask:
                        derivable |= head
                        growing = True
            fmask |= all_mask & ~derivable

        if tmask & fmask:
            return None
        if (tmask, fmask) == start:
            return tmask, fmask


def propagate(r: ResidualProgram, a: Assignment,
              use_unfounded: bool = True) -> Assignment | None:
    """Deterministic closure of an assignment, or None on conflict.

    Repeats until stable: satisfied bodies force their heads true; atoms
    whose every clause is contradicted become false; and, unless disabled,
    atoms outside the optimistic positive closure (negations evaluated
    against forced_true only) become false as an unfounded set.
    """
    n, clauses = _compiled(r)
    result = _propagate_masks(n, clauses, _mask_of(a.forced_true),
                              _mask_of(a.forced_false), use_unfounded)
    if result is None:
        return None
    tmask, fmask = result
    return Assignment(_handles_of(tmask), _handles_of(fmask))


def _reduct_least_model(clauses: list[_BitClause], m: int) -> int:
    kept = [(head, pos) for head, pos, neg in clauses if not neg & m]
    derived = 0
    changed = True
    while changed:
        changed = False
        for head, pos in kept:
            if head & ~derived and pos & ~derived == 0:
                derived |= head
                changed = True
    return derived


def gl_check(r: ResidualProgram, m: Iterable[Union[Atom, int]]) -> bool:
    """True iff m equals the least model of its Gelfond-Lifschitz reduct."""
    mask = 0
    for x in m:
        if isinstance(x, int):
            h = x if r.atom_table.atom_of(x) is not None else None
        else:
            h = r.atom_table.handle_of(x)
        if h is None:
            return False
        mask |= 1 << (h - 1)
    _, clauses = _compiled(r)
    return _reduct_least_model(clauses, mask) == mask


def enumerate_stable(r: ResidualProgram,
                     use_unfounded: bool = True) -> Iterator[StableModel]:
    """All stable models, lazily, in the order fixed by handle numbering
    and false-first branching.  Each model is emitted exactly once."""
    n, clauses = _compiled(r)
    all_mask = (1 << n) - 1

    def search(tmask: int, fmask: int) -> Iterator[StableModel]:
        propagated = _propagate_masks(n, clauses, tmask, fmask, use_unfounded)
        if propagated is None:
            return
        tmask, fmask = propagated
        free = all_mask & ~(tmask | fmask)
        if not free:
            if _reduct_least_model(clauses, tmask) == tmask:
                yield _model(r, tmask)
            return
        pick = free & -free  # lowest unassigned handle
        yield from search(tmask, fmask | pick)
        yield from search(tmask | pick, fmask)

    return search(0, 0)


def oracle_enumerate(r: ResidualProgram,
                     budget: int = ORACLE_BUDGET) -> list[StableModel]:
    """Brute force every subset of the residual atoms through gl_check."""
    n, clauses = _compiled(r)
    if n > budget:
        raise OracleBudgetError(f"{n} atoms exceed the oracle budget of {budget}")
    return [_model(r, m) for m in range(1 << n)
            if _reduct_least_model(clauses, m) == m]


def models_where_true(r: ResidualProgram, atom: Atom) -> Iterator[StableModel]:
    """Stable models containing `atom`, in enumeration order."""
    handle = r.atom_table.handle_of(atom)
    if handle is None:
        return
    for model in enumerate_stable(r):
        if handle in model.handles:
            yield model


def true_in_all(r: ResidualProgram, atom: Atom) -> TrueInAll:
    """Whether `atom` holds in every stable model; the zero-model case is
    reported as false with a distinct flag rather than vacuous truth."""
    handle = r.atom_table.handle_of(atom)
    any_model = False
    for model in enumerate_stable(r):
        any_model = True
        if handle not in model.handles:
            return TrueInAll(False, False)
    if not any_model:
        return TrueInAll(False, True)
    return TrueInAll(True, False)


def call_consistent(r: ResidualProgram) -> bool:
    """No cycle of the ground dependency graph carries an odd number of
    negative edges.

    Checked on the parity-doubled graph: node (atom, parity) with an edge
    flipping parity on negative dependencies; an odd cycle through an atom
    exists iff (a, odd) is reachable from (a, even).
    """
    n = len(r.atom_table)
    edges: dict[int, set[tuple[int, int]]] = {h: set() for h in range(1, n + 1)}
    for head, pos, neg in r.numeric_clauses():
        for p in pos:
            edges[head].add((p, 0))
        for q in neg:
            edges[head].add((q, 1))

    for start in range(1, n + 1):
        seen = {(start, 0)}
        frontier = deque([(start, 0)])
        while frontier:
            atom, parity = frontier.popleft()
            for target, flip in edges[atom]:
                node = (target, parity ^ flip)
                if node not in seen:
                    seen.add(node)
                    frontier.append(node)
        if (start, 1) in seen:
            return False
    return True
