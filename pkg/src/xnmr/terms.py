"""Terms, literals, clauses, substitutions and unification.

This is the syntactic substrate shared by the whole engine: immutable
first-order terms with `tnot`-negated literals, triangular substitutions
with an occurs-check, variant canonicalization for call tabling, and
skolemization of leftover variables into reserved `$sk<N>` constants.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

SKOLEM_PREFIX = "$sk"

# Fresh identities for renamed-apart variables.  Identities never appear in
# printed output; they only keep renamings distinct.
_fresh_ids = itertools.count(1)


@dataclass(frozen=True)
class Variable:
    name: str
    ident: int = 0


@dataclass(frozen=True)
class Constant:
    symbol: Union[str, int]


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple["Term", ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("compound terms need at least one argument")


Term = Union[Variable, Constant, Compound]

NIL = Constant("[]")


def cons(head: Term, tail: Term) -> Compound:
    return Compound(".", (head, tail))


def make_list(items: Iterable[Term], tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(list(items)):
        out = cons(item, out)
    return out


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)


@dataclass(frozen=True)
class Literal:
    atom: Atom
    positive: bool = True


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple[Literal, ...] = ()
    from_prelude: bool = False

    @property
    def is_fact(self) -> bool:
        return not self.body


@dataclass(frozen=True)
class Program:
    clauses: tuple[Clause, ...] = ()


Structure = Union[Term, Atom, Literal, Clause, tuple]


def fresh_variable(name: str = "_") -> Variable:
    return Variable(name, next(_fresh_ids))


def subterms(x: Structure) -> Iterator[Term]:
    """Left-to-right preorder walk over every Term inside x."""
    if isinstance(x, (Variable, Constant)):
        yield x
    elif isinstance(x, Compound):
        yield x
        for arg in x.args:
            yield from subterms(arg)
    elif isinstance(x, Atom):
        for arg in x.args:
            yield from subterms(arg)
    elif isinstance(x, Literal):
        yield from subterms(x.atom)
    elif isinstance(x, Clause):
        yield from subterms(x.head)
        for lit in x.body:
            yield from subterms(lit)
    elif isinstance(x, tuple):
        for item in x:
            yield from subterms(item)
    else:
        raise TypeError(f"cannot walk {x!r}")


def variables(x: Structure) -> list[Variable]:
    """Distinct variables of x in first-occurrence order."""
    seen: dict[Variable, None] = {}
    for t in subterms(x):
        if isinstance(t, Variable):
            seen.setdefault(t)
    return list(seen)


def is_ground(x: Structure) -> bool:
    return not any(isinstance(t, Variable) for t in subterms(x))


def constants(x: Structure) -> set[Constant]:
    return {t for t in subterms(x) if isinstance(t, Constant)}


class Substitution:
    """Immutable triangular binding store.

    Bindings may map variables to terms containing other bound variables;
    `apply` resolves chains all the way down, which keeps application
    idempotent as a function.  `bind` refuses bindings that fail the
    occurs-check.
    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings: dict[Variable, Term] | None = None):
        self._bindings = bindings or {}

    def __len__(self) -> int:
        return len(self._bindings)

    def __contains__(self, var: Variable) -> bool:
        return var in self._bindings

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Substitution) and self._bindings == other._bindings

    def __hash__(self) -> int:
        return hash(frozenset(self._bindings.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{v.name}->{t}" for v, t in self._bindings.items())
        return f"Substitution({inner})"

    def lookup(self, var: Variable) -> Term | None:
        return self._bindings.get(var)

    def items(self) -> Iterator[tuple[Variable, Term]]:
        return iter(self._bindings.items())

    def bind(self, var: Variable, term: Term) -> "Substitution | None":
        """Extend with var -> term, or None if the occurs-check fails."""
        term = walk(self, term)
        if isinstance(term, Variable) and term == var:
            return self
        if occurs(self, var, term):
            return None
        new = dict(self._bindings)
        new[var] = term
        return Substitution(new)


EMPTY_SUBST = Substitution()


def walk(s: Substitution, t: Term) -> Term:
    """Follow variable bindings until a non-variable or unbound variable."""
    while isinstance(t, Variable):
        bound = s.lookup(t)
        if bound is None:
            return t
        t = bound
    return t


def occurs(s: Substitution, var: Variable, t: Term) -> bool:
    t = walk(s, t)
    if isinstance(t, Variable):
        return t == var
    if isinstance(t, Compound):
        return any(occurs(s, var, arg) for arg in t.args)
    return False


def unify(a: Union[Term, Atom], b: Union[Term, Atom],
          s: Substitution | None = None) -> Substitution | None:
    """Most general unifier extending s, or None.  Occurs-check is on."""
    if s is None:
        s = EMPTY_SUBST
    if isinstance(a, Atom) or isinstance(b, Atom):
        if not (isinstance(a, Atom) and isinstance(b, Atom)):
            return None
        if a.predicate != b.predicate or a.arity != b.arity:
            return None
        return _unify_all(a.args, b.args, s)
    return _unify_terms(a, b, s)


def _unify_all(xs: tuple[Term, ...], ys: tuple[Term, ...],
               s: Substitution) -> Substitution | None:
    for x, y in zip(xs, ys):
        s = _unify_terms(x, y, s)
        if s is None:
            return None
    return s


def _unify_terms(a: Term, b: Term, s: Substitution) -> Substitution | None:
    a = walk(s, a)
    b = walk(s, b)
    if isinstance(a, Variable):
        return s.bind(a, b)
    if isinstance(b, Variable):
        return s.bind(b, a)
    if isinstance(a, Constant) and isinstance(b, Constant):
        return s if a.symbol == b.symbol else None
    if isinstance(a, Compound) and isinstance(b, Compound):
        if a.functor != b.functor or len(a.args) != len(b.args):
            return None
        return _unify_all(a.args, b.args, s)
    return None


def apply(s: Substitution, x: Structure) -> Structure:
    """Replace every bound variable in x, resolving binding chains fully."""
    if isinstance(x, Variable):
        t = walk(s, x)
        return t if isinstance(t, (Variable, Constant)) else apply(s, t)
    if isinstance(x, Constant):
        return x
    if isinstance(x, Compound):
        return Compound(x.functor, tuple(apply(s, a) for a in x.args))
    if isinstance(x, Atom):
        return Atom(x.predicate, tuple(apply(s, a) for a in x.args))
    if isinstance(x, Literal):
        return Literal(apply(s, x.atom), x.positive)
    if isinstance(x, Clause):
        return Clause(apply(s, x.head),
                      tuple(apply(s, lit) for lit in x.body),
                      x.from_prelude)
    if isinstance(x, tuple):
        return tuple(apply(s, item) for item in x)
    raise TypeError(f"cannot apply substitution to {x!r}")


def rename(x: Structure, mapping: dict[Variable, Variable] | None = None) -> Structure:
    """Rename apart: same structure with fresh but like-named variables."""
    if mapping is None:
        mapping = {}

    def go(y: Structure) -> Structure:
        if isinstance(y, Variable):
            if y not in mapping:
                mapping[y] = fresh_variable(y.name)
            return mapping[y]
        if isinstance(y, Constant):
            return y
        if isinstance(y, Compound):
            return Compound(y.functor, tuple(go(a) for a in y.args))
        if isinstance(y, Atom):
            return Atom(y.predicate, tuple(go(a) for a in y.args))
        if isinstance(y, Literal):
            return Literal(go(y.atom), y.positive)
        if isinstance(y, Clause):
            return Clause(go(y.head), tuple(go(l) for l in y.body), y.from_prelude)
        if isinstance(y, tuple):
            return tuple(go(item) for item in y)
        raise TypeError(f"cannot rename {y!r}")

    return go(x)


def variant_key(x: Structure) -> Structure:
    """Canonical form under variable renaming: variables numbered by first
    occurrence.  Two structures are variants iff their keys are equal."""
    numbering: dict[Variable, Variable] = {}

    def go(y: Structure) -> Structure:
        if isinstance(y, Variable):
            if y not in numbering:
                numbering[y] = Variable("_V", len(numbering))
            return numbering[y]
        if isinstance(y, Constant):
            return y
        if isinstance(y, Compound):
            return Compound(y.functor, tuple(go(a) for a in y.args))
        if isinstance(y, Atom):
            return Atom(y.predicate, tuple(go(a) for a in y.args))
        if isinstance(y, Literal):
            return Literal(go(y.atom), y.positive)
        if isinstance(y, Clause):
            return Clause(go(y.head), tuple(go(l) for l in y.body), y.from_prelude)
        if isinstance(y, tuple):
            return tuple(go(item) for item in y)
        raise TypeError(f"cannot canonicalize {y!r}")

    return go(x)


class SkolemCounter:
    """Source of fresh `$sk<N>` constants, one per session."""

    def __init__(self, start: int = 0):
        self.value = start

    def next_constant(self) -> Constant:
        c = Constant(f"{SKOLEM_PREFIX}{self.value}")
        self.value += 1
        return c


def skolemize_into(x: Structure, counter: SkolemCounter,
                   mapping: dict[Variable, Constant]) -> Structure:
    """Replace variables by fresh reserved constants, sharing `mapping` so
    the same variable maps to the same constant across one instance."""

    def go(y: Structure) -> Structure:
        if isinstance(y, Variable):
            if y not in mapping:
                mapping[y] = counter.next_constant()
            return mapping[y]
        if isinstance(y, Constant):
            return y
        if isinstance(y, Compound):
            return Compound(y.functor, tuple(go(a) for a in y.args))
        if isinstance(y, Atom):
            return Atom(y.predicate, tuple(go(a) for a in y.args))
        if isinstance(y, Literal):
            return Literal(go(y.atom), y.positive)
        if isinstance(y, Clause):
            return Clause(go(y.head), tuple(go(l) for l in y.body), y.from_prelude)
        if isinstance(y, tuple):
            return tuple(go(item) for item in y)
        raise TypeError(f"cannot skolemize {y!r}")

    return go(x)


def skolemize(a: Atom, counter: SkolemCounter) -> Atom:
    """Ground an atom by binding each distinct variable to a fresh reserved
    constant; ground input comes back unchanged."""
    return skolemize_into(a, counter, {})
