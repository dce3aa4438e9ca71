"""Parser and formatter for the Prolog-subset source language.

Accepted surface: facts and rules terminated by `.`, `:-` between head and
body, `tnot(Goal)` negation, `[a,b|T]` list sugar, quoted atoms, integers,
`%` line comments, and `:- table p/N, ...` directives.  Directives are
recorded but semantically inert: the engine behaves as if every predicate
were tabled.

A small prelude defining member/2 and append/3 is appended to every
assembled program so list-manipulating rules work out of the box.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Union

from .terms import (
    NIL,
    Atom,
    Clause,
    Compound,
    Constant,
    Literal,
    Program,
    SKOLEM_PREFIX,
    Term,
    Variable,
    fresh_variable,
    make_list,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, token: str = ""):
        self.message = message
        self.line = line
        self.col = col
        self.token = token
        near = f" near {token!r}" if token else ""
        super().__init__(f"syntax error at line {line}, column {col}: {message}{near}")


class ReservedNameError(ParseError):
    """User source may not mention constants with the `$sk` prefix."""


@dataclass(frozen=True)
class TableDirective:
    entries: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class SourceUnit:
    directives: tuple[TableDirective, ...]
    clauses: tuple[Clause, ...]


# Top-level commands the shell understands.

@dataclass(frozen=True)
class ConsultCommand:
    names: tuple[str, ...]


@dataclass(frozen=True)
class HaltCommand:
    pass


@dataclass(frozen=True)
class QueryCommand:
    literals: tuple[Literal, ...]


Command = Union[ConsultCommand, HaltCommand, QueryCommand]


# ---------------------------------------------------------------------------
# Tokenizer

_NAME_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")
_VAR_RE = re.compile(r"[A-Z_][a-zA-Z0-9_]*")
_INT_RE = re.compile(r"\d+")

_PUNCT = {
    "(": "LPAREN",
    ")": "RPAREN",
    "[": "LBRACKET",
    "]": "RBRACKET",
    ",": "COMMA",
    "|": "BAR",
    "/": "SLASH",
}


@dataclass(frozen=True)
class Token:
    kind: str
    value: object
    line: int
    col: int

    @property
    def text(self) -> str:
        return str(self.value)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if ch == ".":
            nxt = text[i + 1] if i + 1 < n else ""
            if nxt == "" or nxt in " \t\r\n%":
                tokens.append(Token("END", ".", start_line, start_col))
                i, col = i + 1, col + 1
                continue
            raise ParseError("unexpected character after '.'", line, col, text[i:i + 2])
        if ch == ":" and text[i:i + 2] == ":-":
            tokens.append(Token("NECK", ":-", start_line, start_col))
            i, col = i + 2, col + 2
            continue
        if ch == "\\" and text[i:i + 2] == "\\+":
            raise ParseError("operator \\+ is not supported; use tnot(Goal)",
                             line, col, "\\+")
        if ch in _PUNCT:
            tokens.append(Token(_PUNCT[ch], ch, start_line, start_col))
            i, col = i + 1, col + 1
            continue
        if ch == "'":
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise ParseError("unterminated quoted atom", start_line, start_col)
                if text[j] == "'":
                    if text[j + 1:j + 2] == "'":
                        buf.append("'")
                        j += 2
                        continue
                    j += 1
                    break
                if text[j] == "\n":
                    raise ParseError("newline in quoted atom", start_line, start_col)
                buf.append(text[j])
                j += 1
            tokens.append(Token("QUOTED", "".join(buf), start_line, start_col))
            col += j - i
            i = j
            continue
        m = _NAME_RE.match(text, i)
        if m:
            tokens.append(Token("NAME", m.group(), start_line, start_col))
            col += m.end() - i
            i = m.end()
            continue
        m = _VAR_RE.match(text, i)
        if m:
            tokens.append(Token("VAR", m.group(), start_line, start_col))
            col += m.end() - i
            i = m.end()
            continue
        m = _INT_RE.match(text, i)
        if m:
            tokens.append(Token("INT", int(m.group()), start_line, start_col))
            col += m.end() - i
            i = m.end()
            continue
        raise ParseError("unexpected character", line, col, ch)
    tokens.append(Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Recursive-descent parser

class _Parser:
    def __init__(self, text: str, allow_reserved: bool = False):
        self.tokens = tokenize(text)
        self.pos = 0
        self.allow_reserved = allow_reserved
        self.scope: dict[str, Variable] = {}

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {what}", tok.line, tok.col, tok.text)
        return tok

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.col, tok.text)

    # -- names ------------------------------------------------------------

    def check_reserved(self, tok: Token) -> str:
        name = str(tok.value)
        if name.startswith(SKOLEM_PREFIX) and not self.allow_reserved:
            raise ReservedNameError(
                f"constants with the reserved prefix {SKOLEM_PREFIX!r} cannot "
                "appear in source", tok.line, tok.col, name)
        return name

    # -- terms ------------------------------------------------------------

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "VAR":
            self.next()
            if tok.value == "_":
                return fresh_variable("_")
            if tok.value not in self.scope:
                self.scope[str(tok.value)] = fresh_variable(str(tok.value))
            return self.scope[str(tok.value)]
        if tok.kind == "INT":
            self.next()
            return Constant(tok.value)
        if tok.kind == "LBRACKET":
            return self.parse_list()
        if tok.kind in ("NAME", "QUOTED"):
            self.next()
            name = self.check_reserved(tok)
            if self.peek().kind == "LPAREN":
                self.next()
                args = self.parse_term_args()
                return Compound(name, args)
            return Constant(name)
        raise self.fail("expected a term")

    def parse_term_args(self) -> tuple[Term, ...]:
        args = [self.parse_term()]
        while self.peek().kind == "COMMA":
            self.next()
            args.append(self.parse_term())
        self.expect("RPAREN", "')'")
        return tuple(args)

    def parse_list(self) -> Term:
        self.expect("LBRACKET", "'['")
        if self.peek().kind == "RBRACKET":
            self.next()
            return NIL
        items = [self.parse_term()]
        while self.peek().kind == "COMMA":
            self.next()
            items.append(self.parse_term())
        tail: Term = NIL
        if self.peek().kind == "BAR":
            self.next()
            tail = self.parse_term()
        self.expect("RBRACKET", "']'")
        return make_list(items, tail)

    # -- atoms, literals, clauses ------------------------------------------

    def parse_atom(self) -> Atom:
        tok = self.peek()
        if tok.kind not in ("NAME", "QUOTED"):
            raise self.fail("expected a predicate name")
        self.next()
        name = self.check_reserved(tok)
        if self.peek().kind == "LPAREN":
            self.next()
            args = self.parse_term_args()
            return Atom(name, args)
        return Atom(name)

    def parse_literal(self) -> Literal:
        tok = self.peek()
        if tok.kind == "NAME" and tok.value == "tnot" and self.peek(1).kind == "LPAREN":
            self.next()
            self.next()
            atom = self.parse_atom()
            self.expect("RPAREN", "')' closing tnot")
            return Literal(atom, positive=False)
        return Literal(self.parse_atom())

    def parse_body(self) -> tuple[Literal, ...]:
        lits = [self.parse_literal()]
        while self.peek().kind == "COMMA":
            self.next()
            lits.append(self.parse_literal())
        return tuple(lits)

    def parse_clause_or_directive(self) -> Union[Clause, TableDirective]:
        self.scope = {}
        if self.peek().kind == "NECK":
            self.next()
            return self.parse_directive()
        head_tok = self.peek()
        head = self.parse_atom()
        if head.predicate == "tnot" and head.arity == 1:
            raise ParseError("tnot cannot appear in a clause head",
                             head_tok.line, head_tok.col, "tnot")
        body: tuple[Literal, ...] = ()
        if self.peek().kind == "NECK":
            self.next()
            body = self.parse_body()
        self.expect("END", "'.' ending the clause")
        return Clause(head, body)

    def parse_directive(self) -> TableDirective:
        tok = self.peek()
        if tok.kind != "NAME" or tok.value != "table":
            raise self.fail("only ':- table p/N, ...' directives are supported")
        self.next()
        entries = [self.parse_table_spec()]
        while self.peek().kind == "COMMA":
            self.next()
            entries.append(self.parse_table_spec())
        self.expect("END", "'.' ending the directive")
        return TableDirective(tuple(entries))

    def parse_table_spec(self) -> tuple[str, int]:
        name = self.expect("NAME", "a predicate name")
        self.expect("SLASH", "'/'")
        arity = self.expect("INT", "an arity")
        return (str(name.value), int(arity.value))


# ---------------------------------------------------------------------------
# Entry points

def parse_program(text: str, allow_reserved: bool = False) -> SourceUnit:
    p = _Parser(text, allow_reserved)
    directives: list[TableDirective] = []
    clauses: list[Clause] = []
    while p.peek().kind != "EOF":
        item = p.parse_clause_or_directive()
        if isinstance(item, TableDirective):
            directives.append(item)
        else:
            clauses.append(item)
    return SourceUnit(tuple(directives), tuple(clauses))


def parse_query(text: str, allow_reserved: bool = False) -> tuple[Literal, ...]:
    p = _Parser(text, allow_reserved)
    lits = p.parse_body()
    p.expect("END", "'.' ending the query")
    p.expect("EOF", "end of input")
    return lits


def parse_command(text: str) -> Command:
    """Classify one shell input line: consult list, halt, or query."""
    p = _Parser(text)
    tok = p.peek()
    if tok.kind == "LBRACKET":
        p.next()
        names = [_consult_name(p)]
        while p.peek().kind == "COMMA":
            p.next()
            names.append(_consult_name(p))
        p.expect("RBRACKET", "']'")
        p.expect("END", "'.'")
        p.expect("EOF", "end of input")
        return ConsultCommand(tuple(names))
    if tok.kind == "NAME" and tok.value in ("halt", "end_of_file"):
        if p.peek(1).kind == "END" and p.peek(2).kind == "EOF":
            return HaltCommand()
    return QueryCommand(parse_query(text))


def _consult_name(p: _Parser) -> str:
    tok = p.next()
    if tok.kind not in ("NAME", "QUOTED"):
        raise ParseError("expected a file name or 'user'", tok.line, tok.col, tok.text)
    return str(tok.value)


# ---------------------------------------------------------------------------
# Formatting back to canonical text

_BARE_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


def _format_name(name: str) -> str:
    if _BARE_RE.match(name) or name == "[]":
        return name
    return "'" + name.replace("'", "''") + "'"


def format_term(t: Term) -> str:
    if isinstance(t, Variable):
        return t.name
    if isinstance(t, Constant):
        return str(t.symbol) if isinstance(t.symbol, int) else _format_name(t.symbol)
    if t.functor == "." and len(t.args) == 2:
        return _format_list(t)
    args = ",".join(format_term(a) for a in t.args)
    return f"{_format_name(t.functor)}({args})"


def _format_list(t: Term) -> str:
    items = []
    while isinstance(t, Compound) and t.functor == "." and len(t.args) == 2:
        items.append(format_term(t.args[0]))
        t = t.args[1]
    if isinstance(t, Constant) and t.symbol == "[]":
        return "[" + ",".join(items) + "]"
    return "[" + ",".join(items) + "|" + format_term(t) + "]"


def format_atom(a: Atom) -> str:
    if not a.args:
        return _format_name(a.predicate)
    args = ",".join(format_term(t) for t in a.args)
    return f"{_format_name(a.predicate)}({args})"


def format_literal(lit: Literal) -> str:
    text = format_atom(lit.atom)
    return text if lit.positive else f"tnot({text})"


def format_clause(c: Clause) -> str:
    if c.is_fact:
        return format_atom(c.head) + "."
    body = ",".join(format_literal(l) for l in c.body)
    return f"{format_atom(c.head)} :- {body}."


# ---------------------------------------------------------------------------
# Prelude and program assembly

_PRELUDE_SRC = """
member(X,[X|_]).
member(X,[_|T]) :- member(X,T).
append([],L,L).
append([H|T],L,[H|R]) :- append(T,L,R).
"""


@lru_cache(maxsize=1)
def prelude_clauses() -> tuple[Clause, ...]:
    unit = parse_program(_PRELUDE_SRC)
    return tuple(Clause(c.head, c.body, from_prelude=True) for c in unit.clauses)


def assemble_program(units: Iterable[SourceUnit]) -> Program:
    """User clauses in source order, then the built-in prelude."""
    clauses: list[Clause] = []
    for unit in units:
        clauses.extend(unit.clauses)
    clauses.extend(prelude_clauses())
    return Program(tuple(clauses))


def load_program(text: str) -> Program:
    return assemble_program([parse_program(text)])
