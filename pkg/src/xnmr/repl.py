"""Interactive top-level shell.

A read-eval loop with the `nmr| ?- ` prompt: consult programs (from files
or `[user]`), pose queries, inspect delay lists for undefined answers, and
steer stable-model exploration with the `;`, `s`, `t` and `a` keys.

Presentation protocol for a query, in answer discovery order: true ground
queries print `yes`; true non-ground answers print the instantiated query
and await `;`/return; undefined answers print one `DELAY LIST = [...]` per
residual clause of the query instance and await `;` (next), return/other
(accept as undefined, `yes`), or a key:

  s   browse all stable models of the answer's residual
  t   browse only models where the query instance is true
  a   report whether the instance is true in all models

After a key's interaction the answer browsing advances; exhausting the
answers prints `no`.  When standard input is not a terminal the shell
echoes input, so a scripted run reads like an interactive transcript.
"""

from __future__ import annotations

import argparse
import io
import sys
import time
from pathlib import Path
from typing import IO, Iterator, Sequence

from . import __version__
from .grounder import BudgetExceededError, DEFAULT_BUDGET, FlounderingError
from .parser import (
    ConsultCommand,
    HaltCommand,
    ParseError,
    QueryCommand,
    SourceUnit,
    assemble_program,
    format_atom,
    format_literal,
    parse_command,
    parse_program,
)
from .session import Answer, Session, answer_holds_in
from .stable import (
    StableModel,
    enumerate_stable,
    models_where_true,
    oracle_enumerate,
    true_in_all,
)
from .terms import Literal, is_ground

PROMPT = "nmr| ?- "


class LineSource:
    """Line reader that mirrors input to the transcript when echoing."""

    def __init__(self, stream: IO[str], out: IO[str], echo: bool):
        self.stream = stream
        self.out = out
        self.echo = echo

    def readline(self) -> str | None:
        line = self.stream.readline()
        if line == "":
            return None
        line = line.rstrip("\r\n")
        if self.echo:
            self.out.write(line + "\n")
        return line


class Repl:
    def __init__(self, opts: argparse.Namespace, stdin: IO[str], stdout: IO[str]):
        self.out = stdout
        self._tty = getattr(stdin, "isatty", lambda: False)()
        self.src = LineSource(stdin, stdout, echo=not self._tty)
        self.opts = opts
        self.show_banner = not opts.no_banner
        self.units: list[SourceUnit] = []
        self.session = Session(assemble_program([]), budget=opts.budget)

    # -- plumbing ---------------------------------------------------------

    def write(self, text: str) -> None:
        self.out.write(text)

    def read_key(self) -> str:
        if self.opts.raw and self._tty:
            return self._read_key_raw()
        line = self.src.readline()
        if line is None:
            return ""
        line = line.strip()
        return line[:1]

    def _read_key_raw(self) -> str:
        """Single-keystroke input on a terminal; echoes the key so the
        transcript is identical to line-buffered mode."""
        import termios
        import tty

        fd = self.src.stream.fileno()
        old = termios.tcgetattr(fd)
        try:
            tty.setcbreak(fd)
            ch = self.src.stream.read(1)
        finally:
            termios.tcsetattr(fd, termios.TCSADRAIN, old)
        if ch in ("\n", "\r"):
            ch = ""
        self.write(ch + "\n")
        return ch

    def _timing(self, started: float) -> str:
        if not self.show_banner:
            return ""
        return f", cpu time used: {time.process_time() - started:.4f} seconds"

    # -- main loop ----------------------------------------------------------

    def run(self) -> int:
        if self.show_banner:
            self.write(f"xnmr {__version__} -- exploration shell for normal "
                       f"logic programs\n\n")
        for name in self.opts.files:
            self.load(name)
        while True:
            self.write(PROMPT)
            line = self.src.readline()
            if line is None:
                return 0
            if not line.strip():
                continue
            try:
                command = parse_command(line)
            except ParseError as err:
                self.write(f"\nError: {err}\n")
                continue
            if isinstance(command, HaltCommand):
                return 0
            if isinstance(command, ConsultCommand):
                self.consult(command.names)
            elif isinstance(command, QueryCommand):
                self.execute_query(command.literals)

    # -- consulting ------------------------------------------------------------

    def consult(self, names: Sequence[str]) -> None:
        for name in names:
            if not self.load(name):
                self.write("\nno\n")
                return
        self.write("\nyes\n")

    def load(self, name: str) -> bool:
        """Consult a file (or `user` for inline clauses); True on success."""
        started = time.process_time()
        if name == "user":
            self.write("[Compiling user]\n")
            lines = []
            while True:
                line = self.src.readline()
                if line is None or line.strip() == "end_of_file.":
                    break
                lines.append(line)
            text = "\n".join(lines)
        else:
            path = Path(name)
            if not path.exists():
                path = Path(name + ".P")
            if not path.exists():
                self.write(f"Error: cannot open {name} (tried {name} and {name}.P)\n")
                return False
            text = path.read_text()
        try:
            unit = parse_program(text)
        except ParseError as err:
            self.write(f"Error: {err}\n")
            return False
        self.units.append(unit)
        self.session = Session(assemble_program(self.units), budget=self.opts.budget)
        self.write(f"[{name} compiled{self._timing(started)}]\n[{name} loaded]\n")
        return True

    # -- query execution -----------------------------------------------------------

    def execute_query(self, literals: tuple[Literal, ...]) -> None:
        try:
            self.session.init_stable(literals)
        except (FlounderingError, BudgetExceededError) as err:
            self.write(f"\nError: {err}\n")
            return

        answers = self.session.answers
        presentations: list[tuple[int, int]] = []
        for idx, answer in enumerate(answers):
            if answer.delay_lists:
                presentations.extend((idx, j) for j in range(len(answer.delay_lists)))
            else:
                presentations.append((idx, -1))
        ground_query = all(is_ground(lit) for lit in literals)

        i = 0
        while True:
            if i >= len(presentations):
                self.write("\nno\n")
                return
            idx, j = presentations[i]
            answer = answers[idx]

            if j < 0:  # true answer
                if ground_query:
                    self.write("\nyes\n")
                    return
                self.write(f"\n{self._instance_text(answer)} ? ")
                if self.read_key() == ";":
                    i += 1
                    continue
                self.write("\nyes\n")
                return

            self.session.select_answer(idx)
            delay = "[" + ",".join(format_literal(l) for l in answer.delay_lists[j]) + "]"
            prefix = "" if ground_query else self._instance_text(answer) + "\n"
            self.write(f"\n{prefix}DELAY LIST = {delay} ? ")
            outcome = self.handle_key(answer, self.read_key())
            if outcome == "accept":
                self.write("\nyes\n")
                return
            i += 1

    def handle_key(self, answer: Answer, key: str) -> str:
        """One key at an undefined-answer prompt.

        `;` moves to the next answer presentation; `s`/`t` browse (all or
        query-true) stable models of the answer's residual and then move
        on, unless browsing was cut short, which accepts; `a` reports
        whether the instance holds in all models and moves on; anything
        else accepts the answer as undefined."""
        if key == ";":
            return "advance"
        if key in ("s", "t"):
            if self._browse_models(answer, only_true=(key == "t")) == "stopped":
                return "accept"
            return "advance"
        if key == "a":
            self._report_true_in_all(answer)
            return "advance"
        return "accept"

    @staticmethod
    def _instance_text(answer: Answer) -> str:
        return ", ".join(format_literal(l) for l in answer.literals)

    def _models(self, answer: Answer, only_true: bool) -> Iterator[StableModel]:
        res = answer.residual
        if only_true:
            if len(answer.literals) == 1 and answer.literals[0].positive:
                return models_where_true(res, answer.literals[0].atom)
            return (m for m in enumerate_stable(res) if answer_holds_in(answer, m))
        if self.opts.oracle:
            models = sorted(oracle_enumerate(res), key=lambda m: sorted(m.handles))
            return iter(models)
        return enumerate_stable(res)

    def _browse_models(self, answer: Answer, only_true: bool) -> str:
        self.write("\nStable Models: ")
        for model in self._models(answer, only_true):
            atoms = model.atoms_by_handle(answer.residual)
            self.write("\n  {" + "; ".join(format_atom(a) for a in atoms) + "} ? ")
            if self.read_key() != ";":
                return "stopped"
        self.write("  no\n")
        return "advance"

    def _report_true_in_all(self, answer: Answer) -> None:
        if len(answer.literals) == 1 and answer.literals[0].positive:
            verdict = true_in_all(answer.residual, answer.literals[0].atom)
            holds, no_models = verdict.holds, verdict.no_models
        else:
            models = list(enumerate_stable(answer.residual))
            no_models = not models
            holds = bool(models) and all(answer_holds_in(answer, m) for m in models)
        if holds:
            self.write("  yes\n")
        elif no_models:
            self.write("  no (no stable models)\n")
        else:
            self.write("  no\n")


def build_arg_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="xnmr",
        description="Explore normal logic programs under well-founded and "
                    "stable model semantics.")
    ap.add_argument("files", nargs="*", help="programs to consult on startup")
    ap.add_argument("--no-banner", action="store_true",
                    help="suppress the banner and timing lines (scripted mode)")
    ap.add_argument("--query", help="run one query non-interactively")
    ap.add_argument("--keys", default="",
                    help="key presses fed to --query, one per character")
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                    help="grounding resolution-step budget")
    ap.add_argument("--oracle", action="store_true",
                    help="make the s key use the brute-force model oracle")
    ap.add_argument("--raw", action="store_true",
                    help="read keys as single keystrokes on a terminal")
    return ap


def run_repl(argv: Sequence[str] | None = None,
             stdin: IO[str] | None = None,
             stdout: IO[str] | None = None) -> int:
    opts = build_arg_parser().parse_args(argv)
    if stdout is None:
        stdout = sys.stdout
    if opts.query is not None:
        query = opts.query.strip()
        if not query.endswith("."):
            query += "."
        script = query + "\n" + "".join(ch + "\n" for ch in opts.keys)
        stdin = io.StringIO(script)
    elif stdin is None:
        stdin = sys.stdin
    try:
        return Repl(opts, stdin, stdout).run()
    except OSError:
        return 1


def main() -> None:
    sys.exit(run_repl())
