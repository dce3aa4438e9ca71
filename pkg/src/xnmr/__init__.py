"""Exploration engine for normal logic programs: query-driven grounding,
well-founded evaluation, residual programs, and stable-model enumeration,
wrapped in an interactive shell."""

__version__ = "0.1.0"

from .grounder import (
    BudgetExceededError,
    CallTable,
    FlounderingError,
    GroundRelevantProgram,
    QueryAnswer,
    full_ground,
    ground_relevant,
)
from .parser import (
    ParseError,
    ReservedNameError,
    SourceUnit,
    TableDirective,
    assemble_program,
    format_atom,
    format_clause,
    format_literal,
    format_term,
    load_program,
    parse_program,
    parse_query,
)
from .session import Answer, NoCurrentModelError, Session, answer_holds_in
from .stable import (
    Assignment,
    StableModel,
    TrueInAll,
    call_consistent,
    enumerate_stable,
    gl_check,
    models_where_true,
    oracle_enumerate,
    propagate,
    true_in_all,
)
from .terms import (
    Atom,
    Clause,
    Compound,
    Constant,
    Literal,
    Program,
    SkolemCounter,
    Substitution,
    Variable,
    apply,
    is_ground,
    skolemize,
    unify,
)
from .wfs import (
    AtomTable,
    NonNegativeProgram,
    PartialInterpretation,
    ResidualProgram,
    TruthConstant,
    TruthValue,
    lpm,
    phi,
    quotient,
    residual,
    t3p_step,
    truth_value,
    wfm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
