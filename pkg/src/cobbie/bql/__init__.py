"""BQL: the small, sandboxed action language the agent writes."""
from importlib import resources

from .builtins import CATALOGUE
from .interp import (
    DEFAULT_OUTPUT_LIMIT,
    DEFAULT_STEP_BUDGET,
    TRUNCATION_MARKER,
    BQLRuntimeError,
    ExecEnvironment,
    ExecResult,
    ToolLoadError,
)
from .parser import BQLSyntaxError, called_names, parse
from .values import EntityRef, format_real, format_value


def grammar_text() -> str:
    """The EBNF grammar plus builtin reference, as shipped and as shown to the agent."""
    return resources.files(__package__).joinpath("grammar.ebnf").read_text(encoding="utf-8")


__all__ = [
    "CATALOGUE", "DEFAULT_OUTPUT_LIMIT", "DEFAULT_STEP_BUDGET", "TRUNCATION_MARKER", "BQLRuntimeError",
    "BQLSyntaxError", "EntityRef", "ExecEnvironment", "ExecResult", "ToolLoadError", "called_names",
    "format_real", "format_value", "grammar_text", "parse",
]
