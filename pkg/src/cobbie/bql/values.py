"""Runtime values of the action language and their printed form."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Callable


@dataclass(frozen=True)
class EntityRef:
    id: int


class Function:
    """A user-defined function or lambda closed over its defining frame."""
    __slots__ = ("name", "params", "body", "frame", "is_tool")

    def __init__(self, name: str, params: list[str], body: Callable, frame, is_tool: bool = False):
        self.name = name
        self.params = params
        self.body = body
        self.frame = frame
        self.is_tool = is_tool

    def __repr__(self) -> str:
        return f"<fn {self.name}>"


@dataclass(frozen=True)
class Builtin:
    name: str
    impl: Callable
    min_args: int
    max_args: int

    def __repr__(self) -> str:
        return f"<builtin {self.name}>"


def type_name(v: Any) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, float):
        return "real"
    if isinstance(v, str):
        return "str"
    if isinstance(v, EntityRef):
        return "entity"
    if isinstance(v, list):
        return "list"
    if isinstance(v, dict):
        return "map"
    if isinstance(v, (Function, Builtin)):
        return "fn"
    return type(v).__name__


def format_real(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def format_value(v: Any, type_of: Callable[[int], str] | None = None, top: bool = True) -> str:
    """Render a value the way ``print`` shows it.

    Strings print bare at top level and quoted inside containers.
    """
    if v is None:
        return "null"
    if v is True:
        return "true"
    if v is False:
        return "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format_real(v)
    if isinstance(v, str):
        return v if top else json.dumps(v, ensure_ascii=False)
    if isinstance(v, EntityRef):
        return f"#{v.id}={type_of(v.id)}" if type_of else f"#{v.id}"
    if isinstance(v, list):
        return "[" + ", ".join(format_value(x, type_of, False) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(
            f"{json.dumps(str(k), ensure_ascii=False)}: {format_value(x, type_of, False)}" for k, x in v.items()
        ) + "}"
    return repr(v)
