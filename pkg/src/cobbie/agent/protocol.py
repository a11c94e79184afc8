"""Wire protocol between the agent loop and the language model.

A reply is either exploration (a fenced ``action`` block of BQL) or a final
answer (a line starting ``FINAL:``). When both appear the final answer wins.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

ACTION_TAG = "action"
FINAL_MARKER = "FINAL:"

_FENCE_RE = re.compile(r"```action[ \t]*\r?\n(.*?)(?:\r?\n)?```", re.S)
_FINAL_RE = re.compile(r"^FINAL:", re.M)


class ProtocolError(ValueError):
    pass


@dataclass(frozen=True)
class CodeAction:
    reasoning: str
    code: str


@dataclass(frozen=True)
class FinalAnswer:
    reasoning: str
    answer: str


AgentResponse = CodeAction | FinalAnswer


def parse_agent_response(raw: str) -> AgentResponse:
    final = _FINAL_RE.search(raw)
    if final:
        return FinalAnswer(raw[:final.start()].strip(), raw[final.end():].strip())
    fence = _FENCE_RE.search(raw)
    if fence:
        return CodeAction(raw[:fence.start()].strip(), fence.group(1))
    raise ProtocolError("reply has neither an ```action block nor a line starting with FINAL:")


def format_action(code: str, reasoning: str = "") -> str:
    """Inverse of :func:`parse_agent_response` for a code action."""
    head = f"{reasoning}\n" if reasoning else ""
    return f"{head}```{ACTION_TAG}\n{code}\n```"


def format_final(answer: str, reasoning: str = "") -> str:
    head = f"{reasoning}\n" if reasoning else ""
    return f"{head}{FINAL_MARKER} {answer}"
