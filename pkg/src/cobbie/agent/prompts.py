"""System and instruction prompts for the answer generator."""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Protocol

from .protocol import ACTION_TAG, FINAL_MARKER

ABSTENTION_TEXT = "Information not found in BIM model"


class ToolDescription(Protocol):
    name: str
    signature: str
    description: str


@dataclass(frozen=True)
class SourcingPolicy:
    sourcing_tiers: tuple[str, ...]
    quality_criteria: tuple[str, ...]

    @classmethod
    def default(cls) -> "SourcingPolicy":
        raw = resources.files("cobbie.data.prompts").joinpath("sourcing_policy.json").read_text(encoding="utf-8")
        return cls.from_dict(json.loads(raw))

    @classmethod
    def from_dict(cls, d: dict) -> "SourcingPolicy":
        return cls(tuple(d["sourcing_tiers"]), tuple(d["quality_criteria"]))


def _numbered(items: Iterable[str]) -> str:
    return "\n".join(f"{i}. {s}" for i, s in enumerate(items, 1))


def build_system_prompt(tools: Iterable[ToolDescription], grammar: str, sourcing_policy: SourcingPolicy | None = None,
                        *, static: bool = False, docs_builtin: bool = False) -> str:
    policy = sourcing_policy or SourcingPolicy.default()
    tools = list(tools)
    if static:
        mode = (
            "You get exactly one chance to run code. Write a single program that prints everything needed to "
            "answer. After it runs you will see its output and must give the final answer without further code."
        )
    else:
        mode = (
            "Explore the model iteratively. Each reply either runs code or gives the final answer. Variables "
            "persist between runs. Inspect types, attributes and property sets before assuming names, and "
            "explore every relevant element type before answering."
        )
    parts = [
        "You answer questions about one building information model (IFC) by writing programs in BQL, "
        "a small query language evaluated against the loaded model.",
        mode,
        "## Reply format\n"
        f"To run code, write your reasoning and then one fenced block tagged `{ACTION_TAG}`:\n"
        f"```{ACTION_TAG}\nprint(count(by_type(\"IfcDoor\")))\n```\n"
        f"To answer, start a line with `{FINAL_MARKER}` followed by the answer.",
        "## BQL\n" + grammar.strip(),
    ]
    if docs_builtin:
        parts.append("## Documentation\n`docs(query)` returns numbered documentation blocks relevant to the query.")
    if tools:
        lines = "\n".join(f"- {t.name}{t.signature}: {t.description}" for t in tools)
        parts.append(
            "## Tools\nPrefer these helper functions over hand-written traversal. "
            "`source(name)` returns a tool's source.\n" + lines
        )
    parts.append("## Answer sourcing, in order of preference\n" + _numbered(policy.sourcing_tiers))
    parts.append("## Quality criteria\n" + _numbered(policy.quality_criteria))
    return "\n\n".join(parts) + "\n"


PLANNER_PROMPT = (
    "You plan documentation lookups for a BIM question. Reply with up to five short search queries, one per "
    "line, and nothing else.\n"
)


def question_message(question: str, doc_context: str | None = None) -> str:
    if doc_context:
        return f"Documentation:\n{doc_context}\n\nQuestion: {question}"
    return f"Question: {question}"


def observation_message(feedback: str) -> str:
    return f"Execution result:\n{feedback}"


STATIC_FINAL_INSTRUCTION = (
    f"No further code can run. Reply with a line starting {FINAL_MARKER} and the answer, "
    f"or {FINAL_MARKER} {ABSTENTION_TEXT} if the output does not contain it."
)

PROTOCOL_REMINDER = (
    f"Your reply must contain either a ```{ACTION_TAG} block or a line starting with {FINAL_MARKER}"
)
