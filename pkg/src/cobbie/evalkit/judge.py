"""LLM-as-judge: five binary criteria under category-specific rubrics."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..agent import ABSTAINED, ABSTENTION_TEXT, SYSTEM_ERROR, ProviderError, SessionRecord
from ..agent.providers import LlmProvider
from .records import CRITERIA, EvalRecord

JUDGE_RETRIES = 2
CASE_MARKER = "Case (JSON):\n"
_JSON_RE = re.compile(r"\{.*\}", re.S)


@dataclass(frozen=True)
class JudgeInput:
    task_id: str
    question: str
    ground_truth: str
    system_answer: str | None
    trace: SessionRecord
    category: int
    project: str = ""


@lru_cache(maxsize=None)
def rubric(category: int) -> str:
    files = resources.files("cobbie.data.rubrics")
    template = files.joinpath("judge.txt").read_text(encoding="utf-8")
    return template.replace("{category_rubric}", files.joinpath(f"category_{category}.txt").read_text(encoding="utf-8"))


def judge_message(inp: JudgeInput) -> str:
    case = {"question": inp.question, "ground_truth": inp.ground_truth, "system_answer": inp.system_answer,
            "category": inp.category, "executions": len(inp.trace.history), "trace": inp.trace.transcript()}
    return CASE_MARKER + json.dumps(case, ensure_ascii=False, indent=1)


def _verdict(raw: str) -> dict | None:
    m = _JSON_RE.search(raw)
    try:
        d = json.loads(m.group(0)) if m else None
    except json.JSONDecodeError:
        return None
    if not isinstance(d, dict) or not isinstance(d.get("abstained"), bool):
        return None
    if not d["abstained"] and not all(isinstance(d.get(c), bool) for c in CRITERIA):
        return None
    return d


def judge(inp: JudgeInput, provider: LlmProvider, config_id: str = "") -> EvalRecord:
    """Abstention is decided locally first; only substantive answers reach the provider."""
    base = dict(task_id=inp.task_id, category=inp.category, config_id=config_id, project=inp.project)
    if inp.trace.outcome == SYSTEM_ERROR:
        return EvalRecord(abstained=False, system_error=True, **base)
    answer = (inp.system_answer or "").strip()
    if inp.trace.outcome == ABSTAINED or answer == ABSTENTION_TEXT:
        return EvalRecord(abstained=True, **base)
    messages = [{"role": "user", "content": judge_message(inp)}]
    try:
        for attempt in range(JUDGE_RETRIES + 1):
            raw = provider.complete(rubric(inp.category), list(messages), f"{inp.task_id}:judge")
            d = _verdict(raw)
            if d is not None:
                if d["abstained"]:
                    return EvalRecord(abstained=True, **base)
                return EvalRecord(abstained=False, **{c: d[c] for c in CRITERIA}, **base)
            messages += [{"role": "assistant", "content": raw},
                         {"role": "user", "content": "Reply with the JSON object only."}]
    except ProviderError:
        pass
    return EvalRecord(abstained=False, system_error=True, **base)
