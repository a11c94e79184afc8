"""A deterministic stand-in judge for offline runs.

It answers judge prompts by string matching against the ground truth:
numbers must agree within 1% and every word token of the ground truth must
occur in the answer. Transparency requires at least one execution.
"""
from __future__ import annotations

import json
import math
import re
from typing import Sequence

from ..retrieval.text import tokenize
from .judge import CASE_MARKER

_NUM_RE = re.compile(r"[-+]?\d+(?:[.,]\d+)?")
NUMBER_RTOL = 1e-2


def _numbers(text: str) -> list[float]:
    return [float(m.replace(",", ".")) for m in _NUM_RE.findall(text)]


def _words(text: str) -> set[str]:
    return {t for t in tokenize(text) if not t.isdigit()}


def matches(ground_truth: str, answer: str) -> bool:
    got = _numbers(answer)
    for want in _numbers(ground_truth):
        if not any(math.isclose(want, g, rel_tol=NUMBER_RTOL, abs_tol=1e-9) for g in got):
            return False
    return _words(ground_truth) <= _words(answer)


class ReferenceJudgeProvider:
    def complete(self, system_prompt: str, messages: Sequence[dict], session_id: str) -> str:
        content = messages[0]["content"]
        case = json.loads(content[content.index(CASE_MARKER) + len(CASE_MARKER):])
        answer = case["system_answer"] or ""
        ok = matches(case["ground_truth"], answer)
        return json.dumps({"abstained": False, "faithfulness": ok, "completeness": ok,
                           "transparency": case["executions"] >= 1, "relevance": bool(answer.strip())})
