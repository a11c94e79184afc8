"""Index-time review: a provider judges each chunk and writes reverse questions."""
from __future__ import annotations

import json
import re
from dataclasses import replace

from ..agent.providers import LlmProvider, ProviderError
from .chunking import DocChunk

MIN_QUESTIONS, MAX_QUESTIONS = 3, 5

REVIEW_PROMPT = (
    "You review documentation chunks for a retrieval index used by an agent that queries building models. "
    "Decide whether the chunk is useful for answering such questions. If it is, write three to five questions "
    "a user might ask that this chunk answers. Reply with JSON only: "
    '{"useful": true, "questions": ["...", "..."]} or {"useful": false}.\n'
)
_REMINDER = f"Reply with JSON only, with between {MIN_QUESTIONS} and {MAX_QUESTIONS} questions when useful."
_JSON_RE = re.compile(r"\{.*\}", re.S)


def _verdict(raw: str):
    m = _JSON_RE.search(raw)
    if not m:
        return None
    try:
        d = json.loads(m.group(0))
    except json.JSONDecodeError:
        return None
    if not isinstance(d, dict) or not isinstance(d.get("useful"), bool):
        return None
    if not d["useful"]:
        return False, ()
    qs = d.get("questions")
    if not isinstance(qs, list) or not all(isinstance(q, str) and q.strip() for q in qs):
        return None
    if not MIN_QUESTIONS <= len(qs) <= MAX_QUESTIONS:
        return None
    return True, tuple(q.strip() for q in qs)


def review_and_expand(chunk: DocChunk, provider: LlmProvider) -> DocChunk:
    sid = f"review:{chunk.chunk_id}"
    messages = [{"role": "user", "content": f"Chunk {chunk.chunk_id}\n{chunk.text}"}]
    for attempt in range(2):
        try:
            raw = provider.complete(REVIEW_PROMPT, messages, sid)
        except ProviderError as e:
            return replace(chunk, useful=False, reverse_questions=(), note=f"review failed: {e}")
        v = _verdict(raw)
        if v is not None:
            useful, qs = v
            return replace(chunk, useful=useful, reverse_questions=qs, note=None if useful else "judged not useful")
        messages = messages + [{"role": "assistant", "content": raw}, {"role": "user", "content": _REMINDER}]
    return replace(chunk, useful=False, reverse_questions=(), note="malformed review verdict after one retry")
