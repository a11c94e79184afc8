"""Rerankers: a deterministic lexical-overlap scorer and an HTTP cross-encoder client."""
from __future__ import annotations

import os
from collections import Counter
from typing import Protocol, Sequence

import httpx

from .text import tokenize


class Reranker(Protocol):
    def scores(self, query: str, texts: Sequence[str]) -> list[float]: ...


def overlap_f1(query: str, text: str) -> float:
    """Token-multiset F1 between query and text."""
    q, d = Counter(tokenize(query)), Counter(tokenize(text))
    common = sum((q & d).values())
    if not common:
        return 0.0
    p, r = common / sum(d.values()), common / sum(q.values())
    return 2 * p * r / (p + r)


class LexicalOverlapReranker:
    def scores(self, query: str, texts: Sequence[str]) -> list[float]:
        return [overlap_f1(query, t) for t in texts]


class HttpReranker:
    """Cross-encoder behind a ``/rerank`` endpoint returning ``results: [{index, relevance_score}]``."""

    def __init__(self, base_url: str, model_name: str, api_key: str | None = None,
                 transport: httpx.BaseTransport | None = None):
        self.base_url = base_url.rstrip("/")
        self.model_name = model_name
        self.api_key = api_key if api_key is not None else os.environ.get("COBBIE_API_KEY")
        self._client = httpx.Client(timeout=60.0, transport=transport)

    def scores(self, query: str, texts: Sequence[str]) -> list[float]:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        r = self._client.post(f"{self.base_url}/rerank",
                              json={"model": self.model_name, "query": query, "documents": list(texts)},
                              headers=headers)
        r.raise_for_status()
        out = [0.0] * len(texts)
        for item in r.json()["results"]:
            out[int(item["index"])] = float(item["relevance_score"])
        return out


def rerank(candidates: Sequence, query: str, reranker: Reranker, k: int, diagnostics: list[str] | None = None
           ) -> list:
    """Order ``candidates`` (objects with ``.text``) by reranker score, keeping fusion order on ties.

    If the reranker fails, fusion order is kept and a diagnostic is appended.
    """
    try:
        s = reranker.scores(query, [c.text for c in candidates])
        if len(s) != len(candidates):
            raise ValueError(f"reranker returned {len(s)} scores for {len(candidates)} candidates")
    except Exception as e:
        if diagnostics is not None:
            diagnostics.append(f"reranker failed, using fusion order: {e}")
        return list(candidates[:k])
    order = sorted(range(len(candidates)), key=lambda i: -s[i])
    return [candidates[i] for i in order[:k]]
