"""Okapi BM25 over an inverted index."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence


@dataclass(frozen=True)
class SparseIndex:
    doc_ids: tuple[str, ...]
    lengths: tuple[int, ...]
    postings: Mapping[str, tuple[tuple[int, int], ...]]  # term -> ((doc position, tf), ...)
    avgdl: float

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    def df(self, term: str) -> int:
        return len(self.postings.get(term, ()))


def build_sparse(docs: Sequence[tuple[str, Sequence[str]]]) -> SparseIndex:
    """``docs`` is a sequence of ``(doc_id, tokens)``."""
    postings: dict[str, list[tuple[int, int]]] = {}
    lengths = []
    for pos, (_, tokens) in enumerate(docs):
        lengths.append(len(tokens))
        for term, tf in sorted(Counter(tokens).items()):
            postings.setdefault(term, []).append((pos, tf))
    avgdl = sum(lengths) / len(lengths) if lengths else 0.0
    return SparseIndex(tuple(d for d, _ in docs), tuple(lengths),
                       {t: tuple(p) for t, p in sorted(postings.items())}, avgdl)


def idf(n_docs: int, df: int) -> float:
    return math.log((n_docs - df + 0.5) / (df + 0.5) + 1.0)


def bm25_scores(index: SparseIndex, query_terms: Sequence[str], k1: float = 1.5, b: float = 0.75
                ) -> list[tuple[str, float]]:
    """Score every document containing at least one query term; best first, ties by id."""
    scores: dict[int, float] = {}
    for term in query_terms:
        plist = index.postings.get(term)
        if not plist:
            continue
        w = idf(index.n_docs, len(plist))
        for pos, tf in plist:
            norm = k1 * (1 - b + b * index.lengths[pos] / index.avgdl) if index.avgdl else k1
            scores[pos] = scores.get(pos, 0.0) + w * tf * (k1 + 1) / (tf + norm)
    ranked = [(index.doc_ids[p], s) for p, s in scores.items()]
    ranked.sort(key=lambda x: (-x[1], x[0]))
    return ranked
