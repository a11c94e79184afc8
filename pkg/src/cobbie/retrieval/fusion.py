from __future__ import annotations

from typing import Hashable, Sequence

DEFAULT_RRF_CONSTANT = 60


def rrf_fuse(ranked_lists: Sequence[Sequence[Hashable]], rrf_constant: int = DEFAULT_RRF_CONSTANT
             ) -> list[tuple[Hashable, float]]:
    """Reciprocal rank fusion: sum of 1/(constant + rank), rank from 1. Ties by id."""
    scores: dict = {}
    for lst in ranked_lists:
        for rank, doc in enumerate(lst, 1):
            scores[doc] = scores.get(doc, 0.0) + 1.0 / (rrf_constant + rank)
    return sorted(scores.items(), key=lambda x: (-x[1], x[0]))
