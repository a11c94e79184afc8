"""The three-channel documentation index and query-time retrieval."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .bm25 import SparseIndex, bm25_scores, build_sparse
from .chunking import DocChunk
from .embed import Embedder
from .fusion import DEFAULT_RRF_CONSTANT, rrf_fuse
from .rerank import LexicalOverlapReranker, Reranker, rerank
from .text import tokenize

MAGIC = "COBBIE-DOCINDEX"
FORMAT_VERSION = 1
CHANNELS = ("dense", "sparse", "questions")


@dataclass(frozen=True)
class RetrievalConfig:
    n_r: int = 30
    k: int = 5
    rrf_constant: int = DEFAULT_RRF_CONSTANT
    bm25_k1: float = 1.5
    bm25_b: float = 0.75

    def __post_init__(self):
        if min(self.n_r, self.k, self.rrf_constant) <= 0 or self.bm25_k1 <= 0 or self.bm25_b < 0:
            raise ValueError("retrieval parameters must be positive")
        if self.k > self.n_r:
            raise ValueError("k must not exceed n_r")


@dataclass
class DocIndex:
    chunks: list[DocChunk]
    embedder_name: str
    dense: np.ndarray                 # (n_chunks, dim)
    questions: np.ndarray             # (n_questions, dim)
    question_parent: list[int]        # question row -> chunk position
    sparse: SparseIndex = field(init=False)

    def __post_init__(self):
        self.sparse = build_sparse([(c.chunk_id, tokenize(c.text)) for c in self.chunks])
        self.by_id = {c.chunk_id: c for c in self.chunks}

    @property
    def dim(self) -> int:
        return self.dense.shape[1]


def build_index(chunks: Sequence[DocChunk], embedder: Embedder) -> DocIndex:
    """Index the useful chunks; non-useful ones are left out of every channel."""
    kept = sorted((c for c in chunks if c.useful), key=lambda c: c.chunk_id)
    dense = embedder.embed([c.text for c in kept]).reshape(len(kept), embedder.dim)
    qs, parent = [], []
    for pos, c in enumerate(kept):
        for q in c.reverse_questions:
            qs.append(q)
            parent.append(pos)
    questions = embedder.embed(qs).reshape(len(qs), embedder.dim)
    return DocIndex(kept, embedder.name, dense, questions, parent)


def _cosine(matrix: np.ndarray, q: np.ndarray) -> np.ndarray:
    if matrix.shape[1] != q.shape[0]:
        raise ValueError(f"query embedding has dimension {q.shape[0]}, index has {matrix.shape[1]}")
    norms = np.linalg.norm(matrix, axis=1) * np.linalg.norm(q)
    with np.errstate(invalid="ignore", divide="ignore"):
        sims = np.where(norms > 0, matrix @ q / np.where(norms > 0, norms, 1.0), 0.0)
    return sims


def dense_search(index: DocIndex, query_embedding: np.ndarray, limit: int) -> list[tuple[str, float]]:
    q = np.asarray(query_embedding, dtype=float)
    sims = _cosine(index.dense, q)
    ranked = sorted(((index.chunks[i].chunk_id, float(s)) for i, s in enumerate(sims)), key=lambda x: (-x[1], x[0]))
    return ranked[:limit]


def question_search(index: DocIndex, query_embedding: np.ndarray, limit: int) -> list[tuple[str, float]]:
    """Rank reverse questions, then map back to parent chunks keeping each parent's best hit."""
    q = np.asarray(query_embedding, dtype=float)
    if not len(index.question_parent):
        if index.questions.shape[1] != q.shape[0]:
            raise ValueError(f"query embedding has dimension {q.shape[0]}, index has {index.questions.shape[1]}")
        return []
    sims = _cosine(index.questions, q)
    hits = sorted(((index.chunks[index.question_parent[i]].chunk_id, float(s)) for i, s in enumerate(sims)),
                  key=lambda x: (-x[1], x[0]))
    out, seen = [], set()
    for cid, s in hits:
        if cid not in seen:
            seen.add(cid)
            out.append((cid, s))
    return out[:limit]


def format_blocks(chunks: Sequence[DocChunk]) -> str:
    return "\n\n".join(f"[{i}] {c.title}\n{c.body}" for i, c in enumerate(chunks, 1))


def search(index: DocIndex, query: str, cfg: RetrievalConfig, embedder: Embedder, reranker: Reranker | None = None,
           channels: Sequence[str] = CHANNELS, diagnostics: list[str] | None = None) -> list[DocChunk]:
    if not index.chunks:
        return []
    lists = []
    if "dense" in channels or "questions" in channels:
        qv = embedder.embed([query])[0]
        if "dense" in channels:
            lists.append([cid for cid, _ in dense_search(index, qv, cfg.n_r)])
        if "questions" in channels:
            lists.append([cid for cid, _ in question_search(index, qv, cfg.n_r)])
    if "sparse" in channels:
        hits = bm25_scores(index.sparse, tokenize(query), cfg.bm25_k1, cfg.bm25_b)
        lists.append([cid for cid, _ in hits[:cfg.n_r]])
    fused = [index.by_id[cid] for cid, _ in rrf_fuse(lists, cfg.rrf_constant)[:cfg.n_r]]
    return rerank(fused, query, reranker or LexicalOverlapReranker(), cfg.k, diagnostics)


def retrieve(index: DocIndex, query: str, cfg: RetrievalConfig, embedder: Embedder, reranker: Reranker | None = None,
             channels: Sequence[str] = CHANNELS) -> str:
    return format_blocks(search(index, query, cfg, embedder, reranker, channels))


class Retriever:
    """An index bound to its embedder, reranker and configuration."""

    def __init__(self, index: DocIndex, embedder: Embedder, cfg: RetrievalConfig = RetrievalConfig(),
                 reranker: Reranker | None = None, channels: Sequence[str] = CHANNELS):
        if embedder.name != index.embedder_name:
            raise ValueError(f"index was built with {index.embedder_name}, not {embedder.name}")
        self.index, self.embedder, self.cfg, self.reranker, self.channels = index, embedder, cfg, reranker, channels
        self.diagnostics: list[str] = []

    def search(self, query: str) -> list[DocChunk]:
        return search(self.index, query, self.cfg, self.embedder, self.reranker, self.channels, self.diagnostics)

    def retrieve(self, query: str) -> str:
        return format_blocks(self.search(query))


# -- persistence --------------------------------------------------------------
def _chunk_dict(c: DocChunk) -> dict:
    d = asdict(c)
    d["reverse_questions"] = list(c.reverse_questions)
    return d


def save_index(index: DocIndex, path: str | Path) -> None:
    """Write ``.json`` (text) or ``.npz`` (binary); both carry the magic header and version."""
    path = Path(path)
    meta = {"magic": MAGIC, "version": FORMAT_VERSION, "embedder": index.embedder_name,
            "chunks": [_chunk_dict(c) for c in index.chunks], "question_parent": index.question_parent}
    if path.suffix == ".npz":
        with open(path, "wb") as fh:
            np.savez(fh, meta=np.array(json.dumps(meta)), dense=index.dense, questions=index.questions)
    else:
        meta["dense"] = index.dense.tolist()
        meta["questions"] = index.questions.tolist()
        meta["dim"] = index.dim
        path.write_text(f"{MAGIC} {FORMAT_VERSION}\n" + json.dumps(meta), encoding="utf-8")


def load_index(path: str | Path) -> DocIndex:
    path = Path(path)
    if path.suffix == ".npz":
        with np.load(path, allow_pickle=False) as z:
            meta = json.loads(str(z["meta"]))
            dense, questions = z["dense"], z["questions"]
    else:
        head, _, body = path.read_text(encoding="utf-8").partition("\n")
        if head != f"{MAGIC} {FORMAT_VERSION}":
            raise ValueError(f"{path}: not a version {FORMAT_VERSION} index file")
        meta = json.loads(body)
        dim = meta["dim"]
        dense = np.array(meta["dense"], dtype=float).reshape(-1, dim)
        questions = np.array(meta["questions"], dtype=float).reshape(-1, dim)
    if meta.get("magic") != MAGIC or meta.get("version") != FORMAT_VERSION:
        raise ValueError(f"{path}: not a version {FORMAT_VERSION} index file")
    chunks = [DocChunk(**{**c, "reverse_questions": tuple(c["reverse_questions"])}) for c in meta["chunks"]]
    return DocIndex(chunks, meta["embedder"], dense, questions, list(meta["question_parent"]))
