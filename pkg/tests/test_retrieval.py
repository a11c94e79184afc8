import json
import math
import random
from importlib import resources

import httpx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cobbie.agent import ProviderError
from cobbie.retrieval import (
    CODE_UNIT,
    DOC_SECTION,
    ChunkingReport,
    DocChunk,
    HashingEmbedder,
    HttpReranker,
    LexicalOverlapReranker,
    RetrievalConfig,
    Retriever,
    bm25_scores,
    build_index,
    build_sparse,
    chunk_corpus,
    chunk_file,
    dense_search,
    format_blocks,
    idf,
    index_corpus,
    load_index,
    overlap_f1,
    question_search,
    read_corpus_manifest,
    rerank,
    review_and_expand,
    rrf_fuse,
    save_index,
    search,
    tokenize,
)

from conftest import golden
from oracles import bm25_reference, rrf_reference

CORPUS = resources.files("cobbie.data.docs") / "corpus.txt"


@pytest.fixture(scope="module")
def bundled():
    return index_corpus(str(CORPUS), HashingEmbedder())


# --- chunking --------------------------------------------------------------------

PY_SRC = '''"""Module doc."""
import os


def door_width(door):
    """Width of a door."""
    return door.width


class Wall:
    """A wall."""

    def volume(self):
        return 1.0

    def area(self):
        return 2.0
'''


def test_python_chunking_units():
    rep = ChunkingReport()
    chunks = chunk_file("lib/geo.py", "source", PY_SRC, rep)
    ids = [c.chunk_id for c in chunks]
    assert ids == ["lib/geo.py#door_width", "lib/geo.py#Wall", "lib/geo.py#Wall.volume", "lib/geo.py#Wall.area"]
    assert all(c.kind == CODE_UNIT for c in chunks)
    assert "return door.width" in chunks[0].body
    assert "def volume" not in chunks[1].body
    assert rep.diagnostics == []


def test_heuristic_source_chunking():
    src = "fn a(x) {\n  x\n}\n\nfn b(y) {\n  y\n}\n"
    chunks = chunk_file("t.bql", "source", src, ChunkingReport())
    assert [c.chunk_id for c in chunks] == ["t.bql#a", "t.bql#b"]


def test_markdown_chunking_and_duplicate_slugs():
    md = "# Doors\nintro\n## Width\nw1\n## Width\nw2\n"
    chunks = chunk_file("d.md", "document", md, ChunkingReport())
    assert [c.chunk_id for c in chunks] == ["d.md#doors", "d.md#width", "d.md#width-2"]
    assert all(c.kind == DOC_SECTION for c in chunks)
    assert chunks[2].body == "w2"


def test_unparseable_source_falls_back_to_whole_file():
    rep = ChunkingReport()
    chunks = chunk_file("bad.py", "source", "def broken(:\n  pass\n", rep)
    assert [c.chunk_id for c in chunks] == ["bad.py#whole"]
    assert rep.diagnostics and "bad.py" in rep.diagnostics[0]


def test_chunk_ids_are_deterministic():
    files = [("a.md", "document", "# A\nx\n# B\ny"), ("g.py", "source", PY_SRC)]
    assert chunk_corpus(files) == chunk_corpus(list(files))


def test_read_corpus_manifest(tmp_path):
    (tmp_path / "a.md").write_text("# A\nbody")
    (tmp_path / "m.txt").write_text("# comment\na.md document\n")
    assert read_corpus_manifest(tmp_path / "m.txt") == [("a.md", "document", "# A\nbody")]
    (tmp_path / "m.txt").write_text("a.md pdf\n")
    with pytest.raises(ValueError):
        read_corpus_manifest(tmp_path / "m.txt")


# --- review ------------------------------------------------------------------------

class Reviewer:
    def __init__(self, replies):
        self.replies = list(replies)
        self.sessions = []

    def complete(self, system, messages, session_id):
        self.sessions.append(session_id)
        if not self.replies:
            raise ProviderError("offline")
        return self.replies.pop(0)


CHUNK = DocChunk("d.md#width", DOC_SECTION, "Width", "Door width is stored in Pset_DoorCommon.")


def test_review_accepts_questions():
    r = Reviewer(['ok {"useful": true, "questions": ["a?", "b?", "c?"]}'])
    out = review_and_expand(CHUNK, r)
    assert out.useful and out.reverse_questions == ("a?", "b?", "c?")
    assert r.sessions == ["review:d.md#width"]


def test_review_retries_once_then_marks_not_useful():
    r = Reviewer(['{"useful": true, "questions": ["a?"]}', "nonsense"])
    out = review_and_expand(CHUNK, r)
    assert not out.useful and out.note == "malformed review verdict after one retry" and len(r.sessions) == 2
    out = review_and_expand(CHUNK, Reviewer(["nonsense", '{"useful": false}']))
    assert not out.useful and out.note == "judged not useful"


def test_review_provider_failure():
    out = review_and_expand(CHUNK, Reviewer([]))
    assert not out.useful and out.note.startswith("review failed")


def test_non_useful_chunks_are_excluded():
    chunks = [CHUNK, DocChunk("x#y", DOC_SECTION, "Legal", "Copyright", useful=False)]
    idx = build_index(chunks, HashingEmbedder())
    assert [c.chunk_id for c in idx.chunks] == ["d.md#width"]


# --- BM25 ---------------------------------------------------------------------------

def test_idf_formula():
    assert idf(10, 2) == pytest.approx(math.log((10 - 2 + 0.5) / 2.5 + 1), rel=1e-12)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.lists(st.sampled_from("abcdefg"), min_size=1, max_size=12), min_size=1, max_size=12),
       st.lists(st.sampled_from("abcdefgh"), min_size=1, max_size=4),
       st.floats(0.1, 3.0), st.floats(0.0, 1.0))
def test_bm25_matches_reference(docs, query, k1, b):
    index = build_sparse([(f"d{i:02d}", d) for i, d in enumerate(docs)])
    got = dict(bm25_scores(index, query, k1, b))
    ref = bm25_reference(docs, query, k1, b)
    for i, s in enumerate(ref):
        assert got.get(f"d{i:02d}", 0.0) == pytest.approx(s, rel=1e-9, abs=1e-12)


def test_bm25_orders_by_score_then_id():
    index = build_sparse([("b", ["x"]), ("a", ["x"]), ("c", ["y"])])
    ranked = bm25_scores(index, ["x"])
    assert [d for d, _ in ranked] == ["a", "b"] and ranked[0][1] == ranked[1][1]
    assert bm25_scores(index, ["zzz"]) == []


# --- RRF ------------------------------------------------------------------------------

def test_rrf_worked_example():
    fused = rrf_fuse([["d1", "d2"], ["d2", "d1"], ["d1"]], 60)
    assert [d for d, _ in fused] == ["d1", "d2"]
    assert fused[0][1] == pytest.approx(1 / 61 + 1 / 62 + 1 / 61, abs=1e-6)
    assert fused[1][1] == pytest.approx(1 / 62 + 1 / 61, abs=1e-6)


def test_rrf_matches_brute_force_on_500_instances():
    rng = random.Random(7)
    for _ in range(500):
        pool = [f"d{i}" for i in range(rng.randint(1, 15))]
        lists = [rng.sample(pool, rng.randint(0, len(pool))) for _ in range(rng.randint(1, 4))]
        k = rng.choice([1, 10, 60])
        ref = rrf_reference(lists, k)
        expected = sorted(ref.items(), key=lambda x: (-x[1], x[0]))
        assert rrf_fuse(lists, k) == expected


@settings(max_examples=100)
@given(st.lists(st.permutations([f"d{i}" for i in range(6)]), min_size=2, max_size=4))
def test_rrf_dominance(lists):
    """A document ranked at least as high as another in every list is never fused below it."""
    fused = [d for d, _ in rrf_fuse(lists)]
    for a in fused:
        for b in fused:
            if a != b and all(lst.index(a) < lst.index(b) for lst in lists):
                assert fused.index(a) < fused.index(b)


# --- embeddings, dense and question channels --------------------------------------------

def test_hashing_embedder_is_normalized_and_deterministic():
    e = HashingEmbedder()
    v = e.embed(["door width", "door width", ""])
    assert v.shape == (3, 256)
    assert np.linalg.norm(v[0]) == pytest.approx(1.0)
    assert np.array_equal(v[0], v[1]) and not v[2].any()
    assert e.name == "hashing-256"


def test_question_search_dedups_parents():
    chunks = [DocChunk("a", DOC_SECTION, "A", "alpha", ("door width?", "door height?", "door width again?")),
              DocChunk("b", DOC_SECTION, "B", "beta", ("door width?",))]
    e = HashingEmbedder()
    idx = build_index(chunks, e)
    hits = question_search(idx, e.embed(["door width?"])[0], 10)
    assert sorted(cid for cid, _ in hits) == ["a", "b"] and len(hits) == 2
    assert hits[0][1] == pytest.approx(1.0)
    assert dense_search(idx, e.embed(["alpha"])[0], 1)[0][0] == "a"
    with pytest.raises(ValueError):
        dense_search(idx, np.ones(3), 1)


# --- rerank --------------------------------------------------------------------------------

def test_overlap_f1():
    assert overlap_f1("door width", "door width") == 1.0
    assert overlap_f1("door width", "wall height") == 0.0
    # query {door, width}; text {the, door, width, is, stored} -> P=2/5, R=1, F1=4/7
    assert overlap_f1("door width", "the door width is stored") == pytest.approx(4 / 7)


def test_rerank_orders_and_survives_failure():
    cands = [DocChunk("x", DOC_SECTION, "Walls", "wall height"), DocChunk("y", DOC_SECTION, "Doors", "door width")]
    assert [c.chunk_id for c in rerank(cands, "door width", LexicalOverlapReranker(), 2)] == ["y", "x"]

    class Broken:
        def scores(self, q, texts):
            raise RuntimeError("down")

    diags = []
    assert [c.chunk_id for c in rerank(cands, "door width", Broken(), 1, diags)] == ["x"]
    assert diags[0].startswith("reranker failed")


def test_http_reranker():
    def handler(request):
        body = json.loads(request.content)
        assert body["documents"] == ["a", "b"]
        return httpx.Response(200, json={"results": [{"index": 1, "relevance_score": 0.9},
                                                     {"index": 0, "relevance_score": 0.1}]})
    r = HttpReranker("http://x", "m", transport=httpx.MockTransport(handler))
    assert r.scores("q", ["a", "b"]) == [0.1, 0.9]


# --- whole pipeline ------------------------------------------------------------------------

def test_bundled_corpus_has_ten_chunks(bundled):
    assert len(bundled.chunks) == 10 and bundled.question_parent == []


def test_bundled_retrieval_golden(bundled):
    r = Retriever(bundled, HashingEmbedder())
    queries = ["door width property", "how do I sum volumes", "which storey contains an element",
               "output is truncated", "find a wall by name"]
    text = "\n".join(f"{q}: {[c.chunk_id for c in r.search(q)]}" for q in queries) + "\n"
    assert text == golden("retrieval_bundled.txt", text)


def test_retrieve_block_markers(bundled):
    text = Retriever(bundled, HashingEmbedder()).retrieve("door width property")
    blocks = text.split("\n\n[")
    assert text.startswith("[1] ") and len([b for b in blocks]) >= 2
    assert format_blocks([]) == ""


def test_retriever_checks_embedder(bundled):
    with pytest.raises(ValueError):
        Retriever(bundled, HashingEmbedder(dim=64))


def test_search_is_deterministic(bundled):
    e, cfg = HashingEmbedder(), RetrievalConfig()
    assert search(bundled, "property sets", cfg, e) == search(bundled, "property sets", cfg, e)


def test_channels_are_independent():
    chunks = [DocChunk("a", DOC_SECTION, "Zeta", "zeta zeta", ("how wide is a door?",)),
              DocChunk("b", DOC_SECTION, "Door width", "door width door width", ())]
    e = HashingEmbedder()
    idx = build_index(chunks, e)
    cfg = RetrievalConfig(n_r=2, k=2)
    only_q = search(idx, "how wide is a door?", cfg, e, channels=("questions",))
    assert [c.chunk_id for c in only_q] == ["a"]
    only_sparse = search(idx, "door", cfg, e, channels=("sparse",))
    assert [c.chunk_id for c in only_sparse] == ["b"]


def test_config_validation():
    with pytest.raises(ValueError):
        RetrievalConfig(n_r=3, k=5)
    with pytest.raises(ValueError):
        RetrievalConfig(rrf_constant=0)


@pytest.mark.parametrize("suffix", [".json", ".npz"])
def test_save_load_roundtrip(tmp_path, suffix):
    chunks = [CHUNK, DocChunk("b", DOC_SECTION, "B", "beta", ("q1?", "q2?", "q3?"))]
    idx = build_index(chunks, HashingEmbedder())
    save_index(idx, tmp_path / f"i{suffix}")
    back = load_index(tmp_path / f"i{suffix}")
    assert back.chunks == idx.chunks and back.question_parent == idx.question_parent
    assert np.array_equal(back.dense, idx.dense) and np.array_equal(back.questions, idx.questions)
    e = HashingEmbedder()
    assert search(back, "door width", RetrievalConfig(), e) == search(idx, "door width", RetrievalConfig(), e)


def test_load_rejects_foreign_file(tmp_path):
    (tmp_path / "x.json").write_text('{"chunks": []}')
    with pytest.raises(ValueError):
        load_index(tmp_path / "x.json")


def test_tokenize():
    assert tokenize("Pset_DoorCommon.Width = 0.9m") == tokenize("pset_doorcommon.width = 0.9M")
