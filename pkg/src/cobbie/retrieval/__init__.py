"""Documentation retrieval: chunking, review, three-channel hybrid search, fusion and reranking."""
from .bm25 import SparseIndex, bm25_scores, build_sparse, idf
from .chunking import CODE_UNIT, DOC_SECTION, ChunkingReport, DocChunk, chunk_corpus, chunk_file
from .corpus import index_corpus, read_corpus_manifest
from .embed import Embedder, HashingEmbedder, HttpEmbedder
from .fusion import DEFAULT_RRF_CONSTANT, rrf_fuse
from .index import (
    CHANNELS,
    DocIndex,
    RetrievalConfig,
    Retriever,
    build_index,
    dense_search,
    format_blocks,
    load_index,
    question_search,
    retrieve,
    save_index,
    search,
)
from .rerank import HttpReranker, LexicalOverlapReranker, Reranker, overlap_f1, rerank
from .review import review_and_expand
from .text import tokenize

__all__ = [
    "CHANNELS", "CODE_UNIT", "DEFAULT_RRF_CONSTANT", "DOC_SECTION", "ChunkingReport", "DocChunk", "DocIndex",
    "Embedder", "HashingEmbedder", "HttpEmbedder", "HttpReranker", "LexicalOverlapReranker", "Reranker",
    "RetrievalConfig", "Retriever", "SparseIndex", "bm25_scores", "build_index", "build_sparse", "chunk_corpus",
    "chunk_file", "dense_search", "format_blocks", "idf", "index_corpus", "load_index", "overlap_f1", "question_search", "read_corpus_manifest", "rerank",
    "retrieve", "review_and_expand", "rrf_fuse", "save_index", "search", "tokenize",
]
