from __future__ import annotations

from pathlib import Path

from ..agent.providers import LlmProvider
from .chunking import ChunkingReport, chunk_corpus
from .embed import Embedder
from .index import DocIndex, build_index
from .review import review_and_expand


def read_corpus_manifest(path: str | Path) -> list[tuple[str, str, str]]:
    """Lines of ``<path> <kind>``; ``#`` starts a comment. Paths resolve against the manifest's directory."""
    path = Path(path)
    files = []
    for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.rsplit(None, 1)
        if len(parts) != 2 or parts[1] not in ("source", "document"):
            raise ValueError(f"{path}:{n}: expected '<path> source|document'")
        rel, kind = parts
        files.append((rel, kind, (path.parent / rel).read_text(encoding="utf-8")))
    return files


def index_corpus(manifest: str | Path, embedder: Embedder, reviewer: LlmProvider | None = None,
                 report: ChunkingReport | None = None) -> DocIndex:
    """Chunk, optionally review, and index a corpus. Without a reviewer every chunk is kept, with no questions."""
    chunks = chunk_corpus(read_corpus_manifest(manifest), report)
    if reviewer is not None:
        chunks = [review_and_expand(c, reviewer) for c in chunks]
    return build_index(chunks, embedder)
