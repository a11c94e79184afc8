"""Structural chunking of documentation corpora.

Source files split at function, class and method boundaries; documents split
at section headings. Chunk ids are ``path#anchor`` and deterministic.
"""
from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field
from typing import Iterable

CODE_UNIT, DOC_SECTION = "code-unit", "doc-section"
BODY_HEAD_LINES = 40

_HEADING_RE = re.compile(r"^(#{1,6})[ \t]+(.+?)[ \t]*#*[ \t]*$")
_DEF_RE = re.compile(
    r"^(?P<indent>[ \t]*)(?:export\s+|public\s+|static\s+|async\s+)*"
    r"(?:def|function|fn|func|class|struct|interface|impl)\s+(?P<name>[A-Za-z_][\w]*)"
)


@dataclass(frozen=True)
class DocChunk:
    chunk_id: str
    kind: str
    title: str
    body: str
    reverse_questions: tuple[str, ...] = ()
    useful: bool = True
    note: str | None = None

    @property
    def text(self) -> str:
        return f"{self.title}\n{self.body}"


@dataclass
class ChunkingReport:
    chunks: list[DocChunk] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def _head(lines: list[str]) -> str:
    return "\n".join(lines[:BODY_HEAD_LINES]).rstrip()


def _unique(anchor: str, used: set[str]) -> str:
    out, n = anchor, 2
    while out in used:
        out, n = f"{anchor}-{n}", n + 1
    used.add(out)
    return out


def _python_chunks(path: str, text: str) -> list[DocChunk]:
    tree = ast.parse(text)
    lines = text.splitlines()
    out, used = [], set()

    def emit(node, qual: str, header_only: bool):
        start = min([node.lineno] + [d.lineno for d in node.decorator_list]) - 1
        end = node.end_lineno
        if header_only and node.body:
            first = node.body[0]
            doc = ast.get_docstring(node)
            end = first.end_lineno if doc is not None else first.lineno - 1
        seg = lines[start:end]
        sig = lines[node.lineno - 1].strip().rstrip(":")
        out.append(DocChunk(f"{path}#{_unique(qual, used)}", CODE_UNIT, sig, _head(seg)))

    for node in tree.body:
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            emit(node, node.name, False)
        elif isinstance(node, ast.ClassDef):
            emit(node, node.name, True)
            for sub in node.body:
                if isinstance(sub, (ast.FunctionDef, ast.AsyncFunctionDef)):
                    emit(sub, f"{node.name}.{sub.name}", False)
    return out


def _heuristic_chunks(path: str, text: str) -> list[DocChunk]:
    """Split at definition-looking lines; a unit runs until the next one at the same or lower indent."""
    lines = text.splitlines()
    starts = []
    for i, line in enumerate(lines):
        m = _DEF_RE.match(line)
        if m:
            starts.append((i, len(m.group("indent").expandtabs(4)), m.group("name")))
    out, used = [], set()
    for j, (i, indent, name) in enumerate(starts):
        end = len(lines)
        for k, ind, _ in starts[j + 1:]:
            if ind <= indent:
                end = k
                break
        out.append(DocChunk(f"{path}#{_unique(name, used)}", CODE_UNIT, lines[i].strip().rstrip("{:").strip(),
                            _head(lines[i:end])))
    return out


def _slug(title: str) -> str:
    return re.sub(r"[^0-9a-z]+", "-", title.lower()).strip("-") or "section"


def _document_chunks(path: str, text: str) -> list[DocChunk]:
    out, used = [], set()
    title, body = None, []
    in_fence = False

    def flush():
        content = "\n".join(body).strip()
        if title is None and not content:
            return
        t = title if title is not None else path.rsplit("/", 1)[-1]
        out.append(DocChunk(f"{path}#{_unique(_slug(t), used)}", DOC_SECTION, t, content))

    for line in text.splitlines():
        if line.lstrip().startswith("```"):
            in_fence = not in_fence
        m = None if in_fence else _HEADING_RE.match(line)
        if m:
            flush()
            title, body = m.group(2), []
        else:
            body.append(line)
    flush()
    return out


def chunk_file(path: str, kind: str, text: str, report: ChunkingReport) -> list[DocChunk]:
    if kind not in ("source", "document"):
        raise ValueError(f"kind must be 'source' or 'document', got {kind!r}")
    try:
        if kind == "document":
            chunks = _document_chunks(path, text)
        elif path.endswith(".py"):
            chunks = _python_chunks(path, text)
        else:
            chunks = _heuristic_chunks(path, text)
    except SyntaxError as e:
        report.diagnostics.append(f"{path}: unparseable ({e.msg}, line {e.lineno}); kept as one chunk")
        chunks = []
    else:
        if chunks or not text.strip():
            return chunks
        report.diagnostics.append(f"{path}: no structure found; kept as one chunk")
    name = path.rsplit("/", 1)[-1]
    kind_ = DOC_SECTION if kind == "document" else CODE_UNIT
    return [DocChunk(f"{path}#whole", kind_, name, _head(text.splitlines()))]


def chunk_corpus(files: Iterable[tuple[str, str, str]], report: ChunkingReport | None = None) -> list[DocChunk]:
    """Chunk ``(path, kind, text)`` triples in the order given."""
    report = report if report is not None else ChunkingReport()
    for path, kind, text in files:
        report.chunks.extend(chunk_file(path, kind, text, report))
    return report.chunks
