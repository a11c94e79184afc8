"""Matrix configuration files: configs, providers, judge and augmentation resources."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..agent import HttpChatProvider, ReplayProvider
from ..agent.providers import LlmProvider
from ..evalkit import ReferenceJudgeProvider
from ..forge import ToolRepository
from ..retrieval import HashingEmbedder, RetrievalConfig, Retriever, index_corpus, load_index
from .runner import Augmentations, RunConfig


@dataclass
class MatrixSpec:
    configs: list[RunConfig]
    providers: dict[str, LlmProvider]
    judge: LlmProvider
    aug: Augmentations = field(default_factory=Augmentations)
    seed: int = 42
    resamples: int = 10_000
    concurrency: int = 4


def make_provider(spec: dict, base: Path) -> LlmProvider:
    kind = spec.get("kind")
    if kind == "replay":
        return ReplayProvider.from_jsonl(base / spec["script"])
    if kind == "reference":
        return ReferenceJudgeProvider()
    if kind == "http":
        return HttpChatProvider(spec["base_url"], spec["model"], float(spec.get("temperature", 0.0)))
    raise ValueError(f"unknown provider kind {kind!r}")


def load_matrix(path: str | Path) -> MatrixSpec:
    path = Path(path)
    base = path.parent
    d = json.loads(path.read_text(encoding="utf-8"))
    configs, providers = [], {}
    for c in d["configs"]:
        cfg = RunConfig(c["config_id"], c["paradigm"], c.get("augmentation", "none"),
                        c["provider"].get("kind", "replay"), int(c.get("N", 20)), seed=int(d.get("seed", 42)))
        configs.append(cfg)
        providers[cfg.config_id] = make_provider(c["provider"], base)
    aug = Augmentations()
    docs = d.get("docs")
    if docs:
        embedder = HashingEmbedder(int(docs.get("dim", 256)))
        if "index" in docs:
            index = load_index(base / docs["index"])
        else:
            reviewer = make_provider(docs["reviewer"], base) if "reviewer" in docs else None
            index = index_corpus(base / docs["corpus"], embedder, reviewer)
        aug.retriever = Retriever(index, embedder, RetrievalConfig(**docs.get("retrieval", {})))
    tools = d.get("tools", {})
    if "manual" in tools:
        aug.manual_tools = ToolRepository.load(base / tools["manual"]).active
    if "auto" in tools:
        aug.auto_tools = ToolRepository.load(base / tools["auto"]).active
    return MatrixSpec(configs, providers, make_provider(d.get("judge", {"kind": "reference"}), base), aug,
                      int(d.get("seed", 42)), int(d.get("resamples", 10_000)), int(d.get("concurrency", 4)))
