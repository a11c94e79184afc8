"""Runs paradigms over the test partition, judges every answer and persists records."""
from __future__ import annotations

import json
import threading
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from ..agent import ModelLoadError, SessionRecord, StaticPipelineConfig, run_adaptive, run_static
from ..agent.loop import DocSource
from ..agent.providers import LlmProvider
from ..bql import DEFAULT_STEP_BUDGET, ExecEnvironment
from ..evalkit import EvalRecord, JudgeInput, judge, load_records
from ..forge import ToolRecord
from ..ifc import EntityGraph, load_model
from .dataset import TEST, BenchTask

PARADIGMS = ("adaptive", "static")
AUGMENTATIONS = ("none", "doc", "manual", "auto")


@dataclass(frozen=True)
class RunConfig:
    config_id: str
    paradigm: str
    augmentation: str = "none"
    provider: str = "replay"
    N: int = 20
    step_budget: int = DEFAULT_STEP_BUDGET
    seed: int = 42
    split: str = TEST

    def __post_init__(self):
        if self.paradigm not in PARADIGMS:
            raise ValueError(f"paradigm must be one of {PARADIGMS}")
        if self.augmentation not in AUGMENTATIONS:
            raise ValueError(f"augmentation must be one of {AUGMENTATIONS}")
        if self.N < 1 or self.step_budget < 1:
            raise ValueError("N and step_budget must be positive")


@dataclass
class Augmentations:
    retriever: DocSource | None = None
    manual_tools: list[ToolRecord] = field(default_factory=list)
    auto_tools: list[ToolRecord] = field(default_factory=list)


class ModelCache:
    """Thread-safe LRU of parsed models keyed by path."""

    def __init__(self, maxsize: int = 8):
        self.maxsize = maxsize
        self._items: OrderedDict[str, EntityGraph] = OrderedDict()
        self._lock = threading.Lock()
        self.loads = 0

    def get(self, path: str) -> EntityGraph:
        with self._lock:
            if path in self._items:
                self._items.move_to_end(path)
                return self._items[path]
        try:
            g = load_model(path)
        except Exception as e:
            raise ModelLoadError(f"cannot load {path}: {e}") from e
        with self._lock:
            self.loads += 1
            self._items[path] = g
            self._items.move_to_end(path)
            while len(self._items) > self.maxsize:
                self._items.popitem(last=False)
        return g


def check_no_leakage(tasks: Sequence[BenchTask], configs: Sequence[RunConfig]) -> None:
    bad_cfg = [c.config_id for c in configs if c.split != TEST]
    if bad_cfg:
        raise ValueError(f"configs must evaluate the test split only: {', '.join(bad_cfg)}")
    bad = [t.task_id for t in tasks if t.split != TEST]
    if bad:
        raise ValueError(f"non-test tasks passed to the evaluation runner: {', '.join(bad[:5])}")


def run_task(task: BenchTask, cfg: RunConfig, provider: LlmProvider, judge_provider: LlmProvider,
             aug: Augmentations, cache: ModelCache) -> tuple[EvalRecord, SessionRecord | None]:
    base = dict(task_id=task.task_id, category=task.category, config_id=cfg.config_id, project=task.project)
    try:
        env = ExecEnvironment(cache.get(task.model_path), step_budget=cfg.step_budget)
    except ModelLoadError:
        return EvalRecord(abstained=False, system_error=True, **base), None
    tools = {"manual": aug.manual_tools, "auto": aug.auto_tools}.get(cfg.augmentation, [])
    docs = aug.retriever if cfg.augmentation == "doc" else None
    if cfg.augmentation == "doc" and docs is None:
        raise ValueError(f"config {cfg.config_id} needs a documentation index")
    if cfg.paradigm == "adaptive":
        session = run_adaptive(task.question, task.model_path, provider, env, tools, cfg.N, docs,
                               session_id=task.task_id)
    else:
        session = run_static(task.question, task.model_path, provider, env, tools, docs, StaticPipelineConfig(),
                             session_id=task.task_id)
    inp = JudgeInput(task.task_id, task.question, task.ground_truth, session.answer, session, task.category,
                     task.project)
    return judge(inp, judge_provider, cfg.config_id), session


def records_path(out_dir: Path, config_id: str) -> Path:
    return out_dir / "records" / f"{config_id}.jsonl"


def sessions_path(out_dir: Path, config_id: str) -> Path:
    return out_dir / "sessions" / f"{config_id}.jsonl"


def run_matrix(tasks: Sequence[BenchTask], configs: Sequence[RunConfig], providers: Mapping[str, LlmProvider],
               judge_provider: LlmProvider, output_dir: str | Path, aug: Augmentations | None = None,
               concurrency: int = 4, cache: ModelCache | None = None,
               stop_after: int | None = None) -> dict[str, list[EvalRecord]]:
    """Evaluate every (task, config) pair not already on disk; return all records per config.

    Records are appended as they complete, so an interrupted run resumes
    where it stopped. ``stop_after`` caps new work per call (used to test
    resumption).
    """
    check_no_leakage(tasks, configs)
    out = Path(output_dir)
    (out / "records").mkdir(parents=True, exist_ok=True)
    (out / "sessions").mkdir(parents=True, exist_ok=True)
    aug = aug or Augmentations()
    cache = cache or ModelCache()
    lock = threading.Lock()
    todo = []
    for cfg in configs:
        if cfg.config_id not in providers:
            raise ValueError(f"no provider for config {cfg.config_id}")
        done = set()
        rp = records_path(out, cfg.config_id)
        if rp.exists():
            done = {r.task_id for r in load_records(rp)}
        todo += [(t, cfg) for t in sorted(tasks, key=lambda t: t.task_id) if t.task_id not in done]
    if stop_after is not None:
        todo = todo[:stop_after]

    def work(item):
        task, cfg = item
        rec, session = run_task(task, cfg, providers[cfg.config_id], judge_provider, aug, cache)
        with lock:
            with open(records_path(out, cfg.config_id), "a", encoding="utf-8") as fh:
                fh.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")
            if session is not None:
                with open(sessions_path(out, cfg.config_id), "a", encoding="utf-8") as fh:
                    fh.write(session.to_json() + "\n")

    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        list(pool.map(work, todo))
    return collect_records(out, [c.config_id for c in configs])


def collect_records(output_dir: str | Path, config_ids: Sequence[str] | None = None) -> dict[str, list[EvalRecord]]:
    out = Path(output_dir)
    if config_ids is None:
        config_ids = sorted(p.stem for p in (out / "records").glob("*.jsonl"))
    result = {}
    for cid in config_ids:
        rp = records_path(out, cid)
        recs = load_records(rp) if rp.exists() else []
        result[cid] = sorted(recs, key=lambda r: r.task_id)
    return result
