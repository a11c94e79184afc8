"""Benchmark tasks: manifest loading and the stratified train/test split."""
from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Sequence

CATEGORIES = (1, 2, 3, 4)
TRAIN, TEST = "train_dev", "test"
SPLIT_PRNG = "cobbie-split-v1"


class SchemaError(ValueError):
    def __init__(self, index: int, message: str):
        super().__init__(f"task {index}: {message}")
        self.index = index


class MissingModel(FileNotFoundError):
    def __init__(self, paths: Sequence[str]):
        super().__init__("missing model files: " + ", ".join(paths))
        self.paths = list(paths)


@dataclass(frozen=True)
class BenchTask:
    task_id: str
    question: str
    model_path: str
    ground_truth: str
    category: int
    project: str = ""
    split: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


_REQUIRED = {"task_id": str, "question": str, "model_path": str, "ground_truth": str, "category": int}


def _validate(i: int, d) -> BenchTask:
    if not isinstance(d, dict):
        raise SchemaError(i, "not a JSON object")
    for key, typ in _REQUIRED.items():
        if key not in d:
            raise SchemaError(i, f"missing field {key!r}")
        if not isinstance(d[key], typ) or isinstance(d[key], bool):
            raise SchemaError(i, f"field {key!r} must be {typ.__name__}")
    if d["category"] not in CATEGORIES:
        raise SchemaError(i, f"category must be one of {CATEGORIES}, got {d['category']}")
    split = d.get("split")
    if split not in (None, TRAIN, TEST):
        raise SchemaError(i, f"split must be {TRAIN!r} or {TEST!r}")
    extra = set(d) - set(_REQUIRED) - {"project", "split"}
    if extra:
        raise SchemaError(i, f"unknown fields {sorted(extra)}")
    return BenchTask(d["task_id"], d["question"], d["model_path"], d["ground_truth"], d["category"],
                     str(d.get("project", "")), split)


def load_dataset(manifest_path: str | Path, check_models: bool = True) -> list[BenchTask]:
    """Read a JSONL manifest; model paths resolve relative to the manifest's directory."""
    manifest_path = Path(manifest_path)
    base = manifest_path.parent
    tasks, seen = [], set()
    with open(manifest_path, encoding="utf-8") as fh:
        rows = [line for line in fh if line.strip()]
    for i, line in enumerate(rows):
        try:
            d = json.loads(line)
        except json.JSONDecodeError as e:
            raise SchemaError(i, f"invalid JSON: {e.msg}") from None
        t = _validate(i, d)
        if t.task_id in seen:
            raise SchemaError(i, f"duplicate task_id {t.task_id!r}")
        seen.add(t.task_id)
        path = Path(t.model_path)
        tasks.append(replace(t, model_path=str(path if path.is_absolute() else (base / path).resolve())))
    if check_models:
        missing = sorted({t.model_path for t in tasks if not Path(t.model_path).is_file()})
        if missing:
            raise MissingModel(missing)
    return tasks


def stratified_split(tasks: Sequence[BenchTask], fraction: float = 0.5, seed: int = 42
                     ) -> tuple[list[BenchTask], list[BenchTask]]:
    """Per category: sort by id, shuffle with a seeded PRNG, first ``floor(n * fraction)`` go to train_dev.

    Tasks that already carry a split label keep it.
    """
    if not tasks:
        raise ValueError("cannot split an empty task list")
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must lie in [0, 1]")
    train = [t for t in tasks if t.split == TRAIN]
    test = [t for t in tasks if t.split == TEST]
    for cat in CATEGORIES:
        group = sorted((t for t in tasks if t.split is None and t.category == cat), key=lambda t: t.task_id)
        random.Random(f"{SPLIT_PRNG}:{seed}:{cat}").shuffle(group)
        cut = math.floor(len(group) * fraction)
        train += [replace(t, split=TRAIN) for t in group[:cut]]
        test += [replace(t, split=TEST) for t in group[cut:]]
    key = lambda t: t.task_id  # noqa: E731
    return sorted(train, key=key), sorted(test, key=key)
