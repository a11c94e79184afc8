from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable

CRITERIA = ("faithfulness", "completeness", "transparency", "relevance")


@dataclass(frozen=True)
class EvalRecord:
    task_id: str
    category: int
    abstained: bool
    faithfulness: bool | None = None
    completeness: bool | None = None
    transparency: bool | None = None
    relevance: bool | None = None
    system_error: bool = False
    config_id: str = ""
    project: str = ""

    @property
    def correct(self) -> bool:
        return not self.system_error and not self.abstained and all(getattr(self, c) is True for c in CRITERIA)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EvalRecord":
        return cls(**d)


def save_records(records: Iterable[EvalRecord], path: str | Path, append: bool = False) -> None:
    with open(path, "a" if append else "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r.to_dict(), ensure_ascii=False) + "\n")


def load_records(path: str | Path) -> list[EvalRecord]:
    with open(path, encoding="utf-8") as fh:
        return [EvalRecord.from_dict(json.loads(line)) for line in fh if line.strip()]
