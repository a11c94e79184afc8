"""The bounded tool repository and its usage-based pruning."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from ..bql import BQLSyntaxError, called_names

DEFAULT_CAPACITY = 16
DEFAULT_GRACE = 10
ACTIVE, PRUNED = "active", "pruned"


@dataclass
class ToolRecord:
    name: str
    signature: str
    description: str
    source: str
    created_at_question: int = 0
    calls: int = 0
    available_count: int = 0
    success_contributions: int = 0
    status: str = ACTIVE
    manual: bool = False

    @property
    def r_call(self) -> float:
        return self.calls / max(self.available_count, 1)

    @property
    def r_succ(self) -> float:
        return self.success_contributions / max(self.calls, 1)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ToolRecord":
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})


def deletion_score(t: ToolRecord) -> float:
    """Half unused share plus half unsuccessful share; 0 is the best tool, 1 the worst."""
    return (1 - t.r_call) / 2 + (1 - t.r_succ) / 2


class ToolRepository:
    def __init__(self, records: list[ToolRecord] | None = None, capacity: int = DEFAULT_CAPACITY,
                 grace: int = DEFAULT_GRACE):
        if capacity < 1 or grace < 0:
            raise ValueError("capacity must be positive and grace non-negative")
        self.records: list[ToolRecord] = list(records or [])
        self.capacity = capacity
        self.grace = grace
        self.diagnostics: list[str] = []

    @property
    def active(self) -> list[ToolRecord]:
        return [t for t in self.records if t.status == ACTIVE]

    def get(self, name: str) -> ToolRecord | None:
        for t in self.records:
            if t.name == name and t.status == ACTIVE:
                return t
        return None

    def __len__(self) -> int:
        return len(self.active)

    def upsert(self, tool: ToolRecord) -> None:
        """Insert a new tool, or replace the source of the active tool with that name."""
        old = self.get(tool.name)
        if old is None:
            self.records.append(tool)
        else:
            old.source, old.signature, old.description = tool.source, tool.signature, tool.description

    def in_grace(self, t: ToolRecord, current_question: int) -> bool:
        return current_question - t.created_at_question < self.grace

    def prune(self, current_question: int) -> list[str]:
        """Remove the worst past-grace tools until the repository fits its capacity."""
        removed = []
        while len(self.active) > self.capacity:
            eligible = [t for t in self.active if not self.in_grace(t, current_question)]
            if not eligible:
                self.diagnostics.append(
                    f"question {current_question}: {len(self.active)} active tools exceed capacity "
                    f"{self.capacity} but all are in their grace period")
                break
            worst = min(eligible, key=lambda t: (-deletion_score(t), t.created_at_question, t.name))
            worst.status = PRUNED
            removed.append(worst.name)
        return removed

    def save(self, path: str | Path) -> None:
        Path(path).write_text("".join(json.dumps(t.to_dict(), ensure_ascii=False) + "\n" for t in self.records),
                              encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, capacity: int = DEFAULT_CAPACITY, grace: int = DEFAULT_GRACE) -> "ToolRepository":
        with open(path, encoding="utf-8") as fh:
            recs = [ToolRecord.from_dict(json.loads(line)) for line in fh if line.strip()]
        return cls(recs, capacity, grace)


def tools_called(code_blocks) -> set[str]:
    names: set[str] = set()
    for code in code_blocks:
        try:
            names |= called_names(code)
        except (BQLSyntaxError, RecursionError):
            continue
    return names


def record_usage(repo: ToolRepository, session, correct: bool) -> None:
    """Per-question counters: availability, any call, and calls in a correct session."""
    used = tools_called(session.code_blocks)
    for name in session.tools:
        t = repo.get(name)
        if t is None:
            continue
        t.available_count += 1
        if name in used:
            t.calls += 1
            if correct:
                t.success_contributions += 1


def prune_and_record(repo: ToolRepository, session, correct: bool, current_question: int) -> list[str]:
    if session is not None:
        record_usage(repo, session, correct)
    return repo.prune(current_question)
