"""The full, serializable trace of one question-answering session."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from ..bql import ExecResult

PENDING, ANSWERED, ABSTAINED, SYSTEM_ERROR = "pending", "answered", "abstained", "system_error"


class ModelLoadError(RuntimeError):
    pass


@dataclass
class Step:
    reasoning: str
    code: str
    result: ExecResult


@dataclass
class Exchange:
    """One provider call, stored exactly as sent and received."""
    session_id: str
    system: str
    messages: list[dict]
    response: str | None


@dataclass
class SessionRecord:
    session_id: str
    question: str
    model_path: str
    mode: str  # adaptive | static
    max_iterations: int
    tools: list[str] = field(default_factory=list)
    doc_context: list[str] | None = None
    history: list[Step] = field(default_factory=list)
    exchanges: list[Exchange] = field(default_factory=list)
    outcome: str = PENDING
    answer: str | None = None
    reason: str | None = None
    executions: int = 0
    diagnostics: list[str] = field(default_factory=list)

    def finish(self, outcome: str, answer: str | None = None, reason: str | None = None) -> "SessionRecord":
        if self.outcome != PENDING:
            raise RuntimeError(f"session already finished as {self.outcome}")
        self.outcome, self.answer, self.reason = outcome, answer, reason
        return self

    @property
    def code_blocks(self) -> list[str]:
        return [s.code for s in self.history]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["history"] = [{"reasoning": s.reasoning, "code": s.code, "result": s.result.to_dict()} for s in self.history]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SessionRecord":
        d = dict(d)
        d["history"] = [Step(s["reasoning"], s["code"], ExecResult.from_dict(s["result"])) for s in d["history"]]
        d["exchanges"] = [Exchange(**e) for e in d["exchanges"]]
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True)

    def transcript(self) -> str:
        """Human-readable trace, as given to the judge."""
        out = [f"Question: {self.question}", f"Mode: {self.mode}"]
        for i, s in enumerate(self.history, 1):
            out.append(f"--- step {i} ---")
            if s.reasoning:
                out.append(s.reasoning)
            out.append("code:\n" + s.code)
            out.append("result:\n" + s.result.feedback())
        out.append(f"Outcome: {self.outcome}" + (f" ({self.reason})" if self.reason else ""))
        if self.answer is not None:
            out.append(f"Answer: {self.answer}")
        return "\n".join(out)
