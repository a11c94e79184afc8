"""The adaptive exploration loop and the static single-pass baseline."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

from ..bql import ExecEnvironment, ToolLoadError, grammar_text
from ..ifc import load_model
from .prompts import (
    ABSTENTION_TEXT,
    PLANNER_PROMPT,
    PROTOCOL_REMINDER,
    STATIC_FINAL_INSTRUCTION,
    SourcingPolicy,
    ToolDescription,
    build_system_prompt,
    observation_message,
    question_message,
)
from .protocol import FinalAnswer, ProtocolError, parse_agent_response
from .providers import LlmProvider, ProviderError
from .session import ABSTAINED, ANSWERED, SYSTEM_ERROR, Exchange, ModelLoadError, SessionRecord, Step

DEFAULT_MAX_ITERATIONS = 20
DEFAULT_CONTEXT_BUDGET = 60_000
PROTOCOL_RETRIES = 2
OUTPUT_STUB = "[output truncated]"


class DocSource(Protocol):
    def search(self, query: str) -> list: ...
    def retrieve(self, query: str) -> str: ...


@dataclass(frozen=True)
class StaticPipelineConfig:
    max_planner_queries: int = 5
    max_prefetch_chunks: int = 10

    def __post_init__(self):
        if self.max_planner_queries < 1 or self.max_prefetch_chunks < 1:
            raise ValueError("StaticPipelineConfig fields must be positive")


def open_environment(model_path: str, env: ExecEnvironment | None) -> ExecEnvironment:
    if env is not None:
        return env
    try:
        return ExecEnvironment(load_model(model_path))
    except Exception as e:
        raise ModelLoadError(f"cannot load {model_path}: {e}") from e


def _install(env: ExecEnvironment, tools: Iterable[ToolDescription], rec: SessionRecord) -> list:
    ok = []
    for t in tools:
        try:
            env.install_tool(t)
        except ToolLoadError as e:
            rec.diagnostics.append(f"tool {t.name} not installed: {e}")
            continue
        ok.append(t)
    rec.tools = [t.name for t in ok]
    return ok


class _Conversation:
    """Provider calls for one session id, with trace recording and protocol retries."""

    def __init__(self, provider: LlmProvider, rec: SessionRecord, session_id: str, system: str):
        self.provider, self.rec, self.session_id, self.system = provider, rec, session_id, system
        self.messages: list[dict] = []

    def ask(self, budget: int | None = None) -> str:
        sent = _fit(self.messages, budget) if budget else [dict(m) for m in self.messages]
        ex = Exchange(self.session_id, self.system, sent, None)
        self.rec.exchanges.append(ex)
        ex.response = self.provider.complete(self.system, sent, self.session_id)
        return ex.response

    def ask_parsed(self, budget: int | None = None):
        """Returns ``(raw, response)``; response is None after exhausting protocol retries."""
        for attempt in range(PROTOCOL_RETRIES + 1):
            raw = self.ask(budget)
            try:
                return raw, parse_agent_response(raw)
            except ProtocolError:
                if attempt == PROTOCOL_RETRIES:
                    return raw, None
                self.messages += [{"role": "assistant", "content": raw}, {"role": "user", "content": PROTOCOL_REMINDER}]
        raise AssertionError("unreachable")


def _fit(messages: Sequence[dict], budget: int) -> list[dict]:
    """Replace the oldest observations by stubs until the history fits the character budget."""
    out = [dict(m) for m in messages]
    total = sum(len(m["content"]) for m in out)
    for m in out[1:]:
        if total <= budget:
            break
        if m["role"] == "user" and m["content"] != OUTPUT_STUB:
            total -= len(m["content"]) - len(OUTPUT_STUB)
            m["content"] = OUTPUT_STUB
    return out


def _final(rec: SessionRecord, fa: FinalAnswer) -> SessionRecord:
    if fa.answer.strip() == ABSTENTION_TEXT:
        return rec.finish(ABSTAINED, ABSTENTION_TEXT, "agent declared")
    return rec.finish(ANSWERED, fa.answer)


def run_adaptive(q: str, model_path: str, provider: LlmProvider, env: ExecEnvironment | None = None,
                 tools: Iterable[ToolDescription] = (), N: int = DEFAULT_MAX_ITERATIONS,
                 doc_index: DocSource | None = None, *, session_id: str | None = None,
                 context_budget: int = DEFAULT_CONTEXT_BUDGET,
                 sourcing_policy: SourcingPolicy | None = None) -> SessionRecord:
    """Iterative exploration: ask, execute, observe, until a final answer or N actions."""
    if N < 1:
        raise ValueError("N must be at least 1")
    sid = session_id or q
    rec = SessionRecord(sid, q, str(model_path), "adaptive", N)
    env = open_environment(model_path, env)
    start = env.executions
    installed = _install(env, tools, rec)
    if doc_index is not None:
        env.enable_docs(doc_index.retrieve)
    system = build_system_prompt(installed, grammar_text(), sourcing_policy, docs_builtin=doc_index is not None)
    conv = _Conversation(provider, rec, sid, system)
    conv.messages.append({"role": "user", "content": question_message(q)})
    try:
        while len(rec.history) < N:
            raw, resp = conv.ask_parsed(context_budget)
            if resp is None:
                return rec.finish(ABSTAINED, ABSTENTION_TEXT, "protocol failure")
            if isinstance(resp, FinalAnswer):
                return _final(rec, resp)
            result = env.execute(resp.code)
            rec.history.append(Step(resp.reasoning, resp.code, result))
            conv.messages += [{"role": "assistant", "content": raw},
                              {"role": "user", "content": observation_message(result.feedback())}]
        return rec.finish(ABSTAINED, ABSTENTION_TEXT, "iteration limit")
    except ProviderError as e:
        return rec.finish(SYSTEM_ERROR, None, f"provider error: {e}")
    finally:
        rec.executions = env.executions - start


def plan_queries(raw: str, limit: int) -> list[str]:
    out = []
    for line in raw.splitlines():
        line = line.strip().lstrip("-*0123456789.) ").strip()
        if line and line not in out:
            out.append(line)
    return out[:limit]


def prefetch(doc_index: DocSource, queries: Sequence[str], limit: int) -> list:
    seen, chunks = set(), []
    for query in queries:
        for c in doc_index.search(query):
            if c.chunk_id not in seen:
                seen.add(c.chunk_id)
                chunks.append(c)
    return chunks[:limit]


def run_static(q: str, model_path: str, provider: LlmProvider, env: ExecEnvironment | None = None,
               tools: Iterable[ToolDescription] = (), doc_index: DocSource | None = None,
               cfg: StaticPipelineConfig = StaticPipelineConfig(), *, session_id: str | None = None,
               sourcing_policy: SourcingPolicy | None = None) -> SessionRecord:
    """Single pass: optional documentation planning, one program, one execution, one final turn."""
    from ..retrieval import format_blocks

    sid = session_id or q
    rec = SessionRecord(sid, q, str(model_path), "static", 1)
    env = open_environment(model_path, env)
    start = env.executions
    installed = _install(env, tools, rec)
    try:
        context = None
        if doc_index is not None:
            planner = _Conversation(provider, rec, f"{sid}:plan", PLANNER_PROMPT)
            planner.messages.append({"role": "user", "content": question_message(q)})
            queries = plan_queries(planner.ask(), cfg.max_planner_queries)
            chunks = prefetch(doc_index, queries, cfg.max_prefetch_chunks)
            context = format_blocks(chunks)
            rec.doc_context = [c.chunk_id for c in chunks]
        system = build_system_prompt(installed, grammar_text(), sourcing_policy, static=True)
        conv = _Conversation(provider, rec, sid, system)
        conv.messages.append({"role": "user", "content": question_message(q, context)})
        raw, resp = conv.ask_parsed()
        if resp is None:
            return rec.finish(ABSTAINED, ABSTENTION_TEXT, "protocol failure")
        if isinstance(resp, FinalAnswer):
            return _final(rec, resp)
        result = env.execute(resp.code)
        rec.history.append(Step(resp.reasoning, resp.code, result))
        conv.messages += [{"role": "assistant", "content": raw},
                          {"role": "user", "content": observation_message(result.feedback()) + "\n\n"
                           + STATIC_FINAL_INSTRUCTION}]
        for attempt in range(2):
            raw, resp = conv.ask_parsed()
            if isinstance(resp, FinalAnswer):
                return _final(rec, resp)
            if resp is None or attempt == 1:
                break
            conv.messages += [{"role": "assistant", "content": raw},
                              {"role": "user", "content": STATIC_FINAL_INSTRUCTION}]
        return rec.finish(ABSTAINED, ABSTENTION_TEXT, "no final answer")
    except ProviderError as e:
        return rec.finish(SYSTEM_ERROR, None, f"provider error: {e}")
    finally:
        rec.executions = env.executions - start
