"""Tool-generation training: a finite state machine over seven provider-backed roles.

Path A (correct answer) may create a tool; Path B (wrong answer) may debug
one. Both converge on TestTool, where the answer generator re-runs the
question with the candidate installed, and AssessTool, an independent
provider call that decides whether the candidate is kept.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from ..agent import ABSTAINED, ABSTENTION_TEXT, SessionRecord, run_adaptive
from ..agent.providers import LlmProvider
from ..bql import ExecEnvironment, ToolLoadError, parse
from .repository import ToolRecord, ToolRepository, prune_and_record, tools_called

GENERATE, VERIFY, IDENTIFY, ANALYZE = "Generate", "Verify", "IdentifyTool", "AnalyzeError"
CREATE, DEBUG, TEST, ASSESS, PERSIST, SKIP = "CreateTool", "DebugTool", "TestTool", "AssessTool", "Persist", "Skip"
CORRECT, WRONG = "correct", "wrong"
REFINEMENT_TURNS = 3

VERIFIER_PROMPT = (
    "You are the answer verifier. Compare the system answer with the ground truth. Reply with JSON only: "
    '{"verdict": "correct"} or {"verdict": "wrong"} or {"verdict": "abstained"}.\n'
)
IDENTIFIER_PROMPT = (
    "You are the tool identifier. Given a correctly answered question and its exploration trace, decide whether "
    "a reusable BQL helper function would make similar questions easier. Reply with JSON only: "
    '{"create": true, "name": "...", "description": "..."} or {"create": false}.\n'
)
ANALYST_PROMPT = (
    "You are the error analyst. Given a wrongly answered question, the ground truth and the trace, decide whether "
    'an installed tool caused the error. Reply with JSON only: {"faulty_tool": "name"} or {"faulty_tool": null}.\n'
)
CREATOR_PROMPT = (
    "You are the tool creator. Write one BQL function implementing the requested helper. Reply with the source "
    "in a fenced block tagged tool:\n```tool\nfn name(args) { ... }\n```\n"
)
DEBUGGER_PROMPT = (
    "You are the tool debugger. Fix the faulty BQL tool so that the question is answered correctly. Keep its "
    "name. Reply with the source in a fenced block tagged tool:\n```tool\nfn name(args) { ... }\n```\n"
)
ASSESSOR_PROMPT = (
    "You are the tool assessor. Judge independently whether the candidate tool contributed to a correct answer "
    'in the test run and is general enough to keep. Reply with JSON only: {"accept": true} or {"accept": false}.\n'
)

_JSON_RE = re.compile(r"\{.*\}", re.S)
_TOOL_FENCE_RE = re.compile(r"```tool[ \t]*\r?\n(.*?)(?:\r?\n)?```", re.S)


class RoleReplyError(ValueError):
    pass


@dataclass(frozen=True)
class TrainingTask:
    task_id: str
    question: str
    ground_truth: str
    model_path: str


@dataclass
class TrainingState:
    task: TrainingTask
    phase: str = GENERATE
    verdict: str | None = None
    candidate_tool: ToolRecord | None = None
    action: str | None = None  # created | debugged, on Persist
    session: SessionRecord | None = None
    test_session: SessionRecord | None = None
    transcript: list[tuple[str, str]] = field(default_factory=list)

    @property
    def terminal(self) -> bool:
        return self.phase in (PERSIST, SKIP)

    def go(self, phase: str, summary: str) -> None:
        self.transcript.append((self.phase, summary))
        self.phase = phase


def _json_reply(raw: str) -> dict:
    m = _JSON_RE.search(raw)
    try:
        d = json.loads(m.group(0)) if m else None
    except json.JSONDecodeError:
        d = None
    if not isinstance(d, dict):
        raise RoleReplyError("reply is not a JSON object")
    return d


def _ask(provider: LlmProvider, system: str, body: str, sid: str) -> dict:
    return _json_reply(provider.complete(system, [{"role": "user", "content": body}], sid))


def _context(task: TrainingTask, session: SessionRecord) -> str:
    return f"Ground truth: {task.ground_truth}\n\n{session.transcript()}"


def _signature(source: str) -> tuple[str, str]:
    decl = parse(source)[0]
    return decl.name, "(" + ", ".join(decl.fn.params) + ")"


def _write_tool(provider: LlmProvider, system: str, brief: str, sid: str, env: ExecEnvironment,
                state: TrainingState) -> str | None:
    """Ask for tool source until it installs, up to REFINEMENT_TURNS replies."""
    messages = [{"role": "user", "content": brief}]
    for _ in range(REFINEMENT_TURNS):
        raw = provider.complete(system, list(messages), sid)
        m = _TOOL_FENCE_RE.search(raw)
        if m is None:
            problem = "no ```tool block found"
        else:
            try:
                env.install_tool(m.group(1))
                return m.group(1)
            except ToolLoadError as e:
                problem = f"tool does not load (line {e.line}): {e}"
        state.transcript.append((state.phase, problem))
        messages += [{"role": "assistant", "content": raw}, {"role": "user", "content": problem}]
    return None


def run_training_step(task: TrainingTask, repo: ToolRepository, provider: LlmProvider,
                      env_factory: Callable[[str], ExecEnvironment], question_index: int = 0,
                      N: int = 20) -> TrainingState:
    """Drive one tuple through the state machine to Persist or Skip. Never raises on role failures."""
    st = TrainingState(task)
    tid = task.task_id
    try:
        # Generate
        st.session = run_adaptive(task.question, task.model_path, provider, env_factory(task.model_path),
                                  repo.active, N, session_id=tid)
        st.go(VERIFY, f"generator finished: {st.session.outcome}")
        # Verify
        if st.session.outcome == ABSTAINED or st.session.answer == ABSTENTION_TEXT:
            st.verdict = ABSTAINED
        elif st.session.answer is None:
            st.go(SKIP, f"generator failed: {st.session.reason}")
            return st
        else:
            body = f"Question: {task.question}\nGround truth: {task.ground_truth}\nSystem answer: {st.session.answer}"
            v = _ask(provider, VERIFIER_PROMPT, body, f"{tid}:verify").get("verdict")
            if v not in (CORRECT, WRONG, ABSTAINED):
                raise RoleReplyError(f"unknown verdict {v!r}")
            st.verdict = v
        if st.verdict == ABSTAINED:
            st.go(SKIP, "abstained")
            return st

        env = env_factory(task.model_path)
        others = [t for t in repo.active]
        if st.verdict == CORRECT:
            st.go(IDENTIFY, "answer correct")
            d = _ask(provider, IDENTIFIER_PROMPT, _context(task, st.session), f"{tid}:identify")
            if d.get("create") is not True:
                st.go(SKIP, "no tool recommended")
                return st
            name, description = str(d.get("name", "")), str(d.get("description", ""))
            st.go(CREATE, f"recommend {name}")
            for t in others:
                env.install_tool(t)
            brief = f"Tool name: {name}\nPurpose: {description}\n\n{_context(task, st.session)}"
            source = _write_tool(provider, CREATOR_PROMPT, brief, f"{tid}:create", env, st)
            action = "created"
        else:
            st.go(ANALYZE, "answer wrong")
            d = _ask(provider, ANALYST_PROMPT, _context(task, st.session), f"{tid}:analyze")
            faulty = d.get("faulty_tool")
            old = repo.get(faulty) if isinstance(faulty, str) else None
            if old is None:
                st.go(SKIP, "no faulty tool identified")
                return st
            name, description = old.name, old.description
            st.go(DEBUG, f"debug {name}")
            others = [t for t in others if t.name != name]
            for t in others:
                env.install_tool(t)
            brief = f"Faulty tool source:\n{old.source}\n\n{_context(task, st.session)}"
            source = _write_tool(provider, DEBUGGER_PROMPT, brief, f"{tid}:debug", env, st)
            action = "debugged"
        if source is None:
            st.go(SKIP, f"no loadable tool after {REFINEMENT_TURNS} turns")
            return st
        tname, sig = _signature(source)
        if action == "debugged" and tname != name:
            st.go(SKIP, f"debugger renamed {name} to {tname}")
            return st
        if action == "created" and repo.get(tname) is not None:
            st.go(SKIP, f"a tool named {tname} already exists")
            return st
        st.candidate_tool = ToolRecord(tname, sig, description, source, created_at_question=question_index)
        st.go(TEST, f"candidate {tname}{sig}")

        # TestTool: re-run the generator with the candidate installed
        st.test_session = run_adaptive(task.question, task.model_path, provider, env_factory(task.model_path),
                                       [*others, st.candidate_tool], N, session_id=f"{tid}:test")
        if tname not in tools_called(st.test_session.code_blocks):
            st.go(SKIP, "candidate not used in test run")
            return st
        st.go(ASSESS, f"test run {st.test_session.outcome}: {st.test_session.answer}")
        body = (f"Candidate tool:\n{source}\n\nTest run:\n{_context(task, st.test_session)}")
        if _ask(provider, ASSESSOR_PROMPT, body, f"{tid}:assess").get("accept") is not True:
            st.go(SKIP, "assessment negative")
            return st
        if action == "debugged":
            st.candidate_tool.created_at_question = repo.get(tname).created_at_question
        repo.upsert(st.candidate_tool)
        st.action = action
        st.go(PERSIST, f"{action} {tname}")
        return st
    except Exception as e:  # one bad tuple never stops training
        st.go(SKIP, f"{type(e).__name__}: {e}")
        return st


@dataclass
class TrainingReport:
    created: list[str] = field(default_factory=list)
    debugged: list[str] = field(default_factory=list)
    pruned: list[str] = field(default_factory=list)
    outcomes: list[tuple[str, str]] = field(default_factory=list)  # (task_id, terminal phase)
    tool_stats: list[dict] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def run_training(partition: Sequence, repo: ToolRepository, provider: LlmProvider,
                 env_factory: Callable[[str], ExecEnvironment], test_ids: Iterable[str] = (),
                 N: int = 20) -> TrainingReport:
    """Sequential pass: step, then usage statistics, then pruning, for every tuple.

    Tuples carrying ``split == "test"`` or listed in ``test_ids`` abort the run
    before any work is done.
    """
    test_ids = set(test_ids)
    leaked = [t.task_id for t in partition if getattr(t, "split", None) == "test" or t.task_id in test_ids]
    if leaked:
        raise ValueError(f"test-split tasks in training partition: {', '.join(leaked[:5])}")
    report = TrainingReport()
    for i, t in enumerate(partition):
        task = TrainingTask(t.task_id, t.question, t.ground_truth, str(t.model_path))
        st = run_training_step(task, repo, provider, env_factory, i, N)
        report.outcomes.append((task.task_id, st.phase))
        if st.phase == SKIP and st.transcript:
            report.diagnostics.append(f"{task.task_id}: {st.transcript[-1][1]}")
        if st.action == "created":
            report.created.append(st.candidate_tool.name)
        elif st.action == "debugged":
            report.debugged.append(st.candidate_tool.name)
        report.pruned += prune_and_record(repo, st.session, st.verdict == CORRECT, i)
    report.tool_stats = [t.to_dict() for t in repo.records]
    report.diagnostics += repo.diagnostics
    return report
