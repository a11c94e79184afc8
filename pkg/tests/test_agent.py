import json

import httpx
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from cobbie.agent import (
    ABSTAINED,
    ABSTENTION_TEXT,
    ANSWERED,
    SYSTEM_ERROR,
    CodeAction,
    FinalAnswer,
    HttpChatProvider,
    ModelLoadError,
    ProtocolError,
    ProviderError,
    RecordingProvider,
    ReplayProvider,
    SessionRecord,
    SourcingPolicy,
    StaticPipelineConfig,
    build_system_prompt,
    format_action,
    format_final,
    parse_agent_response,
    plan_queries,
    run_adaptive,
    run_static,
    turn_index,
)
from cobbie.bql import ExecEnvironment, grammar_text
from cobbie.forge import ToolRecord
from cobbie.ifc import load_model
from cobbie.retrieval import DocChunk

from conftest import MODELS, golden

OFFICE = str(MODELS / "office.ifc")


class Scripted:
    """Provider answering from a list of replies per session id, in order, recording what it saw."""

    def __init__(self, replies: dict[str, list[str]]):
        self.replies = {k: list(v) for k, v in replies.items()}
        self.seen: list[tuple[str, list[dict]]] = []

    def complete(self, system_prompt, messages, session_id):
        self.seen.append((session_id, [dict(m) for m in messages]))
        queue = self.replies.get(session_id)
        if not queue:
            raise ProviderError(f"no reply for {session_id}")
        return queue.pop(0)


@pytest.fixture
def env():
    return ExecEnvironment(load_model(OFFICE))


# --- protocol -------------------------------------------------------------------

def test_parse_action():
    r = parse_agent_response("look at walls\n```action\nprint(1)\nprint(2)\n```\ntrailing")
    assert r == CodeAction("look at walls", "print(1)\nprint(2)")


def test_parse_final_wins_over_action():
    r = parse_agent_response("```action\nprint(1)\n```\nFINAL: 3 walls")
    assert isinstance(r, FinalAnswer) and r.answer == "3 walls"


def test_parse_final_must_start_a_line():
    with pytest.raises(ProtocolError):
        parse_agent_response("the answer is FINAL: 3")
    with pytest.raises(ProtocolError):
        parse_agent_response("```python\nprint(1)\n```")


@given(st.text(alphabet=st.characters(blacklist_characters="`", blacklist_categories=("Cs",)), max_size=40)
       .filter(lambda s: "FINAL:" not in s),
       st.text(alphabet=st.characters(blacklist_characters="`\r", blacklist_categories=("Cs",)), min_size=1, max_size=40)
       .filter(lambda s: "FINAL:" not in s and not s.endswith("\n")))
def test_format_action_roundtrip(reasoning, code):
    r = parse_agent_response(format_action(code, reasoning))
    assert r == CodeAction(reasoning.strip(), code)


def test_format_final_roundtrip():
    assert parse_agent_response(format_final("42 m2", "sum of spaces")) == FinalAnswer("sum of spaces", "42 m2")


# --- prompts --------------------------------------------------------------------

def test_system_prompt_golden():
    tool = ToolRecord(name="elements_on", signature="(level)", source='fn elements_on(level) { contained(level) }',
                      description="Elements contained in a storey.")
    text = build_system_prompt([tool], grammar_text())
    assert text == golden("system_prompt.txt", text)
    assert "- elements_on(level): Elements contained in a storey." in text


def test_system_prompt_variants():
    adaptive = build_system_prompt([], grammar_text())
    static = build_system_prompt([], grammar_text(), static=True)
    docs = build_system_prompt([], grammar_text(), docs_builtin=True)
    assert "## Tools" not in adaptive and "exactly one chance" in static
    assert "## Documentation" in docs and "## Documentation" not in adaptive
    policy = SourcingPolicy.default()
    assert len(policy.sourcing_tiers) == 4 and len(policy.quality_criteria) == 5
    for item in policy.sourcing_tiers + policy.quality_criteria:
        assert item in adaptive


def test_plan_queries():
    assert plan_queries("1. door width\n- door width\n\n* fire rating\n2) pset", 5) == \
        ["door width", "fire rating", "pset"]
    assert len(plan_queries("\n".join(f"q{i}" for i in range(7)), 5)) == 5


# --- adaptive loop --------------------------------------------------------------

def test_adaptive_explore_then_answer(env):
    p = Scripted({"s": [format_action('print(count(by_type("IfcWall")))'), "FINAL: 5"]})
    rec = run_adaptive("How many walls?", OFFICE, p, env, session_id="s")
    assert rec.outcome == ANSWERED and rec.answer == "5"
    assert len(rec.history) == 1 and rec.executions == 1
    second = p.seen[1][1]
    assert [m["role"] for m in second] == ["user", "assistant", "user"]
    assert second[2]["content"].startswith("Execution result:\n")


def test_adaptive_exhaustion_is_exact_abstention(env):
    p = Scripted({"s": [format_action("print(1)")] * 3})
    rec = run_adaptive("q", OFFICE, p, env, N=3, session_id="s")
    assert rec.outcome == ABSTAINED and rec.answer == "Information not found in BIM model"
    assert rec.reason == "iteration limit" and len(rec.history) == 3 and rec.executions == 3


def test_agent_declared_abstention(env):
    rec = run_adaptive("q", OFFICE, Scripted({"s": [f"FINAL: {ABSTENTION_TEXT}"]}), env, session_id="s")
    assert rec.outcome == ABSTAINED and rec.reason == "agent declared"


def test_protocol_failure_after_two_retries(env):
    p = Scripted({"s": ["no format"] * 3})
    rec = run_adaptive("q", OFFICE, p, env, session_id="s")
    assert rec.outcome == ABSTAINED and rec.reason == "protocol failure"
    assert len(p.seen) == 3 and rec.history == []


def test_protocol_retry_recovers_without_consuming_iterations(env):
    p = Scripted({"s": ["hmm", format_action("print(1)"), "FINAL: ok"]})
    rec = run_adaptive("q", OFFICE, p, env, N=1, session_id="s")
    assert rec.outcome == ABSTAINED and rec.reason == "iteration limit"
    p = Scripted({"s": ["hmm", "FINAL: ok"]})
    assert run_adaptive("q", OFFICE, p, env, N=1, session_id="s").answer == "ok"


def test_provider_error_is_system_error(env):
    rec = run_adaptive("q", OFFICE, Scripted({}), env, session_id="s")
    assert rec.outcome == SYSTEM_ERROR and rec.reason.startswith("provider error:")


def test_errors_are_fed_back(env):
    p = Scripted({"s": [format_action("print(nope)"), "FINAL: x"]})
    run_adaptive("q", OFFICE, p, env, session_id="s")
    assert "RuntimeError (line 1): unknown identifier: nope" in p.seen[1][1][-1]["content"]


def test_missing_model_raises_model_load_error():
    with pytest.raises(ModelLoadError):
        run_adaptive("q", "/nonexistent.ifc", Scripted({}), session_id="s")


def test_bad_tool_is_skipped_with_diagnostic(env):
    good = ToolRecord(name="twice", signature="(x)", source="fn twice(x) { x * 2 }", description="double")
    bad = ToolRecord(name="broken", signature="(x)", source="fn broken(x) {", description="broken")
    p = Scripted({"s": [format_action("print(twice(4))"), "FINAL: 8"]})
    rec = run_adaptive("q", OFFICE, p, env, [good, bad], session_id="s")
    assert rec.tools == ["twice"] and rec.diagnostics[0].startswith("tool broken not installed")
    assert rec.history[0].result.printed == "8\n"


def test_context_budget_stubs_old_observations(env):
    big = format_action('let s = "' + "x" * 200 + '"\nfor i in [1,2,3,4,5,6,7,8,9,10] { print(s) }')
    p = Scripted({"s": [big, big, big, "FINAL: done"]})
    rec = run_adaptive("q", OFFICE, p, env, session_id="s", context_budget=3000)
    last = p.seen[-1][1]
    assert last[0]["content"] == "Question: q"
    assert sum(len(m["content"]) for m in last) <= 3000
    assert last[1]["role"] == "assistant" and last[2]["content"] == "[output truncated]"
    assert last[-1]["content"].startswith("Execution result:")
    assert rec.outcome == ANSWERED


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(st.sampled_from(["code", "bad", "err", "final", "garbage"]), min_size=1, max_size=30),
       st.integers(1, 8))
def test_history_never_exceeds_n(env, kinds, n):
    bank = {"code": format_action("print(1)"), "err": format_action("print(1/0)"),
            "bad": format_action("print("), "final": "FINAL: 1", "garbage": "no protocol"}
    p = Scripted({"s": [bank[k] for k in kinds]})
    rec = run_adaptive("q", OFFICE, p, env, N=n, session_id="s")
    assert len(rec.history) <= n
    assert rec.executions == len(rec.history)
    assert rec.outcome in (ANSWERED, ABSTAINED, SYSTEM_ERROR)
    if rec.outcome == ABSTAINED:
        assert rec.answer == ABSTENTION_TEXT
    if rec.reason == "iteration limit":
        assert len(rec.history) == n


# --- static baseline ------------------------------------------------------------

class FakeDocs:
    def __init__(self):
        self.chunks = [DocChunk(f"c{i}", "document", f"T{i}", f"body {i}") for i in range(20)]
        self.queries = []

    def search(self, query):
        self.queries.append(query)
        i = int(query[1:])
        return self.chunks[i:i + 3]

    def retrieve(self, query):
        return "unused"


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.lists(st.sampled_from(["code", "bad", "err", "final", "garbage"]), min_size=1, max_size=8))
def test_static_executes_at_most_once(env, kinds):
    bank = {"code": format_action("print(1)"), "err": format_action("print(1/0)"),
            "bad": format_action("print("), "final": "FINAL: 1", "garbage": "no protocol"}
    rec = run_static("q", OFFICE, Scripted({"s": [bank[k] for k in kinds]}), env, session_id="s")
    assert rec.executions <= 1 and len(rec.history) <= 1


def test_static_one_program_then_final(env):
    p = Scripted({"s": [format_action('print(count(by_type("IfcWall")))'), "FINAL: 5"]})
    rec = run_static("q", OFFICE, p, env, session_id="s")
    assert rec.outcome == ANSWERED and rec.executions == 1
    assert "No further code can run" in p.seen[1][1][-1]["content"]


def test_static_code_in_final_turn_is_rerequested_once(env):
    p = Scripted({"s": [format_action("print(1)"), format_action("print(2)"), "FINAL: 1"]})
    assert run_static("q", OFFICE, p, env, session_id="s").answer == "1"
    p = Scripted({"s": [format_action("print(1)")] * 3})
    rec = run_static("q", OFFICE, p, env, session_id="s")
    assert rec.reason == "no final answer" and rec.executions == 1 and rec.answer == ABSTENTION_TEXT


def test_static_planner_caps_queries_and_chunks(env):
    docs = FakeDocs()
    plan = "\n".join(f"q{i}" for i in range(7))
    p = Scripted({"s:plan": [plan], "s": [format_action("print(1)"), "FINAL: ok"]})
    rec = run_static("q", OFFICE, p, env, doc_index=docs, session_id="s")
    assert docs.queries == ["q0", "q1", "q2", "q3", "q4"]
    assert rec.doc_context == [f"c{i}" for i in range(7)]
    first = p.seen[1][1][0]["content"]
    assert first.startswith("Documentation:\n[1] T0\nbody 0") and first.endswith("Question: q")
    rec = run_static("q", OFFICE, Scripted({"s:plan": [plan], "s": ["FINAL: a"]}), env, doc_index=docs,
                     cfg=StaticPipelineConfig(2, 3), session_id="s")
    assert rec.doc_context == ["c0", "c1", "c2"]
    with pytest.raises(ValueError):
        StaticPipelineConfig(0, 1)


# --- replay, recording and records ------------------------------------------------

def test_replay_is_keyed_by_session_and_turn(env):
    p = ReplayProvider({("a", 0): format_action("print(1)"), ("a", 1): "FINAL: one", ("b", 0): "FINAL: two"})
    assert run_adaptive("q", OFFICE, p, env, session_id="a").answer == "one"
    assert run_adaptive("q", OFFICE, p, env, session_id="b").answer == "two"
    assert turn_index([{"role": "user", "content": ""}, {"role": "assistant", "content": ""}]) == 1
    with pytest.raises(ValueError):
        ReplayProvider.from_records([{"task_id": "a", "turn": 0, "response": "x"}] * 2)


def test_record_then_replay_is_identical(tmp_path):
    script = Scripted({"s": ["thinking", format_action('print(count(by_type("IfcDoor")))'),
                             format_action("print(1/0)"), "FINAL: 2 doors"]})
    rec_p = RecordingProvider(script)
    first = run_adaptive("How many doors?", OFFICE, rec_p, session_id="s")
    rec_p.save(tmp_path / "script.jsonl")
    second = run_adaptive("How many doors?", OFFICE, ReplayProvider.from_jsonl(tmp_path / "script.jsonl"),
                          session_id="s")
    assert first.to_json() == second.to_json()
    assert SessionRecord.from_dict(json.loads(first.to_json())).to_json() == first.to_json()
    assert "--- step 2 ---" in first.transcript()


def test_session_finish_only_once():
    rec = SessionRecord("s", "q", "m", "adaptive", 3)
    rec.finish(ANSWERED, "a")
    with pytest.raises(RuntimeError):
        rec.finish(ABSTAINED)


# --- HTTP provider ----------------------------------------------------------------

def _ok(text):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


def test_http_provider_retries_then_succeeds():
    calls = []

    def handler(request):
        calls.append(json.loads(request.content))
        if len(calls) == 1:
            raise httpx.ConnectError("down")
        if len(calls) == 2:
            return httpx.Response(503)
        if len(calls) == 3:
            return httpx.Response(429)
        return _ok("FINAL: 1")

    p = HttpChatProvider("http://x/v1/", "m", 0.2, api_key="k", backoff=0, transport=httpx.MockTransport(handler))
    assert p.complete("sys", [{"role": "user", "content": "hi"}], "s") == "FINAL: 1"
    assert len(calls) == 4
    assert calls[0] == {"model": "m", "temperature": 0.2,
                        "messages": [{"role": "system", "content": "sys"}, {"role": "user", "content": "hi"}]}


def test_http_provider_gives_up_and_fails_fast():
    count = {"n": 0}

    def flaky(request):
        count["n"] += 1
        return httpx.Response(500)

    p = HttpChatProvider("http://x", "m", max_retries=2, backoff=0, transport=httpx.MockTransport(flaky))
    with pytest.raises(ProviderError, match="giving up after 2 retries"):
        p.complete("s", [], "id")
    assert count["n"] == 3

    def auth(request):
        count["n"] += 1
        assert request.headers["authorization"] == "Bearer secret"
        return httpx.Response(401, text="nope")

    count["n"] = 0
    p = HttpChatProvider("http://x", "m", api_key="secret", backoff=0, transport=httpx.MockTransport(auth))
    with pytest.raises(ProviderError, match="HTTP 401"):
        p.complete("s", [], "id")
    assert count["n"] == 1

    p = HttpChatProvider("http://x", "m", backoff=0, transport=httpx.MockTransport(lambda r: httpx.Response(200, json={})))
    with pytest.raises(ProviderError, match="malformed"):
        p.complete("s", [], "id")
