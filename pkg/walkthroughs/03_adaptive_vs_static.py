"""Replay one question through both paradigms and compare the transcripts."""
from _paths import MINIBENCH, MODELS

from cobbie.agent import ReplayProvider, run_adaptive, run_static

question = "How many walls are on level 2?"
model = str(MODELS / "office.ifc")

adaptive = run_adaptive(question, model, ReplayProvider.from_jsonl(MINIBENCH / "adaptive.jsonl"), session_id="T04")
static = run_static(question, model, ReplayProvider.from_jsonl(MINIBENCH / "static.jsonl"), session_id="T04")

for rec in (adaptive, static):
    print(f"== {rec.mode}: {rec.outcome} after {len(rec.history)} executions")
    for i, step in enumerate(rec.history, 1):
        print(f"-- step {i}\n{step.code}\n{step.result.feedback()}")
    print(f"answer: {rec.answer}\n")
