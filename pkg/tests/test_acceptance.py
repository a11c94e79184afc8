"""Acceptance suite: one check per criterion, each reported as a PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly:
``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import csv
import random
import re
import sys
import tempfile
import time
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from cobbie.agent import ABSTENTION_TEXT, ANSWERED, ReplayProvider, format_action, run_adaptive, run_static  # noqa: E402
from cobbie.bench import BenchTask, build_report, emit_report, load_dataset, load_matrix, run_matrix  # noqa: E402
from cobbie.bench import stratified_split  # noqa: E402
from cobbie.bql import ExecEnvironment  # noqa: E402
from cobbie.evalkit import bootstrap_values, matches, mcnemar_counts  # noqa: E402
from cobbie.forge import ToolRecord, ToolRepository, deletion_score, record_usage  # noqa: E402
from cobbie.ifc import by_type, extruded_volume, load_model  # noqa: E402
from cobbie.retrieval import bm25_scores, build_sparse, rrf_fuse  # noqa: E402

from conftest import GOLDEN, MINIBENCH, MODELS  # noqa: E402
from oracles import bm25_reference, brute_force_model, rrf_reference  # noqa: E402
from test_bql import INFINITE, adversarial_corpus  # noqa: E402
from test_forge import _session  # noqa: E402

RESULTS: dict[int, str] = {}


def check(cond: bool, msg: str) -> None:
    if not cond:
        raise AssertionError(msg)


# 1 ------------------------------------------------------------------------------------------
def criterion_1() -> str:
    names = ["office", "house_de", "two_walls", "geometry", "hetero_revit"]
    t = time.perf_counter()
    for name in names:
        path = MODELS / f"{name}.ifc"
        g = load_model(path)
        check(len(g.entities) <= 200, f"{name} has {len(g.entities)} entities")
        ref = brute_force_model(path)
        check({i: e.ifc_type for i, e in g.entities.items()} == ref["entities"], f"{name}: entity map differs")
        check({k: len(v) for k, v in g.type_index.items()} == ref["types"], f"{name}: type index differs")
        inv = Counter((tgt, src, i) for tgt, pairs in g.inverse_index.items() for src, i in pairs)
        check(inv == ref["inverse"], f"{name}: inverse index differs")
    elapsed = time.perf_counter() - t
    check(elapsed < 1.0, f"took {elapsed:.2f}s")
    return f"5 models match the brute-force pass in {elapsed:.3f}s"


# 2 ------------------------------------------------------------------------------------------
def criterion_2() -> str:
    g = load_model(MODELS / "geometry.ifc")
    got = {}
    for name, want in (("unit prism", 2.0), ("polyline", 6.0)):
        e = next(x for x in by_type(g, "IfcProduct", True) if g[x].attributes[2] == name)
        got[name] = extruded_volume(g, e)
        check(abs(got[name] - want) / want <= 1e-9, f"{name}: {got[name]} != {want}")
    return f"unit prism {got['unit prism']:.12g}, polyline {got['polyline']:.12g}"


# 3 ------------------------------------------------------------------------------------------
def criterion_3() -> str:
    env = ExecEnvironment(load_model(MODELS / "two_walls.ifc"), step_budget=20_000)
    corpus = adversarial_corpus(1200)
    kinds = Counter()
    for code in corpus:
        r = env.execute(code)
        check(r.error_kind in (None, "ParseError", "RuntimeError", "BudgetExceeded"), f"bad kind {r.error_kind}")
        kinds[r.error_kind] += 1
    default = ExecEnvironment(load_model(MODELS / "two_walls.ifc"))
    t = time.perf_counter()
    r = default.execute(INFINITE)
    elapsed = time.perf_counter() - t
    check(r.error == "step budget exceeded", f"infinite program ended with {r.error!r}")
    check(elapsed < 1.0, f"infinite program took {elapsed:.2f}s")
    return f"{len(corpus)} programs all in-band {dict(kinds)}; budget tripped in {elapsed:.3f}s"


# 4 ------------------------------------------------------------------------------------------
def criterion_4() -> str:
    rng = random.Random(4)
    env = ExecEnvironment(load_model(MODELS / "office.ifc"))
    bank = [format_action("print(1)"), format_action("print(1/0)"), format_action("print("),
            "FINAL: 5", "no protocol at all"]
    exhausted = 0
    for i in range(300):
        n = rng.randint(1, 6)
        replies = [rng.choice(bank) for _ in range(rng.randint(1, 25))]
        script = {(f"s{i}", k): r for k, r in enumerate(replies)}
        rec = run_adaptive("q", "office.ifc", ReplayProvider(script), env, N=n, session_id=f"s{i}")
        check(len(rec.history) <= n, f"|H|={len(rec.history)} > N={n}")
        if rec.reason == "iteration limit":
            exhausted += 1
            check(rec.answer == "Information not found in BIM model", "wrong exhaustion text")
        srec = run_static("q", "office.ifc", ReplayProvider(script), env, session_id=f"s{i}")
        check(srec.executions <= 1, f"static executed {srec.executions} times")
    check(exhausted > 0, "no script exhausted the iteration budget")
    return f"300 random scripts: |H| <= N, {exhausted} exhaustions end with '{ABSTENTION_TEXT}', static <= 1 execution"


# 5 ------------------------------------------------------------------------------------------
def criterion_5() -> str:
    rng = random.Random(5)
    for _ in range(500):
        pool = [f"d{i}" for i in range(rng.randint(1, 15))]
        lists = [rng.sample(pool, rng.randint(0, len(pool))) for _ in range(rng.randint(1, 4))]
        ref = sorted(rrf_reference(lists, 60).items(), key=lambda x: (-x[1], x[0]))
        check(rrf_fuse(lists, 60) == ref, f"rrf mismatch on {lists}")
    worst = 0.0
    for _ in range(200):
        docs = [[rng.choice("abcdef") for _ in range(rng.randint(1, 10))] for _ in range(rng.randint(1, 10))]
        query = [rng.choice("abcdefg") for _ in range(rng.randint(1, 3))]
        got = dict(bm25_scores(build_sparse([(f"d{i:02d}", d) for i, d in enumerate(docs)]), query))
        for i, want in enumerate(bm25_reference(docs, query, 1.5, 0.75)):
            err = abs(got.get(f"d{i:02d}", 0.0) - want)
            worst = max(worst, err / max(abs(want), 1e-300) if want else err)
    check(worst <= 1e-9, f"bm25 relative error {worst:g}")
    fused = dict(rrf_fuse([["d1", "d2"], ["d2", "d1"], ["d1"]], 60))
    d1, d2 = 1 / 61 + 1 / 62 + 1 / 61, 1 / 62 + 1 / 61
    check(abs(fused["d1"] - d1) <= 1e-6 and abs(fused["d2"] - d2) <= 1e-6 and fused["d1"] > fused["d2"],
          f"worked example gave {fused}")
    return (f"rrf exact on 500 instances; bm25 max rel err {worst:.1e}; worked example "
            f"d1={fused['d1']:.6f} > d2={fused['d2']:.6f}")


# 6 ------------------------------------------------------------------------------------------
def criterion_6() -> str:
    def tool(name, created, calls=0, avail=0, succ=0):
        return ToolRecord(name, "()", name, f"fn {name}() {{ 1 }}", created, calls, avail, succ)

    check(deletion_score(tool("a", 0, 10, 10, 10)) == 0.0, "spot 0.0")
    check(deletion_score(tool("b", 0, 0, 10, 0)) == 1.0, "spot 1.0")
    check(deletion_score(tool("c", 0, 4, 8, 1)) == 0.625, "spot 0.625")
    rng = random.Random(6)
    prunes = 0
    for _ in range(200):
        repo = ToolRepository()
        for q in range(1, rng.randint(20, 80)):
            if rng.random() < 0.6:
                repo.upsert(tool(f"t{rng.randint(0, 60)}", q))
            if repo.active and rng.random() < 0.7:
                names = [t.name for t in repo.active]
                record_usage(repo, _session(names, [f"{rng.choice(names)}()"]), rng.random() < 0.5)
            scores = {t.name: deletion_score(t) for t in repo.active if not repo.in_grace(t, q)}
            for name in repo.prune(q):
                prunes += 1
                check(scores[name] == max(scores.values()), f"pruned {name} was not maximal")
                del scores[name]
            past = [t for t in repo.active if not repo.in_grace(t, q)]
            check(len(past) <= 16, f"{len(past)} past-grace tools active")
    return f"spot values 0.0/1.0/0.625 exact; 200 random histories, {prunes} prunes all brute-force maximal"


# 7 ------------------------------------------------------------------------------------------
def criterion_7() -> str:
    t = time.perf_counter()
    p = mcnemar_counts(1, 9).p_value
    check(abs(p - 0.021484) <= 1e-4, f"exact p {p}")
    chi = mcnemar_counts(40, 20)
    check(chi.method == "chi2" and abs(chi.statistic - 6.0167) <= 1e-3, f"chi2 statistic {chi.statistic}")
    rng = np.random.default_rng(7)
    data = rng.integers(0, 2, 514).astype(float)
    check(bootstrap_values(data, 10_000, seed=42) == bootstrap_values(data, 10_000, seed=42), "not reproducible")
    covered = 0
    for i in range(200):
        lo, hi = bootstrap_values(rng.integers(0, 2, 514).astype(float), 10_000, seed=i)
        covered += lo <= 0.5 <= hi
    elapsed = time.perf_counter() - t
    check(covered >= 180, f"coverage {covered}/200")
    check(elapsed < 60, f"took {elapsed:.1f}s")
    return f"exact p={p:.6f}; chi2={chi.statistic:.4f}; coverage {covered}/200; {elapsed:.1f}s"


# 8 ------------------------------------------------------------------------------------------
def criterion_8() -> str:
    counts = {1: 144, 2: 566, 3: 114, 4: 203}
    tasks = [BenchTask(f"S{c}-{i:04d}", "q", "m", "a", c) for c, n in counts.items() for i in range(n)]
    train, test = stratified_split(tasks, seed=42)
    check((len(train), len(test)) == (513, 514), f"sizes {len(train)}/{len(test)}")
    tr, te = Counter(t.category for t in train), Counter(t.category for t in test)
    check(all(abs(tr[c] - te[c]) <= 1 for c in counts), f"imbalance {tr} vs {te}")
    check(stratified_split(list(reversed(tasks)), seed=42) == (train, test), "not deterministic")
    return f"513/514; per-category test counts {dict(sorted(te.items()))}"


# 9 ------------------------------------------------------------------------------------------
def _minibench_records(out: Path):
    tasks = load_dataset(MINIBENCH / "manifest.jsonl")
    spec = load_matrix(MINIBENCH / "matrix.json")
    return tasks, spec, run_matrix(tasks, spec.configs, spec.providers, spec.judge, out)


def criterion_9() -> str:
    with tempfile.TemporaryDirectory() as d:
        t = time.perf_counter()
        tasks, _, recs = _minibench_records(Path(d))
        elapsed = time.perf_counter() - t
    cat = {t.task_id: t.category for t in tasks}
    adaptive, static = recs["adaptive-none"], recs["static-none"]
    n_ok = sum(r.correct for r in adaptive)
    check(n_ok >= 10, f"adaptive correct {n_ok}")
    check(all(r.correct for r in adaptive if cat[r.task_id] == 3), "adaptive missed a category 3 task")
    check(all(r.abstained for r in static if cat[r.task_id] == 3), "static answered a category 3 task")
    check(elapsed < 30, f"took {elapsed:.1f}s")
    return f"adaptive {n_ok}/12 correct; static abstains on all category 3 tasks; {elapsed:.2f}s"


# 10 -----------------------------------------------------------------------------------------
def criterion_10() -> str:
    tasks = load_dataset(MINIBENCH / "heterogeneity_manifest.jsonl")
    provider = ReplayProvider.from_jsonl(MINIBENCH / "heterogeneity.jsonl")
    seen = []
    for t in tasks:
        rec = run_adaptive(t.question, t.model_path, provider, session_id=t.task_id)
        check(rec.outcome == ANSWERED, f"{t.task_id} ended {rec.outcome}")
        check(matches(t.ground_truth, rec.answer), f"{t.task_id}: {rec.answer!r} vs {t.ground_truth}")
        trace = "\n".join(s.result.printed for s in rec.history)
        seen.append(next(k for k in ("NominalWidth", "Breite (B)", "Width") if k in trace))
    check(sorted(seen) == ["Breite (B)", "NominalWidth", "Width"], f"property names seen {seen}")
    return "answered " + ", ".join(f"{t.ground_truth} via {k}" for t, k in zip(tasks, seen))


# 11 -----------------------------------------------------------------------------------------
def criterion_11() -> str:
    with tempfile.TemporaryDirectory() as d:
        _, spec, recs = _minibench_records(Path(d))
        emit_report(build_report(recs, spec.seed, spec.resamples), Path(d) / "report")
        md = (Path(d) / "report" / "report.md").read_text(encoding="utf-8")
        check(md == (GOLDEN / "minibench_report.md").read_text(encoding="utf-8"), "markdown differs from golden")
        n_checked = 0
        sections = {b.partition("\n")[0]: b for b in md.split("\n## ")[1:]}
        twins = {"Accuracy": "accuracy.csv", "Accuracy by category": "categories.csv",
                 "Answer quality over attempted answers": "quality.csv", "Pairwise McNemar tests": "mcnemar.csv",
                 "Accuracy by project": "projects.csv"}
        for title, name in twins.items():
            rows = [line for line in sections[title].splitlines() if line.startswith("| ")][1:]
            with open(Path(d) / "report" / name, newline="", encoding="utf-8") as fh:
                csv_rows = list(csv.reader(fh))[1:]
            check(len(rows) == len(csv_rows), f"{name}: row count")
            for m, c in zip(rows, csv_rows):
                cells = [x.strip() for x in m.strip("|").split("|")]
                want = re.findall(r"\d+\.\d+|\d+", " ".join(cells[1:]))
                got = re.findall(r"\d+\.\d+|\d+", " ".join(c[1:]))
                check(want == got, f"{name}: {cells} vs {c}")
                n_checked += len(got)
    return f"report.md matches golden byte for byte; {n_checked} CSV numbers agree"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 12)}


def run_one(i: int) -> tuple[bool, str]:
    try:
        detail = CRITERIA[i]()
        ok = True
    except AssertionError as e:
        ok, detail = False, str(e)
    RESULTS[i] = f"criterion {i:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(RESULTS[i])
    return ok, detail


@pytest.mark.parametrize("i", list(CRITERIA))
def test_criterion(i):
    ok, detail = run_one(i)
    assert ok, detail


def main() -> int:
    results = [run_one(i)[0] for i in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
