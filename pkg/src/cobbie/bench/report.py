"""Matrix report: accuracy with bootstrap intervals, per-category and per-criterion tables, McNemar grid."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Mapping, Sequence

from ..evalkit import (
    CRITERIA,
    EvalRecord,
    PairedOutcomes,
    abstention_rate,
    accuracy,
    accuracy_attempted,
    bootstrap_ci,
    criterion_pass_rate,
    mcnemar,
    significance_stars,
)
from .dataset import CATEGORIES

NA = "n/a"


def pct(x: float | None) -> str:
    return NA if x is None else f"{100 * x:.1f}"


def frac(x: float | None) -> str:
    return NA if x is None else f"{x:.3f}"


def pval(p: float) -> str:
    return f"{p:.4f}"


@dataclass
class Cell:
    config_id: str
    n: int
    system_errors: int
    accuracy: float
    ci: tuple[float, float]
    abstention: float
    attempted: float | None
    by_category: dict[int, float | None]
    criteria: dict[str, float | None]
    by_project: dict[str, float | None]


@dataclass
class PairTest:
    a: str
    b: str
    b_count: int
    c_count: int
    method: str
    statistic: float | None
    p_value: float

    @property
    def stars(self) -> str:
        return significance_stars(self.p_value)


@dataclass
class MatrixReport:
    cells: list[Cell] = field(default_factory=list)
    pairs: list[PairTest] = field(default_factory=list)

    @property
    def abstention_range(self) -> tuple[float, float] | None:
        if not self.cells:
            return None
        vals = [c.abstention for c in self.cells]
        return min(vals), max(vals)


def _rate(rs: Sequence[EvalRecord]) -> float | None:
    rs = [r for r in rs if not r.system_error]
    return accuracy(rs) if rs else None


def build_report(records: Mapping[str, Sequence[EvalRecord]], seed: int = 42, resamples: int = 10_000) -> MatrixReport:
    rep = MatrixReport()
    for cid, rs in records.items():
        scored = [r for r in rs if not r.system_error]
        if not scored:
            continue
        projects = sorted({r.project for r in scored})
        rep.cells.append(Cell(
            cid, len(scored), len(rs) - len(scored), accuracy(scored), bootstrap_ci(scored, "accuracy", resamples,
                                                                                    0.95, seed),
            abstention_rate(scored), accuracy_attempted(scored),
            {k: _rate([r for r in scored if r.category == k]) for k in CATEGORIES},
            {c: criterion_pass_rate(scored, c) for c in CRITERIA},
            {p: _rate([r for r in scored if r.project == p]) for p in projects},
        ))
    ids = [c.config_id for c in rep.cells]
    for a, b in combinations(ids, 2):
        try:
            paired = PairedOutcomes.from_records(records[a], records[b])
        except ValueError:
            continue
        res = mcnemar(paired)
        rep.pairs.append(PairTest(a, b, res.b, res.c, res.method, res.statistic, res.p_value))
    return rep


# -- tables -------------------------------------------------------------------
def accuracy_rows(rep: MatrixReport) -> list[list[str]]:
    return [[c.config_id, str(c.n), pct(c.accuracy), frac(c.ci[0]), frac(c.ci[1]), pct(c.abstention),
             pct(c.attempted), str(c.system_errors)] for c in rep.cells]


def category_rows(rep: MatrixReport) -> list[list[str]]:
    return [[c.config_id, *(pct(c.by_category[k]) for k in CATEGORIES)] for c in rep.cells]


def quality_rows(rep: MatrixReport) -> list[list[str]]:
    return [[c.config_id, *(pct(c.criteria[k]) for k in CRITERIA)] for c in rep.cells]


def mcnemar_rows(rep: MatrixReport) -> list[list[str]]:
    return [[p.a, p.b, str(p.b_count), str(p.c_count), p.method,
             NA if p.statistic is None else f"{p.statistic:.4f}", pval(p.p_value), p.stars] for p in rep.pairs]


def project_rows(rep: MatrixReport) -> tuple[list[str], list[list[str]]]:
    projects = sorted({p for c in rep.cells for p in c.by_project})
    return projects, [[c.config_id, *(pct(c.by_project.get(p)) for p in projects)] for c in rep.cells]


ACCURACY_HEADER = ["config", "n", "accuracy_pct", "ci_low", "ci_high", "abstention_pct", "attempted_pct",
                   "system_errors"]
CATEGORY_HEADER = ["config", *(f"category_{k}_pct" for k in CATEGORIES)]
QUALITY_HEADER = ["config", *(f"{c}_pct" for c in CRITERIA)]
MCNEMAR_HEADER = ["config_a", "config_b", "b", "c", "method", "statistic", "p_value", "significance"]


def _md_table(header: list[str], rows: list[list[str]]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(r) + " |" for r in rows]
    return "\n".join(lines)


def to_markdown(rep: MatrixReport) -> str:
    acc = [[r[0], r[1], f"{r[2]}% [{r[3]}, {r[4]}]", f"{r[5]}%", f"{r[6]}%" if r[6] != NA else NA, r[7]]
           for r in accuracy_rows(rep)]
    parts = ["# Benchmark report", "## Accuracy",
             _md_table(["Configuration", "n", "Accuracy [95% CI]", "Abstention", "Attempted accuracy",
                        "System errors"], acc)]
    rng = rep.abstention_range
    if rng:
        parts.append(f"Abstention range: {pct(rng[0])}% to {pct(rng[1])}%")
    parts += ["## Accuracy by category",
              _md_table(["Configuration", *(f"Category {k}" for k in CATEGORIES)], _with_pct(category_rows(rep))),
              "## Answer quality over attempted answers",
              _md_table(["Configuration", *(c.capitalize() for c in CRITERIA)], _with_pct(quality_rows(rep))),
              "## Pairwise McNemar tests",
              _md_table(["A", "B", "b", "c", "Method", "Statistic", "p", "Significance"], mcnemar_rows(rep))]
    projects, prow = project_rows(rep)
    if len(projects) > 1:
        parts += ["## Accuracy by project", _md_table(["Configuration", *projects], _with_pct(prow))]
    return "\n\n".join(parts) + "\n"


def _with_pct(rows: list[list[str]]) -> list[list[str]]:
    return [[r[0], *(v if v == NA else f"{v}%" for v in r[1:])] for r in rows]


def _csv(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def emit_report(rep: MatrixReport, out_dir: str | Path, formats: Sequence[str] = ("markdown", "csv")) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "markdown" in formats:
        p = out / "report.md"
        p.write_text(to_markdown(rep), encoding="utf-8")
        written.append(p)
    if "csv" in formats:
        projects, prow = project_rows(rep)
        tables = {
            "accuracy.csv": (ACCURACY_HEADER, accuracy_rows(rep)),
            "categories.csv": (CATEGORY_HEADER, category_rows(rep)),
            "quality.csv": (QUALITY_HEADER, quality_rows(rep)),
            "mcnemar.csv": (MCNEMAR_HEADER, mcnemar_rows(rep)),
            "projects.csv": (["config", *projects], prow),
        }
        for name, (header, rows) in tables.items():
            p = out / name
            p.write_text(_csv(header, rows), encoding="utf-8")
            written.append(p)
    return written
