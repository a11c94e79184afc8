"""Rates, bootstrap confidence intervals and McNemar paired tests."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .records import CRITERIA, EvalRecord

EXACT_THRESHOLD = 25


def _scored(records: Sequence[EvalRecord]) -> list[EvalRecord]:
    out = [r for r in records if not r.system_error]
    if not out:
        raise ValueError("no records left after excluding system errors")
    return out


def abstention_rate(records: Sequence[EvalRecord]) -> float:
    rs = _scored(records)
    return sum(r.abstained for r in rs) / len(rs)


def accuracy(records: Sequence[EvalRecord]) -> float:
    rs = _scored(records)
    return sum(r.correct for r in rs) / len(rs)


def accuracy_attempted(records: Sequence[EvalRecord]) -> float | None:
    """Correct over attempted; None when nothing was attempted."""
    attempted = [r for r in _scored(records) if not r.abstained]
    return sum(r.correct for r in attempted) / len(attempted) if attempted else None


def criterion_pass_rate(records: Sequence[EvalRecord], criterion: str) -> float | None:
    """Pass rate of one criterion over non-abstained answers."""
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}")
    attempted = [r for r in _scored(records) if not r.abstained]
    return sum(getattr(r, criterion) is True for r in attempted) / len(attempted) if attempted else None


def nearest_rank(sorted_values: np.ndarray, pct: float) -> float:
    n = len(sorted_values)
    rank = max(1, math.ceil(pct / 100 * n - 1e-9))
    return float(sorted_values[min(rank, n) - 1])


def bootstrap_values(values: Sequence[float], resamples: int = 10_000, level: float = 0.95, seed: int = 0,
                     denominators: Sequence[float] | None = None) -> tuple[float, float]:
    """Percentile bootstrap of ``mean(values)``, or of ``sum(values)/sum(denominators)`` when given."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("bootstrap needs at least one observation")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, v.size, size=(resamples, v.size))
    if denominators is None:
        stat = v[idx].mean(axis=1)
    else:
        d = np.asarray(denominators, dtype=float)
        den = d[idx].sum(axis=1)
        stat = np.divide(v[idx].sum(axis=1), den, out=np.full(resamples, np.nan), where=den > 0)
        stat = stat[~np.isnan(stat)]
    stat.sort()
    tail = (1 - level) / 2 * 100
    return nearest_rank(stat, tail), nearest_rank(stat, 100 - tail)


_VECTOR_METRICS = {
    "accuracy": lambda rs: ([r.correct for r in rs], None),
    "abstention_rate": lambda rs: ([r.abstained for r in rs], None),
    "accuracy_attempted": lambda rs: ([r.correct for r in rs], [not r.abstained for r in rs]),
}


def bootstrap_ci(records: Sequence[EvalRecord], metric: str | Callable[[Sequence[EvalRecord]], float] = "accuracy",
                 resamples: int = 10_000, level: float = 0.95, seed: int = 0) -> tuple[float, float]:
    """Resample tasks with replacement; nearest-rank percentile interval. Deterministic per seed."""
    rs = _scored(records)
    if isinstance(metric, str):
        if metric not in _VECTOR_METRICS:
            raise ValueError(f"unknown metric {metric!r}")
        num, den = _VECTOR_METRICS[metric](rs)
        return bootstrap_values(num, resamples, level, seed, den)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(rs), size=(resamples, len(rs)))
    stat = np.sort(np.array([metric([rs[i] for i in row]) for row in idx], dtype=float))
    tail = (1 - level) / 2 * 100
    return nearest_rank(stat, tail), nearest_rank(stat, 100 - tail)


@dataclass(frozen=True)
class PairedOutcomes:
    task_ids: tuple[str, ...]
    correct_a: tuple[bool, ...]
    correct_b: tuple[bool, ...]

    def __post_init__(self):
        if not len(self.task_ids) == len(self.correct_a) == len(self.correct_b):
            raise ValueError("paired arms must have equal length")

    @classmethod
    def from_records(cls, a: Sequence[EvalRecord], b: Sequence[EvalRecord]) -> "PairedOutcomes":
        ma = {r.task_id: r.correct for r in a if not r.system_error}
        mb = {r.task_id: r.correct for r in b if not r.system_error}
        if set(ma) != set(mb):
            raise ValueError("paired arms cover different task sets")
        ids = tuple(sorted(ma))
        return cls(ids, tuple(ma[i] for i in ids), tuple(mb[i] for i in ids))

    @property
    def discordant(self) -> tuple[int, int]:
        b = sum(x and not y for x, y in zip(self.correct_a, self.correct_b))
        c = sum(y and not x for x, y in zip(self.correct_a, self.correct_b))
        return b, c


@dataclass(frozen=True)
class McNemarResult:
    statistic: float | None
    p_value: float
    method: str  # exact | chi2
    b: int
    c: int


def mcnemar_counts(b: int, c: int) -> McNemarResult:
    n = b + c
    if n < EXACT_THRESHOLD:
        p = 1.0 if n == 0 else min(1.0, 2 * float(stats.binom.cdf(min(b, c), n, 0.5)))
        return McNemarResult(None, p, "exact", b, c)
    stat = (abs(b - c) - 1) ** 2 / n
    return McNemarResult(stat, float(stats.chi2.sf(stat, 1)), "chi2", b, c)


def mcnemar(paired: PairedOutcomes) -> McNemarResult:
    return mcnemar_counts(*paired.discordant)


def significance_stars(p: float) -> str:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return "ns"
