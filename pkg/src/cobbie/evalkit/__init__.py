"""Evaluation: judged records, rates, bootstrap intervals and paired significance tests."""
from .judge import JudgeInput, judge, judge_message, rubric
from .records import CRITERIA, EvalRecord, load_records, save_records
from .reference import ReferenceJudgeProvider, matches
from .stats import (
    McNemarResult,
    PairedOutcomes,
    abstention_rate,
    accuracy,
    accuracy_attempted,
    bootstrap_ci,
    bootstrap_values,
    criterion_pass_rate,
    mcnemar,
    mcnemar_counts,
    nearest_rank,
    significance_stars,
)

__all__ = [
    "CRITERIA", "EvalRecord", "JudgeInput", "McNemarResult", "PairedOutcomes", "ReferenceJudgeProvider",
    "abstention_rate", "accuracy", "accuracy_attempted", "bootstrap_ci", "bootstrap_values", "criterion_pass_rate",
    "judge", "judge_message", "load_records", "matches", "mcnemar", "mcnemar_counts", "nearest_rank", "rubric",
    "save_records", "significance_stars",
]
