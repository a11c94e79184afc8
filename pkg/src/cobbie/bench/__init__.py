"""Benchmark harness: tasks, split, matrix runs and reports."""
from .dataset import CATEGORIES, TEST, TRAIN, BenchTask, MissingModel, SchemaError, load_dataset, stratified_split
from .matrix import MatrixSpec, load_matrix, make_provider
from .report import MatrixReport, build_report, emit_report, to_markdown
from .runner import (
    AUGMENTATIONS,
    PARADIGMS,
    Augmentations,
    ModelCache,
    RunConfig,
    check_no_leakage,
    collect_records,
    run_matrix,
    run_task,
)

__all__ = [
    "AUGMENTATIONS", "CATEGORIES", "PARADIGMS", "TEST", "TRAIN", "Augmentations", "BenchTask", "MatrixReport",
    "MatrixSpec", "MissingModel", "ModelCache", "RunConfig", "SchemaError", "build_report", "check_no_leakage",
    "collect_records", "emit_report", "load_dataset", "load_matrix", "make_provider", "run_matrix", "run_task",
    "stratified_split", "to_markdown",
]
