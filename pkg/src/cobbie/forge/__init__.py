"""Automatic tool generation and the bounded tool repository."""
from .repository import (
    ACTIVE,
    DEFAULT_CAPACITY,
    DEFAULT_GRACE,
    PRUNED,
    ToolRecord,
    ToolRepository,
    deletion_score,
    record_usage,
    tools_called,
)
from .training import (
    ASSESS, CREATE, DEBUG, GENERATE, IDENTIFY, ANALYZE, PERSIST, SKIP, TEST, VERIFY,
    TrainingReport,
    TrainingState,
    TrainingTask,
    run_training,
    run_training_step,
)

__all__ = [
    "ACTIVE", "ANALYZE", "ASSESS", "CREATE", "DEBUG", "DEFAULT_CAPACITY", "DEFAULT_GRACE", "GENERATE", "IDENTIFY",
    "PERSIST", "PRUNED", "SKIP", "TEST", "VERIFY", "ToolRecord", "ToolRepository", "TrainingReport",
    "TrainingState", "TrainingTask", "deletion_score", "record_usage", "run_training", "run_training_step",
    "tools_called",
]
