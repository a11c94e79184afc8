"""Answer generation: the exploration loop, the static baseline and LLM providers."""
from .loop import (
    DEFAULT_CONTEXT_BUDGET,
    DEFAULT_MAX_ITERATIONS,
    StaticPipelineConfig,
    open_environment,
    plan_queries,
    run_adaptive,
    run_static,
)
from .prompts import ABSTENTION_TEXT, SourcingPolicy, build_system_prompt
from .protocol import CodeAction, FinalAnswer, ProtocolError, format_action, format_final, parse_agent_response
from .providers import HttpChatProvider, LlmProvider, ProviderError, RecordingProvider, ReplayProvider, turn_index
from .session import ABSTAINED, ANSWERED, PENDING, SYSTEM_ERROR, ModelLoadError, SessionRecord, Step

__all__ = [
    "ABSTAINED", "ABSTENTION_TEXT", "ANSWERED", "DEFAULT_CONTEXT_BUDGET", "DEFAULT_MAX_ITERATIONS", "PENDING",
    "SYSTEM_ERROR", "CodeAction", "FinalAnswer", "HttpChatProvider", "LlmProvider", "ModelLoadError",
    "ProtocolError", "ProviderError", "RecordingProvider", "ReplayProvider", "SessionRecord", "SourcingPolicy",
    "StaticPipelineConfig", "Step", "build_system_prompt", "format_action", "format_final", "open_environment",
    "parse_agent_response", "plan_queries", "run_adaptive", "run_static", "turn_index",
]
