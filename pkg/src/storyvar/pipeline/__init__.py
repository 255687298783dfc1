"""Four-step prompt pipeline with record and replay."""

from .client import ChatClient, LiveChatClient, ReplayChatClient, chat_round
from .parsing import (
    Vocabulary,
    format_pairs,
    parse_applied_implications,
    parse_design_options,
    parse_pairs,
    parse_step3,
    parse_step4,
)
from .session import SessionConfig, acronym, resolve_selection, run_session
from .templates import PromptTemplate, load_templates, render_prompt
from .transcript import (
    ConversationTranscript,
    DesignOption,
    Exchange,
    ModelConfig,
    ParsedSteps,
    Step3Result,
)

__all__ = [
    "ChatClient",
    "LiveChatClient",
    "ReplayChatClient",
    "chat_round",
    "Vocabulary",
    "format_pairs",
    "parse_applied_implications",
    "parse_design_options",
    "parse_pairs",
    "parse_step3",
    "parse_step4",
    "SessionConfig",
    "acronym",
    "resolve_selection",
    "run_session",
    "PromptTemplate",
    "load_templates",
    "render_prompt",
    "ConversationTranscript",
    "DesignOption",
    "Exchange",
    "ModelConfig",
    "ParsedSteps",
    "Step3Result",
]
