"""Variability mining over user-story families.

Mines singleton-premise implications between (role; feature) pairs from a
family of (system, role, feature) triples, closes seed story sets with a
direct rule engine, drives a four-step LLM prompt pipeline with record and
replay, and compares LLM answers with the rule engine.
"""

from .context import (
    ContextStats,
    DyadicContext,
    TriadicContext,
    UserStory,
    flatten_features,
    flatten_pairs,
    parse_triples_csv,
    stats,
    user_stories,
)
from .errors import (
    ArgumentError,
    ConfigurationError,
    ParseError,
    PipelineError,
    RenderError,
    ReplayDivergenceError,
    SessionError,
    StoryvarError,
    TransportError,
)
from .implications import (
    Implication,
    ImplicationSet,
    format_implications,
    mine_implications,
    parse_implications,
    verify_implication,
)
from .rules import ClosureResult, DiffReport, close, diff_implications, diff_stories, fixpoint_close

__version__ = "0.1.0"
