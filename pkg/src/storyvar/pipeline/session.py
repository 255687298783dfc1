"""The four-step conversation: design options, selection, completion, refinement."""

from __future__ import annotations

import datetime as dt
import logging
import re
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

from ..context import parse_triples_csv, user_stories
from ..errors import ConfigurationError, ParseError, PipelineError, SessionError
from .client import ChatClient, LiveChatClient, ReplayChatClient, chat_round
from .parsing import (
    Vocabulary,
    format_pairs,
    parse_design_options,
    parse_pairs,
    parse_step3,
    parse_step4,
)
from .templates import PromptTemplate, load_templates, render_prompt
from .transcript import (
    ConversationTranscript,
    DesignOption,
    Exchange,
    ModelConfig,
    ParsedSteps,
)

log = logging.getLogger(__name__)

Selector = Callable[[Sequence[DesignOption]], Sequence[str]]


@dataclass
class SessionConfig:
    """Everything a session needs. Credentials stay in the environment."""

    user_stories_csv: str
    implications_text: str
    endpoint: Optional[str] = None
    model: Optional[str] = None
    credential_env: str = "OPENAI_API_KEY"
    temperature: Optional[float] = None
    selection: Optional[Sequence[str]] = None  # None: interactive
    record_path: Optional[Path] = None
    replay: Optional[ConversationTranscript] = None
    conversation_id: Optional[str] = None
    label: Optional[str] = None

    def __post_init__(self):
        if self.replay is None and not (self.endpoint and self.model):
            raise ConfigurationError("live mode needs an endpoint and a model")


def acronym(name: str) -> str:
    letters = [w[0] for w in re.findall(r"[A-Za-z][\w'-]*", name) if w[0].isupper()]
    return "".join(letters) or name


def _utc_now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


def resolve_selection(options: Sequence[DesignOption], chosen: Sequence[str]) -> list[str]:
    """Map chosen names to option names (case and spacing insensitive)."""
    norm = lambda s: " ".join(s.split()).casefold()
    by_name = {norm(o.name): o.name for o in options}
    valid = ", ".join(repr(o.name) for o in options)
    if not chosen:
        raise SessionError(f"no design option selected; valid options: {valid}")
    out = []
    for name in chosen:
        if norm(name) not in by_name:
            raise SessionError(f"unknown design option {name!r}; valid options: {valid}")
        if by_name[norm(name)] not in out:
            out.append(by_name[norm(name)])
    return out


def format_selection(names: Sequence[str]) -> str:
    return "[" + ", ".join(names) + "]"


def run_session(
    config: SessionConfig,
    templates: Optional[dict[int, PromptTemplate]] = None,
    selector: Optional[Selector] = None,
    client: Optional[ChatClient] = None,
    clock: Callable[[], str] = _utc_now,
) -> ConversationTranscript:
    """Run steps 1 to 4 and return the recorded transcript.

    The selector is called exactly once, between steps 1 and 2. Without one,
    ``config.selection`` is used, or the recorded selection when replaying.
    A failure at any step saves the partial transcript (status ``failed``)
    and raises :class:`SessionError` carrying it.
    """
    templates = templates or load_templates()
    try:
        vocab = Vocabulary(user_stories(parse_triples_csv(config.user_stories_csv)))
    except ParseError as exc:
        raise ConfigurationError(f"user-story data: {exc}") from None

    recorded = config.replay
    if client is None:
        if recorded is not None:
            client = ReplayChatClient(recorded.exchanges)
        else:
            client = LiveChatClient(config.endpoint, config.model, config.credential_env, config.temperature)
    if selector is None:
        if config.selection is not None:
            fixed = list(config.selection)
        elif recorded is not None:
            fixed = list(recorded.selection)
        else:
            raise ConfigurationError("no selector and no preselected options")
        selector = lambda options: fixed

    if recorded is not None:
        ident, date, model = recorded.id, recorded.date, recorded.model
    else:
        ident = config.conversation_id or uuid.uuid4().hex[:12]
        date = dt.date.today().isoformat()
        model = ModelConfig(config.endpoint, config.model, config.temperature)

    history: list = []
    exchanges: list[Exchange] = []
    parsed: dict = {}
    selection: list[str] = []
    label = config.label or (recorded.label if recorded is not None else "")

    def snapshot(status="complete", error=None) -> ConversationTranscript:
        return ConversationTranscript(
            id=ident,
            date=date,
            model=model,
            exchanges=tuple(exchanges),
            parsed=ParsedSteps(**parsed),
            selection=tuple(selection),
            label=label,
            status=status,
            error=error,
        )

    def ask(step: int, state: dict) -> str:
        prompt = render_prompt(templates[step], state)
        answer = chat_round(client, history, prompt)
        exchanges.append(Exchange(step, prompt, answer, clock()))
        return answer

    state = {"user_stories": config.user_stories_csv, "implications": config.implications_text}
    try:
        answer = ask(1, state)
        options = parse_design_options(answer, vocab)
        parsed["step1"] = tuple(options)

        selection = resolve_selection(options, list(selector(options)))
        if not label:
            label = "/".join(acronym(n) for n in selection)
        state["selection"] = format_selection(selection)
        answer = ask(2, state)
        parsed["step2"] = parse_pairs(answer, vocab)

        state["step2_result"] = format_pairs(parsed["step2"])
        answer = ask(3, state)
        parsed["step3"] = parse_step3(answer, vocab)

        answer = ask(4, state)
        parsed["step4"] = parse_step4(answer, vocab)
    except (PipelineError, ParseError) as exc:
        step = len(exchanges) + (0 if len(exchanges) > len(parsed) else 1)
        message = f"step {min(step, 4)}: {exc}"
        transcript = snapshot("failed", message)
        if config.record_path is not None:
            transcript.save(config.record_path)
        raise SessionError(message, transcript) from exc

    transcript = snapshot()
    if config.record_path is not None:
        transcript.save(config.record_path)
    return transcript
