"""Conversation transcripts and their JSON form.

Top-level JSON keys (``schema`` = ``storyvar.transcript/1``)::

    id, date, label, status ("complete" | "failed"), error,
    model: {endpoint, model, temperature},
    selection: [option name, ...],
    exchanges: [{step, prompt, answer, timestamp}, ...],
    parsed: {
        step1: [{name, roles, features, stories}, ...] | null,
        step2: ["(role;feature)", ...] | null,
        step3: {applied: [{support, premise, conclusion}], stories: [...]} | null,
        step4: [...] | null,
    }

Stories are written as ``(role;feature)``; a premise of null marks a
universal implication and a support of null an unknown one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from ..context import UserStory
from ..errors import ArgumentError, ParseError
from ..implications import Implication

SCHEMA = "storyvar.transcript/1"


@dataclass(frozen=True)
class DesignOption:
    name: str
    roles: tuple[str, ...]
    features: tuple[str, ...]
    stories: frozenset[UserStory] = frozenset()

    def __post_init__(self):
        roles = {r.casefold() for r in self.roles}
        features = {f.casefold() for f in self.features}
        for s in self.stories:
            if s.key[0] not in roles or s.key[1] not in features:
                raise ArgumentError(f"story {s} of option {self.name!r} is outside its roles x features")


@dataclass(frozen=True)
class Step3Result:
    applied: tuple[Implication, ...]
    stories: frozenset[UserStory]


@dataclass(frozen=True)
class Exchange:
    step: int
    prompt: str
    answer: str
    timestamp: Optional[str] = None


@dataclass(frozen=True)
class ModelConfig:
    endpoint: Optional[str] = None
    model: Optional[str] = None
    temperature: Optional[float] = None


@dataclass(frozen=True)
class ParsedSteps:
    step1: Optional[tuple[DesignOption, ...]] = None
    step2: Optional[frozenset[UserStory]] = None
    step3: Optional[Step3Result] = None
    step4: Optional[frozenset[UserStory]] = None

    def get(self, step: int):
        return getattr(self, f"step{step}")


@dataclass(frozen=True)
class ConversationTranscript:
    id: str
    date: str
    model: ModelConfig = ModelConfig()
    exchanges: tuple[Exchange, ...] = ()
    parsed: ParsedSteps = ParsedSteps()
    selection: tuple[str, ...] = ()
    label: str = ""
    status: str = "complete"
    error: Optional[str] = None

    def __post_init__(self):
        steps = {e.step for e in self.exchanges}
        for k in (1, 2, 3, 4):
            if self.parsed.get(k) is not None and k not in steps:
                raise ArgumentError(f"parsed step {k} present without exchange {k}")
        if self.status not in ("complete", "failed"):
            raise ArgumentError(f"unknown status {self.status!r}")
        if self.status == "complete" and not self.exchanges:
            raise ArgumentError("a complete transcript needs at least one exchange")

    def with_(self, **changes) -> ConversationTranscript:
        return replace(self, **changes)

    def to_dict(self, timestamps: bool = True) -> dict:
        p = self.parsed
        return {
            "schema": SCHEMA,
            "id": self.id,
            "date": self.date,
            "label": self.label,
            "status": self.status,
            "error": self.error,
            "model": {
                "endpoint": self.model.endpoint,
                "model": self.model.model,
                "temperature": self.model.temperature,
            },
            "selection": list(self.selection),
            "exchanges": [
                {
                    "step": e.step,
                    "prompt": e.prompt,
                    "answer": e.answer,
                    **({"timestamp": e.timestamp} if timestamps else {}),
                }
                for e in self.exchanges
            ],
            "parsed": {
                "step1": None if p.step1 is None else [_option_to_json(o) for o in p.step1],
                "step2": _stories_to_json(p.step2),
                "step3": None if p.step3 is None else {
                    "applied": [_imp_to_json(i) for i in p.step3.applied],
                    "stories": _stories_to_json(p.step3.stories),
                },
                "step4": _stories_to_json(p.step4),
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def canonical(self) -> str:
        """JSON text without timestamps, for determinism comparisons."""
        return json.dumps(self.to_dict(timestamps=False), sort_keys=True, ensure_ascii=False)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def from_dict(cls, data: dict) -> ConversationTranscript:
        if data.get("schema") != SCHEMA:
            raise ParseError(f"unsupported transcript schema {data.get('schema')!r}")
        try:
            parsed = data.get("parsed") or {}
            step3 = parsed.get("step3")
            model = data.get("model") or {}
            return cls(
                id=str(data["id"]),
                date=str(data["date"]),
                label=data.get("label") or "",
                status=data.get("status", "complete"),
                error=data.get("error"),
                model=ModelConfig(model.get("endpoint"), model.get("model"), model.get("temperature")),
                selection=tuple(data.get("selection") or ()),
                exchanges=tuple(
                    Exchange(int(e["step"]), e["prompt"], e["answer"], e.get("timestamp"))
                    for e in data.get("exchanges") or ()
                ),
                parsed=ParsedSteps(
                    step1=None if parsed.get("step1") is None
                    else tuple(_option_from_json(o) for o in parsed["step1"]),
                    step2=_stories_from_json(parsed.get("step2")),
                    step3=None if step3 is None else Step3Result(
                        tuple(_imp_from_json(i) for i in step3["applied"]),
                        _stories_from_json(step3["stories"]),
                    ),
                    step4=_stories_from_json(parsed.get("step4")),
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed transcript: {exc}") from None

    @classmethod
    def loads(cls, text: str) -> ConversationTranscript:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
        if not isinstance(data, dict):
            raise ParseError("transcript must be a JSON object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: str | Path) -> ConversationTranscript:
        return cls.loads(Path(path).read_text(encoding="utf-8"))


def _stories_to_json(stories):
    if stories is None:
        return None
    return [str(s) for s in sorted(stories)]


def _stories_from_json(items):
    if items is None:
        return None
    return frozenset(UserStory.parse(s) for s in items)


def _option_to_json(o: DesignOption) -> dict:
    return {
        "name": o.name,
        "roles": list(o.roles),
        "features": list(o.features),
        "stories": _stories_to_json(o.stories),
    }


def _option_from_json(d: dict) -> DesignOption:
    return DesignOption(d["name"], tuple(d["roles"]), tuple(d["features"]), _stories_from_json(d["stories"]))


def _imp_to_json(i: Implication) -> dict:
    return {
        "support": i.support or None,
        "premise": None if i.premise is None else str(i.premise),
        "conclusion": str(i.conclusion),
    }


def _imp_from_json(d: dict) -> Implication:
    premise = d.get("premise")
    return Implication(
        d.get("support") or 0,
        None if premise is None else UserStory.parse(premise),
        UserStory.parse(d["conclusion"]),
    )
