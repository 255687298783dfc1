"""Prompt templates: tagged text blocks with ``{{placeholder}}`` markers."""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from ..errors import ArgumentError, RenderError

_TAG_LINE = re.compile(r"^<([A-Za-z][\w \-]*)>", re.M)
PLACEHOLDER = re.compile(r"\{\{\s*([A-Za-z_]\w*)\s*\}\}")


@dataclass(frozen=True)
class PromptTemplate:
    """The prompt of one step, split into tagged sections.

    ``preamble`` is the text before the first tag; each section is the tag
    name and the body that follows it up to the next tag line.
    """

    step: int
    preamble: str
    sections: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if self.step not in (1, 2, 3, 4):
            raise ArgumentError(f"step must be 1..4, got {self.step}")
        tags = [t.casefold() for t, _ in self.sections]
        names = self.placeholders()
        tasks = sum(t.startswith("task") for t in tags)
        missing = []
        if self.step == 1:
            missing += [t for t in ("role", "context", "syntax of data") if t not in tags]
            if "user_stories" not in names:
                missing.append("{{user_stories}}")
            if tasks < 2:
                missing.append("two Task blocks")
        elif self.step == 2:
            if "selection" not in names:
                missing.append("{{selection}}")
        elif self.step == 3:
            if "binary implications" not in tags:
                missing.append("Binary Implications")
            if "implications" not in names:
                missing.append("{{implications}}")
        elif tasks < 1:
            missing.append("Task block")
        if missing:
            raise ArgumentError(f"step {self.step} template lacks: {', '.join(missing)}")

    @classmethod
    def from_text(cls, step: int, text: str) -> PromptTemplate:
        matches = list(_TAG_LINE.finditer(text))
        if not matches:
            return cls(step, text, ())
        sections = []
        for i, m in enumerate(matches):
            end = matches[i + 1].start() if i + 1 < len(matches) else len(text)
            sections.append((m.group(1), text[m.end():end]))
        return cls(step, text[: matches[0].start()], tuple(sections))

    @property
    def text(self) -> str:
        return self.preamble + "".join(f"<{tag}>{body}" for tag, body in self.sections)

    def placeholders(self) -> list[str]:
        return [m.group(1) for m in PLACEHOLDER.finditer(self.text)]


def load_templates(directory: str | Path | None = None) -> dict[int, PromptTemplate]:
    """Read ``step1.txt`` .. ``step4.txt`` from ``directory`` or the bundled set."""
    out = {}
    for step in (1, 2, 3, 4):
        name = f"step{step}.txt"
        if directory is None:
            text = resources.files("storyvar").joinpath("templates", name).read_text(encoding="utf-8")
        else:
            text = Path(directory, name).read_text(encoding="utf-8")
        out[step] = PromptTemplate.from_text(step, text)
    return out


def render_prompt(template: PromptTemplate, state: Mapping[str, str]) -> str:
    """Substitute every placeholder in one pass.

    Values are inserted verbatim and never rescanned, so data containing
    ``{{...}}`` is safe. A missing or blank value is a :class:`RenderError`.
    """
    for name in template.placeholders():
        value = state.get(name)
        if value is None:
            raise RenderError(f"step {template.step}: unresolved placeholder {{{{{name}}}}}", name)
        if not value.strip():
            raise RenderError(f"step {template.step}: empty value for {{{{{name}}}}}", name)
    return PLACEHOLDER.sub(lambda m: state[m.group(1)], template.text)
