"""Regular-pattern extraction of structured results from LLM answers."""

from __future__ import annotations

import logging
import re
from typing import Iterable, Optional

from ..context import UserStory
from ..errors import ArgumentError, ParseError
from ..implications import Implication
from .transcript import DesignOption, Step3Result

log = logging.getLogger(__name__)

_TOKEN = r"[^\s();,:<>]+"
_PAIR = rf"\(\s*({_TOKEN})\s*;\s*({_TOKEN})\s*\)"
_PAIR_RE = re.compile(_PAIR)
_BULLET = r"(?:[-*•+]|\d+[.)])?"
_BARE_PAIR_LINE = re.compile(rf"^\s*{_BULLET}\s*({_TOKEN})\s*;\s*({_TOKEN})\s*[.,]?\s*$", re.M)
_IMPLICATION = re.compile(rf"(?:<\s*(\d+)\s*>\s*)?(?:{_PAIR})?\s*=>\s*{_PAIR}")
_ELLIPSIS = re.compile(r"^\(?\s*(\.\.\.|…)\s*\)?$")


class Vocabulary:
    """Canonical display casing for roles, features and stories."""

    def __init__(self, stories: Iterable[UserStory] = ()):
        self.stories = {s.key: s for s in stories}
        self.roles: dict[str, str] = {}
        self.features: dict[str, str] = {}
        for s in self.stories.values():
            self.roles.setdefault(s.key[0], s.role)
            self.features.setdefault(s.key[1], s.feature)

    def __bool__(self):
        return bool(self.stories)

    def canon(self, story: UserStory) -> UserStory:
        if story.key in self.stories:
            return self.stories[story.key]
        role = self.roles.get(story.key[0], story.role)
        feature = self.features.get(story.key[1], story.feature)
        return UserStory(role, feature)


def format_pairs(stories: Iterable[UserStory]) -> str:
    return "".join(f"{s}\n" for s in sorted(stories))


def parse_pairs(answer: str, vocabulary: Optional[Vocabulary] = None) -> frozenset[UserStory]:
    """Every ``(role;feature)`` occurrence in ``answer``.

    Lines holding a bare ``role;feature`` (optionally bulleted) also count.
    Identity is case-insensitive; with a vocabulary, casing is canonicalized.
    """
    found = [UserStory(r, f) for r, f in _PAIR_RE.findall(answer)]
    found += [UserStory(r, f) for r, f in _BARE_PAIR_LINE.findall(answer)]
    if not found:
        raise ParseError("no (role;feature) pair found")
    vocab = vocabulary or Vocabulary()
    out: dict = {}
    for s in found:
        out.setdefault(s.key, vocab.canon(s))
    return frozenset(out.values())


def _unwrap(text: str) -> str:
    # joins "(a;b)\n    => (c;d)" into one line
    return re.sub(r"\)[ \t]*\r?\n\s*=>", ") =>", text)


def parse_applied_implications(answer: str, vocabulary: Optional[Vocabulary] = None) -> list[Implication]:
    """Implication lines ``[<n>] (r1;f1) => (r2;f2)``; a missing support is 0."""
    vocab = vocabulary or Vocabulary()
    out: dict = {}
    for m in _IMPLICATION.finditer(_unwrap(answer)):
        support = int(m.group(1)) if m.group(1) else 0
        premise = vocab.canon(UserStory(m.group(2), m.group(3))) if m.group(2) else None
        conclusion = vocab.canon(UserStory(m.group(4), m.group(5)))
        try:
            imp = Implication(support, premise, conclusion)
        except ArgumentError as exc:
            log.warning("skipping implication in answer: %s", exc)
            continue
        out.setdefault(imp.key, imp)
    if not out:
        raise ParseError("no applied implication found")
    return list(out.values())


def _after_marker(answer: str, marker: str) -> Optional[str]:
    """Text following the last line matching ``marker`` (and the rest of that line)."""
    hits = list(re.finditer(marker, answer, re.I))
    if not hits:
        return None
    return answer[hits[-1].end():]


def parse_step3(answer: str, vocabulary: Optional[Vocabulary] = None) -> Step3Result:
    """Split a step-3 answer into applied implications and the final story list."""
    stories_part = _after_marker(answer, r"result\s*2(?:\s*step\s*3)?[^\n]*")
    if stories_part is None:
        lines = answer.splitlines()
        imp_part = "\n".join(l for l in lines if "=>" in l)
        stories_part = "\n".join(l for l in lines if "=>" not in l)
    else:
        imp_part = answer[: len(answer) - len(stories_part)]
    applied = parse_applied_implications(imp_part, vocabulary)
    stories = parse_pairs(stories_part.replace("=>", " "), vocabulary)
    return Step3Result(tuple(applied), stories)


def parse_step4(answer: str, vocabulary: Optional[Vocabulary] = None) -> frozenset[UserStory]:
    part = _after_marker(answer, r"result\s*step\s*4[^\n]*")
    return parse_pairs(answer if part is None else part, vocabulary)


def _clean_line(line: str) -> tuple[str, bool]:
    """Strip bullets and markdown; report whether the line was emphasized."""
    s = re.sub(r"^\(\s*(?:\.\.\.|…)\s*\)\s*", "", line.strip())
    strong = bool(re.match(r"^(#+\s|\*\*|__|\d+[.)]\s)", s)) or s.endswith("**")
    s = re.sub(r"^#+\s*", "", s)
    s = re.sub(r"^(?:[-*•+](?!\*)|\d+[.)])\s*", "", s)
    s = s.replace("**", "").replace("__", "").strip()
    return s.rstrip(":").strip(), strong


def _split_names(text: str) -> tuple[str, ...]:
    text = re.sub(r"\([^)]*\)", "", text)
    out: dict = {}
    for part in re.split(r"[,;/]|\band\b", text):
        name = part.strip().strip(".*` ")
        if name and not _ELLIPSIS.match(name):
            out.setdefault(name.casefold(), name)
    return tuple(out.values())


def parse_design_options(answer: str, vocabulary: Optional[Vocabulary] = None) -> list[DesignOption]:
    """Option blocks: a heading line followed by ``Roles:`` and ``Features:`` lines.

    Stories are the roles x features combinations found in ``vocabulary``;
    without one, the full cross product is kept.
    """
    vocab = vocabulary or Vocabulary()
    options: list[DesignOption] = []
    heading: Optional[str] = None
    strong = False
    roles = features = None

    def flush():
        nonlocal heading, roles, features
        if heading and roles and features:
            options.append(_make_option(heading, roles, features, vocab))
        heading, roles, features = None, None, None

    for raw in answer.splitlines():
        text, emphasized = _clean_line(raw)
        if not text or _ELLIPSIS.match(text):
            continue
        m = re.match(r"(?i)^roles?\s*:\s*(.*)$", text)
        if m:
            if heading is not None:
                roles = _split_names(m.group(1))
            continue
        m = re.match(r"(?i)^(?:features?|actions?|acting\s*verbs?)\s*:\s*(.*)$", text)
        if m:
            if heading is not None:
                features = _split_names(m.group(1))
            continue
        if roles is not None or features is not None:
            flush()
        if heading is None or emphasized or not strong:
            heading, strong = text, emphasized
    flush()
    if not options:
        raise ParseError("no design option (heading with Roles: and Features: lines) found")
    return options


def _make_option(name, roles, features, vocab: Vocabulary) -> DesignOption:
    roles = tuple(vocab.roles.get(r.casefold(), r) for r in roles)
    features = tuple(vocab.features.get(f.casefold(), f) for f in features)
    combos = [UserStory(r, f) for r in roles for f in features]
    if vocab:
        kept = [vocab.stories[s.key] for s in combos if s.key in vocab.stories]
        if len(kept) < len(combos):
            log.warning(
                "option %r: %d of %d role/feature combinations do not occur in the data",
                name, len(combos) - len(kept), len(combos),
            )
    else:
        kept = combos
    return DesignOption(name, roles, features, frozenset(kept))
