"""Singleton-premise implications between user stories.

An implication ``p => c`` holds in a dyadic context when every object
holding ``p`` also holds ``c``; its support is the number of objects holding
``p``. A premise-less ("universal") implication ``=> c`` states that every
object holds ``c``.

Text format, one implication per line::

    <4>  => (user;search)
    <2> (communityManager;moderateComment) => (user;viewComment)
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Iterable, Optional

from .context import DyadicContext, UserStory, name_key
from .errors import ArgumentError, ParseError

__all__ = [
    "Implication",
    "ImplicationSet",
    "mine_implications",
    "verify_implication",
    "format_implications",
    "parse_implications",
    "context_fingerprint",
]


@dataclass(frozen=True)
class Implication:
    """``premise => conclusion`` with its support.

    ``premise`` is None for universal implications. A support of 0 means
    "unknown" and is only produced when parsing LLM answers that omit it.
    """

    support: int
    premise: Optional[UserStory]
    conclusion: UserStory

    def __post_init__(self):
        if self.support < 0:
            raise ArgumentError(f"negative support {self.support}")
        if self.premise is not None and self.premise == self.conclusion:
            raise ArgumentError(f"reflexive implication on {self.conclusion}")

    @property
    def key(self) -> tuple[Optional[UserStory], UserStory]:
        return (self.premise, self.conclusion)

    def sort_key(self):
        premise = (0, ()) if self.premise is None else (1, self.premise.key)
        return (-self.support, premise, self.conclusion.key)

    def __str__(self):
        body = "" if self.premise is None else str(self.premise)
        head = f"<{self.support}> " if self.support else ""
        return f"{head}{body} => {self.conclusion}"


class ImplicationSet:
    """An immutable, canonically ordered collection of implications.

    Ordering: support descending, universal implications before premised
    ones, then premise and conclusion lexicographically (case-insensitive).
    """

    def __init__(self, implications: Iterable[Implication] = (), fingerprint: Optional[str] = None):
        items = list(implications)
        seen = set()
        for imp in items:
            if imp.key in seen:
                raise ArgumentError(f"duplicate implication {imp.premise} => {imp.conclusion}")
            seen.add(imp.key)
        self._items = tuple(sorted(items, key=Implication.sort_key))
        self.fingerprint = fingerprint

    @property
    def implications(self) -> tuple[Implication, ...]:
        return self._items

    def __iter__(self):
        return iter(self._items)

    def __len__(self):
        return len(self._items)

    def __getitem__(self, i):
        return self._items[i]

    def __eq__(self, other):
        if not isinstance(other, ImplicationSet):
            return NotImplemented
        return [(i.support, i.key) for i in self._items] == [(i.support, i.key) for i in other._items]

    def __repr__(self):
        return f"ImplicationSet({len(self._items)} implications, fingerprint={self.fingerprint!r})"

    def vocabulary(self) -> frozenset[UserStory]:
        """Every story mentioned as a premise or conclusion."""
        out = set()
        for imp in self._items:
            out.add(imp.conclusion)
            if imp.premise is not None:
                out.add(imp.premise)
        return frozenset(out)


def context_fingerprint(dyadic: DyadicContext) -> str:
    """Order-independent 64-bit hash of the incidence cells, as 16 hex digits."""
    cells = sorted(
        f"{name_key(dyadic.objects[o])}\t{_label_key(dyadic.attributes[a])}"
        for o, a in dyadic.incidence
    )
    digest = hashlib.blake2b("\n".join(cells).encode("utf-8"), digest_size=8)
    return digest.hexdigest()


def _label_key(attr) -> str:
    if isinstance(attr, UserStory):
        return "(%s;%s)" % attr.key
    return name_key(attr)


def mine_implications(
    dyadic: DyadicContext,
    min_support: int = 1,
    *,
    skip_universal_conclusions: bool = False,
) -> ImplicationSet:
    """All universal and singleton-premise implications holding in ``dyadic``.

    Universal implications are emitted for attributes held by every object.
    ``p => c`` is emitted when the extent of ``p`` is included in the extent
    of ``c`` and ``p`` is held by at least ``min_support`` objects; the same
    threshold applies to universal implications (support = number of
    objects). With ``skip_universal_conclusions`` a conclusion already
    covered by a universal implication is not repeated under a premise.
    """
    if min_support < 1:
        raise ArgumentError(f"min_support must be >= 1, got {min_support}")
    for attr in dyadic.attributes:
        if not isinstance(attr, UserStory):
            raise ArgumentError("attributes must be (role;feature) pairs; use flatten_pairs")

    extents = dyadic.extents()
    n = len(dyadic.objects)
    everyone = (1 << n) - 1
    universal = [n > 0 and e == everyone for e in extents]
    sizes = [e.bit_count() for e in extents]
    attrs = dyadic.attributes

    found = []
    if n >= min_support:
        found.extend(Implication(n, None, attrs[c]) for c, u in enumerate(universal) if u)
    for p, ext_p in enumerate(extents):
        if sizes[p] < min_support:
            continue
        for c, ext_c in enumerate(extents):
            if c == p or ext_p & ~ext_c:
                continue
            if skip_universal_conclusions and universal[c]:
                continue
            found.append(Implication(sizes[p], attrs[p], attrs[c]))
    return ImplicationSet(found, fingerprint=context_fingerprint(dyadic))


def verify_implication(dyadic: DyadicContext, imp: Implication) -> bool:
    """True iff ``imp`` holds in ``dyadic`` and its support is exact."""
    extents = dyadic.extents()
    concl = extents[dyadic.attribute_index(imp.conclusion)]
    if imp.premise is None:
        everyone = (1 << len(dyadic.objects)) - 1
        return concl == everyone and imp.support == len(dyadic.objects)
    prem = extents[dyadic.attribute_index(imp.premise)]
    return not (prem & ~concl) and imp.support == prem.bit_count()


def format_implications(imps: Iterable[Implication]) -> str:
    lines = []
    for imp in imps:
        if imp.premise is None:
            lines.append(f"<{imp.support}>  => {imp.conclusion}")
        else:
            lines.append(f"<{imp.support}> {imp.premise} => {imp.conclusion}")
    return "".join(line + "\n" for line in lines)


_PAIR = r"\(\s*([^();\s]+)\s*;\s*([^();\s]+)\s*\)"
_LINE = re.compile(rf"<\s*(\d+)\s*>\s*(?:{_PAIR})?\s*=>\s*(.+)")
_PAIR_RE = re.compile(_PAIR)
_CONCLUSIONS = re.compile(rf"(?:{_PAIR}\s*[,;]?\s*)+")
_OPEN_PREMISE = re.compile(rf"<\s*\d+\s*>\s*(?:{_PAIR})?\s*")


def parse_implications(text: str) -> ImplicationSet:
    """Inverse of :func:`format_implications`.

    Blank lines and surrounding whitespace are ignored. A line consisting of
    a support and premise only may continue on the next line starting with
    ``=>``. Several conclusions on one line, separated by spaces or commas,
    are split into one implication each.
    """
    found: list[Implication] = []
    seen: dict = {}
    pending: tuple[int, str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if pending is not None:
            if not line.startswith("=>"):
                raise ParseError("expected '=>' continuing the previous line", lineno)
            start, head = pending
            line = f"{head} {line}"
            pending = None
        else:
            start = lineno
            if _OPEN_PREMISE.fullmatch(line) and "=>" not in line:
                pending = (lineno, line)
                continue
        m = _LINE.fullmatch(line)
        if m is None or not _CONCLUSIONS.fullmatch(m.group(4).strip()):
            raise ParseError(f"not an implication: {raw.strip()!r}", start)
        support = int(m.group(1))
        if support < 1:
            raise ParseError("support must be >= 1", start)
        premise = UserStory(m.group(2), m.group(3)) if m.group(2) else None
        for role, feature in _PAIR_RE.findall(m.group(4)):
            try:
                imp = Implication(support, premise, UserStory(role, feature))
            except ArgumentError as exc:
                raise ParseError(str(exc), start) from None
            if imp.key in seen:
                raise ParseError(
                    f"duplicate implication (first on line {seen[imp.key]})", start
                )
            seen[imp.key] = start
            found.append(imp)
    if pending is not None:
        raise ParseError("implication premise without conclusion", pending[0])
    return ImplicationSet(found)
