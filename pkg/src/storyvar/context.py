"""Triadic (system, role, feature) contexts and their dyadic flattenings.

Names are identified case-insensitively everywhere; the first casing met in
the input is kept for display.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import ArgumentError, ParseError

__all__ = [
    "UserStory",
    "TriadicContext",
    "DyadicContext",
    "ContextStats",
    "parse_triples_csv",
    "flatten_pairs",
    "flatten_features",
    "user_stories",
    "stats",
]


def name_key(name: str) -> str:
    return name.strip().casefold()


@dataclass(frozen=True, eq=False)
class UserStory:
    """A (role; feature) pair: ``role`` can perform ``feature``."""

    role: str
    feature: str

    def __post_init__(self):
        role = self.role.strip()
        feature = self.feature.strip()
        if not role or not feature:
            raise ArgumentError(f"empty component in user story ({self.role!r};{self.feature!r})")
        object.__setattr__(self, "role", role)
        object.__setattr__(self, "feature", feature)

    @property
    def key(self) -> tuple[str, str]:
        return (self.role.casefold(), self.feature.casefold())

    def __eq__(self, other):
        if not isinstance(other, UserStory):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other: UserStory) -> bool:
        return self.key < other.key

    def __str__(self):
        return f"({self.role};{self.feature})"

    @classmethod
    def parse(cls, text: str) -> UserStory:
        """Parse ``(role;feature)``; the parentheses are optional."""
        m = re.fullmatch(r"\s*\(?\s*([^();\s]+)\s*;\s*([^();\s]+)\s*\)?\s*", text)
        if m is None:
            raise ArgumentError(f"not a (role;feature) pair: {text!r}")
        return cls(m.group(1), m.group(2))


@dataclass(frozen=True)
class ContextStats:
    n_systems: int
    n_roles: int
    n_features: int
    n_triples: int
    n_user_stories: int

    def lines(self) -> list[str]:
        return [
            f"systems: {self.n_systems}",
            f"roles: {self.n_roles}",
            f"features: {self.n_features}",
            f"triples: {self.n_triples}",
            f"user_stories: {self.n_user_stories}",
        ]


@dataclass(frozen=True)
class TriadicContext:
    """A ternary incidence relation over systems x roles x features.

    ``triples`` holds index triples into the three name tuples.
    """

    systems: tuple[str, ...]
    roles: tuple[str, ...]
    features: tuple[str, ...]
    triples: frozenset[tuple[int, int, int]]

    def __post_init__(self):
        for label, names in (("system", self.systems), ("role", self.roles), ("feature", self.features)):
            keys = [name_key(n) for n in names]
            if len(set(keys)) != len(keys):
                raise ArgumentError(f"duplicate {label} name")
        ns, nr, nf = len(self.systems), len(self.roles), len(self.features)
        used = (set(), set(), set())
        for s, r, f in self.triples:
            if not (0 <= s < ns and 0 <= r < nr and 0 <= f < nf):
                raise ArgumentError(f"triple index out of range: {(s, r, f)}")
            used[0].add(s)
            used[1].add(r)
            used[2].add(f)
        if len(used[0]) != ns or len(used[1]) != nr or len(used[2]) != nf:
            raise ArgumentError("every system, role and feature must occur in a triple")

    @classmethod
    def from_triples(cls, triples: Iterable[tuple[str, str, str]]) -> TriadicContext:
        """Build a context from name triples, in first-occurrence order."""
        dims: tuple[dict[str, int], dict[str, int], dict[str, int]] = ({}, {}, {})
        names: tuple[list[str], list[str], list[str]] = ([], [], [])
        cells = set()
        for triple in triples:
            idx = []
            for axis, name in enumerate(triple):
                name = name.strip()
                k = name.casefold()
                if k not in dims[axis]:
                    dims[axis][k] = len(names[axis])
                    names[axis].append(name)
                idx.append(dims[axis][k])
            cells.add(tuple(idx))
        return cls(tuple(names[0]), tuple(names[1]), tuple(names[2]), frozenset(cells))

    def named_triples(self) -> list[tuple[str, str, str]]:
        return [
            (self.systems[s], self.roles[r], self.features[f])
            for s, r, f in sorted(self.triples)
        ]

    def __eq__(self, other):
        if not isinstance(other, TriadicContext):
            return NotImplemented
        return _triple_keys(self) == _triple_keys(other)

    def __hash__(self):
        return hash(frozenset(_triple_keys(self)))


def _triple_keys(ctx: TriadicContext) -> set[tuple[str, str, str]]:
    return {tuple(name_key(n) for n in t) for t in ctx.named_triples()}


Attribute = Union[str, UserStory]


def _attr_key(attr: Attribute):
    return attr.key if isinstance(attr, UserStory) else name_key(attr)


@dataclass(frozen=True)
class DyadicContext:
    """A binary object/attribute incidence relation.

    Attributes are plain names or :class:`UserStory` pairs.
    """

    objects: tuple[str, ...]
    attributes: tuple[Attribute, ...]
    incidence: frozenset[tuple[int, int]]

    def __post_init__(self):
        if len({name_key(o) for o in self.objects}) != len(self.objects):
            raise ArgumentError("duplicate object label")
        if len({_attr_key(a) for a in self.attributes}) != len(self.attributes):
            raise ArgumentError("duplicate attribute label")
        no, na = len(self.objects), len(self.attributes)
        for o, a in self.incidence:
            if not (0 <= o < no and 0 <= a < na):
                raise ArgumentError(f"incidence index out of range: {(o, a)}")

    @classmethod
    def from_rows(cls, rows: Sequence[tuple[str, Iterable[Attribute]]]) -> DyadicContext:
        """Build from ``(object, attributes held)`` rows, in first-occurrence order."""
        objects: list[str] = []
        attributes: list[Attribute] = []
        index: dict = {}
        cells = set()
        for obj, attrs in rows:
            objects.append(obj)
            for attr in attrs:
                k = _attr_key(attr)
                if k not in index:
                    index[k] = len(attributes)
                    attributes.append(attr)
                cells.add((len(objects) - 1, index[k]))
        return cls(tuple(objects), tuple(attributes), frozenset(cells))

    def attribute_index(self, attr: Attribute) -> int:
        k = _attr_key(attr)
        for i, a in enumerate(self.attributes):
            if _attr_key(a) == k:
                return i
        raise ArgumentError(f"unknown attribute {attr}")

    def extents(self) -> list[int]:
        """Object bitmask per attribute (bit ``o`` set when object ``o`` holds it)."""
        masks = [0] * len(self.attributes)
        for o, a in self.incidence:
            masks[a] |= 1 << o
        return masks

    def intent(self, obj: int) -> frozenset[Attribute]:
        return frozenset(self.attributes[a] for o, a in self.incidence if o == obj)


_HEADER_ALIASES = (
    {"system", "systems", "website", "websites", "site", "object"},
    {"role", "roles", "persona"},
    {"actingverb", "actingverbs", "actionverb", "verb", "action", "feature", "features"},
)


def _is_header(fields: list[str]) -> bool:
    normalized = [re.sub(r"[^a-z]", "", f.casefold()) for f in fields]
    return all(n in aliases for n, aliases in zip(normalized, _HEADER_ALIASES))


def parse_triples_csv(text: str) -> TriadicContext:
    """Parse ``system,role,actingVerb`` records preceded by a header line.

    Quoting is not supported: a double quote anywhere is a parse error.
    Duplicate records collapse.
    """
    if text.startswith("\ufeff"):
        text = text[1:]
    records = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if '"' in line:
            raise ParseError("quoted fields are not supported", lineno)
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, found {len(fields)}", lineno)
        if not header_seen:
            if not _is_header(fields):
                raise ParseError("missing header line (system,role,actingVerb)", lineno)
            header_seen = True
            continue
        if not all(fields):
            raise ParseError("empty field", lineno)
        records.append(tuple(fields))
    if not header_seen:
        raise ParseError("missing header line (system,role,actingVerb)")
    return TriadicContext.from_triples(records)


def flatten_pairs(ctx: TriadicContext) -> DyadicContext:
    """Systems as objects, occurring (role; feature) pairs as attributes."""
    pairs = sorted({(r, f) for _, r, f in ctx.triples})
    column = {p: i for i, p in enumerate(pairs)}
    attributes = tuple(UserStory(ctx.roles[r], ctx.features[f]) for r, f in pairs)
    incidence = frozenset((s, column[(r, f)]) for s, r, f in ctx.triples)
    return DyadicContext(ctx.systems, attributes, incidence)


def flatten_features(ctx: TriadicContext) -> DyadicContext:
    """Systems as objects, features as attributes; roles are projected away."""
    incidence = frozenset((s, f) for s, _, f in ctx.triples)
    return DyadicContext(ctx.systems, ctx.features, incidence)


def user_stories(ctx: TriadicContext) -> frozenset[UserStory]:
    return frozenset(UserStory(ctx.roles[r], ctx.features[f]) for _, r, f in ctx.triples)


def stats(ctx: TriadicContext) -> ContextStats:
    return ContextStats(
        n_systems=len(ctx.systems),
        n_roles=len(ctx.roles),
        n_features=len(ctx.features),
        n_triples=len(ctx.triples),
        n_user_stories=len({(r, f) for _, r, f in ctx.triples}),
    )
