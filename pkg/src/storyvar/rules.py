"""Deterministic application of implications to a seed set of user stories."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Generic, Hashable, Iterable, TypeVar

from .context import UserStory
from .implications import Implication

__all__ = [
    "ClosureResult",
    "DiffReport",
    "close",
    "fixpoint_close",
    "diff_implications",
    "diff_stories",
]

log = logging.getLogger(__name__)

T = TypeVar("T", bound=Hashable)


@dataclass(frozen=True)
class ClosureResult:
    seed: frozenset[UserStory]
    derived: frozenset[UserStory]
    applied: tuple[Implication, ...]


@dataclass(frozen=True)
class DiffReport(Generic[T]):
    """Set comparison of a left (reference) and right (candidate) collection."""

    left_only: frozenset
    right_only: frozenset
    both: frozenset

    @property
    def counts(self) -> tuple[int, int, int]:
        return (len(self.left_only), len(self.right_only), len(self.both))

    @property
    def left_total(self) -> int:
        return len(self.left_only) + len(self.both)

    @property
    def right_total(self) -> int:
        return len(self.right_only) + len(self.both)


def _canonical(imps: Iterable[Implication]) -> list[Implication]:
    return sorted(imps, key=Implication.sort_key)


def _warn_unknown(seed: frozenset[UserStory], imps: list[Implication]) -> None:
    known = set()
    for imp in imps:
        known.add(imp.conclusion)
        if imp.premise is not None:
            known.add(imp.premise)
    for story in sorted(seed - known):
        log.warning("seed story %s does not occur in the implication set", story)


def close(seed: Iterable[UserStory], imps: Iterable[Implication], *, warn_unknown: bool = True) -> ClosureResult:
    """Apply every implication whose premise is empty or in ``seed``, once.

    An implication counts as applied even when its conclusion is already in
    the seed. On a direct basis (such as any set produced by
    :func:`~storyvar.implications.mine_implications`) one pass is enough to
    reach the closure.
    """
    seed = frozenset(seed)
    imps = _canonical(imps)
    if warn_unknown:
        _warn_unknown(seed, imps)
    applied = tuple(i for i in imps if i.premise is None or i.premise in seed)
    derived = seed | {i.conclusion for i in applied}
    return ClosureResult(seed, frozenset(derived), applied)


def fixpoint_close(seed: Iterable[UserStory], imps: Iterable[Implication]) -> ClosureResult:
    """Apply implications repeatedly until no new story appears."""
    seed = frozenset(seed)
    imps = _canonical(imps)
    derived = set(seed)
    fired: set = set()
    while True:
        fresh = [i for i in imps if i.key not in fired and (i.premise is None or i.premise in derived)]
        if not fresh:
            break
        fired.update(i.key for i in fresh)
        derived.update(i.conclusion for i in fresh)
    applied = tuple(i for i in imps if i.key in fired)
    return ClosureResult(seed, frozenset(derived), applied)


def _diff(left: set, right: set) -> DiffReport:
    return DiffReport(frozenset(left - right), frozenset(right - left), frozenset(left & right))


def diff_implications(left: Iterable[Implication], right: Iterable[Implication]) -> DiffReport:
    """Compare on (premise, conclusion) identity; supports are ignored."""
    return _diff({i.key for i in left}, {i.key for i in right})


def diff_stories(left: Iterable[UserStory], right: Iterable[UserStory]) -> DiffReport:
    return _diff(set(left), set(right))
