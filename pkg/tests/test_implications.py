import random

import pytest
from hypothesis import given, settings, strategies as st

from storyvar import (
    DyadicContext,
    Implication,
    ImplicationSet,
    ParseError,
    UserStory,
    format_implications,
    mine_implications,
    parse_implications,
    verify_implication,
)
from storyvar.errors import ArgumentError
from storyvar.implications import context_fingerprint

from synth import as_triples, oracle_implications, random_context

A_S = UserStory("Administrator", "s")
FU_S = UserStory("FinalUser", "s")

EXCERPT = "<4>  => (user;search)\n<2> (communityManager;moderateComment) => (user;viewComment)\n"


def test_manga_pairs_hold_known_implications(manga_pairs):
    imps = mine_implications(manga_pairs)
    assert Implication(2, A_S, FU_S) in imps.implications
    assert Implication(3, None, FU_S) in imps.implications


def test_manga_pairs_match_oracle(manga_pairs):
    assert as_triples(mine_implications(manga_pairs)) == oracle_implications(manga_pairs)


def test_single_object_single_attribute():
    dy = DyadicContext.from_rows([("o", [UserStory("a", "b")])])
    assert list(mine_implications(dy)) == [Implication(1, None, UserStory("a", "b"))]


def test_skip_universal_conclusions(manga_pairs):
    imps = mine_implications(manga_pairs, skip_universal_conclusions=True)
    assert Implication(2, A_S, FU_S) not in imps.implications
    assert Implication(3, None, FU_S) in imps.implications
    assert as_triples(imps) == oracle_implications(manga_pairs, skip_universal_conclusions=True)


def test_min_support_must_be_positive(manga_pairs):
    with pytest.raises(ArgumentError):
        mine_implications(manga_pairs, 0)


def test_plain_attributes_rejected():
    with pytest.raises(ArgumentError):
        mine_implications(DyadicContext.from_rows([("o", ["search"])]))


def test_verify(manga_pairs):
    assert verify_implication(manga_pairs, Implication(2, A_S, FU_S))
    assert not verify_implication(manga_pairs, Implication(2, FU_S, A_S))
    assert not verify_implication(manga_pairs, Implication(3, FU_S, A_S))
    assert not verify_implication(manga_pairs, Implication(1, A_S, FU_S))  # wrong support
    with pytest.raises(ArgumentError):
        verify_implication(manga_pairs, Implication(1, UserStory("x", "y"), FU_S))
    with pytest.raises(ArgumentError):
        verify_implication(manga_pairs, Implication(2, A_S, UserStory("administrator", "S")))


def test_canonical_order():
    a, b, c = UserStory("a", "x"), UserStory("b", "x"), UserStory("c", "x")
    s = ImplicationSet([Implication(2, b, c), Implication(2, a, c), Implication(4, None, b), Implication(2, None, a)])
    assert [str(i) for i in s] == ["<4>  => (b;x)", "<2>  => (a;x)", "<2> (a;x) => (c;x)", "<2> (b;x) => (c;x)"]


def test_duplicate_rejected():
    a, b = UserStory("a", "x"), UserStory("b", "x")
    with pytest.raises(ArgumentError):
        ImplicationSet([Implication(2, a, b), Implication(3, a, b)])


def test_format_excerpt_lines():
    text = format_implications([
        Implication(4, None, UserStory("user", "search")),
        Implication(2, UserStory("communityManager", "moderateComment"), UserStory("user", "viewComment")),
    ])
    assert text == EXCERPT
    assert format_implications(ImplicationSet()) == ""


def test_parse_excerpt_wrapped_as_printed():
    text = "<4>  => (user;search)\n<2> (communityManager;moderateComment) \n    => (user;viewComment)\n"
    imps = parse_implications(text)
    assert [i.support for i in imps] == [4, 2]
    assert format_implications(imps) == EXCERPT


def test_parse_tolerates_whitespace_and_blank_lines():
    assert parse_implications("\n\n   <4>   =>   (user;search)   \n\n") == parse_implications("<4>  => (user;search)\n")


def test_parse_grouped_conclusions_are_split():
    imps = parse_implications("<2> (a;x) => (b;x), (c;x)\n")
    assert [(str(i.premise), str(i.conclusion)) for i in imps] == [("(a;x)", "(b;x)"), ("(a;x)", "(c;x)")]


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("garbage\n", 1),
        ("<4>  => (user;search)\n\nnope\n", 3),
        ("<2> (a;x) => (a;X)\n", 1),
        ("<2> (a;x) => (b;x)\n<3> (a;x) => (b;x)\n", 2),
        ("<0>  => (a;x)\n", 1),
        ("<2> (a;x)\n", 1),
    ],
)
def test_parse_errors(text, lineno):
    with pytest.raises(ParseError) as err:
        parse_implications(text)
    assert err.value.lineno == lineno


def test_fingerprint_is_order_independent(manga_pairs):
    rows = [("MangaHome", sorted(manga_pairs.intent(2))), ("MangaStore", sorted(manga_pairs.intent(1))),
            ("MyManga", sorted(manga_pairs.intent(0)))]
    assert context_fingerprint(DyadicContext.from_rows(rows)) == context_fingerprint(manga_pairs)
    assert mine_implications(manga_pairs).fingerprint == context_fingerprint(manga_pairs)
    assert len(context_fingerprint(manga_pairs)) == 16


def test_oracle_equivalence_on_random_contexts():
    rng = random.Random(7)
    for _ in range(200):
        dy = random_context(rng)
        m = rng.choice([1, 1, 2, 3])
        assert as_triples(mine_implications(dy, m)) == oracle_implications(dy, m)
        assert as_triples(mine_implications(dy, m, skip_universal_conclusions=True)) == oracle_implications(
            dy, m, skip_universal_conclusions=True
        )


@st.composite
def contexts(draw):
    n_obj = draw(st.integers(1, 8))
    n_attr = draw(st.integers(1, 8))
    attrs = [UserStory(f"r{i % 3}", f"f{i}") for i in range(n_attr)]
    rows = [(f"o{o}", draw(st.lists(st.sampled_from(attrs), unique=True))) for o in range(n_obj)]
    return DyadicContext.from_rows(rows)


@given(contexts())
def test_soundness(dy):
    for imp in mine_implications(dy):
        assert verify_implication(dy, imp)


@given(contexts(), st.booleans())
def test_transitively_closed(dy, minimal):
    imps = mine_implications(dy, skip_universal_conclusions=minimal)
    keys = {i.key for i in imps}
    for p, c in keys:
        if p is None:
            continue
        for c2, d in keys:
            if c2 == c and d != p:
                assert (p, d) in keys


@given(contexts(), st.integers(1, 4), st.integers(0, 4))
def test_raising_min_support_only_removes(dy, m, extra):
    low = set(mine_implications(dy, m).implications)
    high = set(mine_implications(dy, m + extra).implications)
    assert high <= low


@settings(max_examples=200)
@given(contexts(), st.integers(1, 3))
def test_format_parse_round_trip(dy, m):
    imps = mine_implications(dy, m)
    again = parse_implications(format_implications(imps))
    assert again == imps
    assert format_implications(again) == format_implications(imps)
