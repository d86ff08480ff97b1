import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_lexicon
from writekit.errors import DataError, FormatError
from writekit.lexicon import (
    Gloss,
    Lexicon,
    LexiconEntry,
    levenshtein,
    levenshtein_within,
    load_lexicon,
    save_lexicon,
    with_corpus_frequencies,
)

words = st.text(alphabet="abcde", max_size=8)


# ---- levenshtein -------------------------------------------------------------


@pytest.mark.parametrize(
    "a,b,expected",
    [
        ("", "", 0),
        ("abc", "abc", 0),
        ("", "abc", 3),
        ("abc", "", 3),
        ("kitten", "sitting", 3),
        ("ab", "ba", 2),
        ("balo", "balot", 1),
        ("flaw", "lawn", 2),
    ],
)
def test_levenshtein_known_values(a, b, expected):
    assert levenshtein(a, b) == expected


def test_levenshtein_unicode_scalars():
    # precomposed vs decomposed differ at the scalar level; callers normalize
    assert levenshtein("é", "é") == 2


@given(words, words)
def test_levenshtein_symmetry(a, b):
    assert levenshtein(a, b) == levenshtein(b, a)


@given(words, words)
def test_levenshtein_identity_of_indiscernibles(a, b):
    d = levenshtein(a, b)
    assert d >= 0
    assert (d == 0) == (a == b)


@given(words, words, words)
def test_levenshtein_triangle_inequality(a, b, c):
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


@given(words, words, st.integers(min_value=0, max_value=5))
def test_levenshtein_within_agrees_with_full(a, b, limit):
    full = levenshtein(a, b)
    capped = levenshtein_within(a, b, limit)
    if full <= limit:
        assert capped == full
    else:
        assert capped is None


# ---- lexicon construction ----------------------------------------------------


def test_merge_duplicate_headwords():
    lex = Lexicon(
        [
            LexiconEntry("balo", glosses=[Gloss("eng", "house")], pos="n", freq=2, source="d1"),
            LexiconEntry("balo", glosses=[Gloss("eng", "home")], freq=3, source="d2"),
        ]
    )
    entry = lex.get("balo")
    assert entry.freq == 5
    assert [g.text for g in entry.glosses] == ["house", "home"]
    assert entry.pos == "n"
    assert entry.source == "d1"
    assert len(lex) == 1


def test_headwords_normalized():
    lex = Lexicon([LexiconEntry("café")])
    assert "café" in lex
    assert "café" in lex


def test_empty_headword_rejected():
    with pytest.raises(DataError):
        Lexicon([LexiconEntry("  ")])


# ---- approximate lookup --------------------------------------------------------


def test_lookup_approx_orders_by_dist_then_freq_then_alpha(small_lexicon):
    hits = small_lexicon.lookup_approx("tek", max_dist=1, k=10)
    assert [(e.headword, d) for e, d in hits] == [("tek", 0), ("teka", 1)]
    # same dist: freq wins
    lex = make_lexicon(("kata", 5), ("kato", 2), ("katu", 2))
    hits = lex.lookup_approx("kat", max_dist=1, k=10)
    assert [e.headword for e, _ in hits] == ["kata", "kato", "katu"]


def test_lookup_approx_respects_max_dist(small_lexicon):
    assert small_lexicon.lookup_approx("zzzzz", max_dist=2, k=5) == []
    hits = small_lexicon.lookup_approx("balo", max_dist=0, k=5)
    assert [(e.headword, d) for e, d in hits] == [("balo", 0)]


def test_lookup_approx_truncates_to_k():
    lex = make_lexicon(*((f"w{i}", i) for i in range(20)))
    assert len(lex.lookup_approx("w1", max_dist=2, k=3)) == 3


def test_lookup_approx_validation(small_lexicon):
    with pytest.raises(DataError):
        small_lexicon.lookup_approx("x", max_dist=-1)
    with pytest.raises(DataError):
        small_lexicon.lookup_approx("x", k=0)


def test_lookup_approx_brute_force_equivalence(small_lexicon):
    # pruned scan must agree with a direct full-DP filter
    for query in ("balo", "tk", "mnu", "balott", "x"):
        expected = sorted(
            (
                (e.headword, levenshtein(query, e.headword))
                for e in small_lexicon.entries()
                if levenshtein(query, e.headword) <= 2
            ),
            key=lambda item: (item[1], -small_lexicon.get(item[0]).freq, item[0]),
        )
        got = [(e.headword, d) for e, d in small_lexicon.lookup_approx(query, max_dist=2, k=50)]
        assert got == expected


# ---- prefix completion ---------------------------------------------------------


def test_complete_prefix_orders_by_freq_then_alpha():
    lex = make_lexicon(("kaa", 1), ("kab", 5), ("kac", 5), ("zz", 9))
    assert [e.headword for e in lex.complete_prefix("ka", k=10)] == ["kab", "kac", "kaa"]


def test_complete_prefix_empty_prefix_returns_all(small_lexicon):
    got = [e.headword for e in small_lexicon.complete_prefix("", k=100)]
    assert len(got) == len(small_lexicon)
    assert got[0] == "balo"  # highest freq


def test_complete_prefix_no_match(small_lexicon):
    assert small_lexicon.complete_prefix("zz", k=5) == []


def test_complete_prefix_k_and_validation(small_lexicon):
    assert len(small_lexicon.complete_prefix("", k=2)) == 2
    with pytest.raises(DataError):
        small_lexicon.complete_prefix("a", k=0)


# ---- file io -------------------------------------------------------------------


def test_load_lexicon_round_trip(tmp_path, small_lexicon):
    path = tmp_path / "lex.jsonl"
    save_lexicon(small_lexicon, path)
    loaded = load_lexicon(path)
    assert len(loaded) == len(small_lexicon)
    assert loaded.get("balo").glosses == small_lexicon.get("balo").glosses
    assert loaded.get("balo").freq == small_lexicon.get("balo").freq


def test_load_lexicon_merges_duplicates(tmp_path):
    path = tmp_path / "lex.jsonl"
    path.write_text(
        '{"headword": "a", "freq": 1}\n{"headword": "a", "freq": 2}\n', encoding="utf-8"
    )
    assert load_lexicon(path).get("a").freq == 3


@pytest.mark.parametrize(
    "line,match",
    [
        ("{bad", "line 1"),
        ('{"freq": 3}', "headword"),
        ('{"headword": "a", "glosses": [{"lang": "eng"}]}', "gloss"),
        ('{"headword": "a", "freq": -2}', "freq"),
        ('{"headword": "a", "freq": 1.5}', "freq"),
    ],
)
def test_load_lexicon_errors(tmp_path, line, match):
    path = tmp_path / "bad.jsonl"
    path.write_text(line + "\n", encoding="utf-8")
    with pytest.raises(FormatError, match=match):
        load_lexicon(path)


def test_with_corpus_frequencies(small_lexicon):
    relex = with_corpus_frequencies(
        small_lexicon, ["balo balo minu", "balo tek.", "unknownword"]
    )
    assert relex.get("balo").freq == 3
    assert relex.get("minu").freq == 1
    assert relex.get("tek").freq == 1
    assert relex.get("teka").freq == 0
    # original untouched
    assert small_lexicon.get("balo").freq == 9
