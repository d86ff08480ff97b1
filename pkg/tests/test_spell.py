import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_lexicon
from writekit.errors import DataError, FormatError
from writekit.lexicon import levenshtein
from writekit.predict import WordPredictor
from writekit.spell import (
    EDIT_OPS,
    TypoModel,
    TypoPair,
    check_sentence,
    check_word,
    corrupt,
    evaluate_corrector,
    gen_typo_pairs,
    load_typo_pairs,
    save_typo_pairs,
    suggest,
)

MODEL = TypoModel(alphabet="abcdelmnorstu")


# ---- typo model -------------------------------------------------------------


def test_typo_model_validation():
    with pytest.raises(DataError):
        TypoModel(ops=())
    with pytest.raises(DataError):
        TypoModel(ops=("swap",))
    with pytest.raises(DataError):
        TypoModel(alphabet="")


def test_typo_model_from_lexicon():
    lex = make_lexicon(("balo", 2), ("minu", 1))
    model = TypoModel.from_lexicon(lex)
    assert model.alphabet == "abilmnou"
    assert model.ops == EDIT_OPS


# ---- corrupt ----------------------------------------------------------------


def test_corrupt_single_edit_is_distance_one():
    for seed in range(30):
        bad, edits = corrupt("salto", 1, MODEL, seed=seed)
        assert len(edits) == 1
        assert levenshtein(bad, "salto") == 1


def test_corrupt_is_deterministic_per_seed():
    assert corrupt("salto", 2, MODEL, seed=9) == corrupt("salto", 2, MODEL, seed=9)
    outcomes = {corrupt("salto", 1, MODEL, seed=s)[0] for s in range(40)}
    assert len(outcomes) > 1


def test_corrupt_edit_log_replays():
    # log positions refer to the original word; replaying high-to-low
    # must rebuild the corrupted form
    for seed in range(25):
        bad, edits = corrupt("lantern", 2, TypoModel(), seed=seed)
        chars = list("lantern")
        for e in sorted(edits, key=lambda e: -e.pos):
            if e.op == "substitute":
                chars[e.pos] = e.char
            elif e.op == "delete":
                assert chars[e.pos] == e.char
                del chars[e.pos]
            else:
                chars.insert(e.pos, e.char)
        assert "".join(chars) == bad


def test_corrupt_more_edits_than_chars_degrades_to_insert():
    bad, edits = corrupt("ab", 4, MODEL, seed=1)
    assert len(edits) == 4
    assert len(bad) >= 2  # at least the two extra inserts can't shrink below this? inserts only add
    assert sum(1 for e in edits if e.op == "insert") >= 2


def test_corrupt_substitute_never_reuses_original_char():
    model = TypoModel(ops=("substitute",), alphabet="ab")
    for seed in range(20):
        bad, edits = corrupt("a", 1, model, seed=seed)
        assert bad == "b"
    # single-letter alphabet cannot substitute; falls through to insert
    degenerate = TypoModel(ops=("substitute",), alphabet="a")
    bad, edits = corrupt("a", 1, degenerate, seed=0)
    assert edits[0].op == "insert"
    assert bad == "aa"


def test_corrupt_rejects_zero_edits():
    with pytest.raises(DataError):
        corrupt("word", 0, MODEL)


@settings(max_examples=60, deadline=None)
@given(
    st.text(alphabet="abcde", min_size=1, max_size=10),
    st.integers(min_value=1, max_value=3),
    st.integers(min_value=0, max_value=99),
)
def test_corrupt_distance_bounded_by_edits(word, n_edits, seed):
    bad, edits = corrupt(word, n_edits, MODEL, seed=seed)
    assert len(edits) == n_edits
    assert levenshtein(bad, word) <= n_edits


# ---- gen_typo_pairs -----------------------------------------------------------


def test_gen_typo_pairs_one_edit_per_sentence():
    sentences = ["balo minu se", "teka ralo"]
    pairs = gen_typo_pairs(sentences, MODEL, seed=3)
    assert len(pairs) == 2
    for pair, original in zip(pairs, sentences):
        assert pair.correct == original
        assert len(pair.edits) == 1
        assert pair.incorrect != original
        assert not pair.skipped


def test_gen_typo_pairs_deterministic():
    sentences = ["balo minu se", "teka ralo", "mola duna"]
    assert gen_typo_pairs(sentences, MODEL, seed=5) == gen_typo_pairs(
        sentences, MODEL, seed=5
    )
    assert gen_typo_pairs(sentences, MODEL, seed=5) != gen_typo_pairs(
        sentences, MODEL, seed=6
    )


def test_gen_typo_pairs_skips_non_alphabetic():
    pairs = gen_typo_pairs(["123 456 ...", "?!"], MODEL, seed=0)
    assert all(p.skipped for p in pairs)
    assert pairs[0].incorrect == "123 456 ..."


def test_gen_typo_pairs_edit_positions_are_sentence_offsets():
    pairs = gen_typo_pairs(["balo minu"], MODEL, seed=4)
    (pair,) = pairs
    (edit,) = pair.edits
    assert 0 <= edit.pos <= len(pair.correct)
    if edit.op in ("substitute", "insert"):
        assert pair.incorrect[edit.pos] == edit.char
    else:
        assert pair.correct[edit.pos] == edit.char


def test_typo_pairs_round_trip(tmp_path):
    pairs = gen_typo_pairs(["balo minu se", "teka ralo"], MODEL, seed=8)
    path = tmp_path / "typos.jsonl"
    save_typo_pairs(pairs, path)
    assert load_typo_pairs(path) == pairs


def test_load_typo_pairs_errors(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text("{broken\n", encoding="utf-8")
    with pytest.raises(FormatError, match="line 1"):
        load_typo_pairs(path)
    path.write_text('{"incorrect": "x"}\n', encoding="utf-8")
    with pytest.raises(FormatError, match="correct"):
        load_typo_pairs(path)


# ---- check_word / suggest -------------------------------------------------------


def test_check_word_membership(small_lexicon):
    assert check_word("balo", small_lexicon)
    assert not check_word("balp", small_lexicon)
    assert not check_word("", small_lexicon)


def test_check_word_normalizes(small_lexicon):
    lex = make_lexicon(("café", 1))
    assert check_word("café", lex)  # decomposed input


def test_suggest_exact_match_first(small_lexicon):
    # "tek" is itself a headword with lower freq than its neighbors
    got = suggest("tek", small_lexicon, k=3)
    assert got[0].token == "tek"
    assert got[0].dist == 0


def test_suggest_ranks_by_noisy_channel_score(small_lexicon):
    # one edit from both "balo"(freq 9) and "balot"(freq 1): frequency wins
    got = suggest("balox", small_lexicon, k=3)
    tokens = [c.token for c in got]
    assert tokens[0] == "balo"
    assert "balot" in tokens
    scores = [c.score for c in got]
    assert scores == sorted(scores, reverse=True)


def test_suggest_respects_max_dist(small_lexicon):
    assert suggest("zzzzzz", small_lexicon, max_dist=2) == []
    got = suggest("bal", small_lexicon, max_dist=1, k=10)
    assert {c.token for c in got} == {"balo"}


def test_suggest_distances_are_exact_levenshtein(small_lexicon):
    for word in ("balo", "blao", "mnu", "tekka"):
        for c in suggest(word, small_lexicon, max_dist=2, k=10):
            assert c.dist == levenshtein(word, c.token)
            assert c.token in small_lexicon


def test_suggest_with_lm_prior(small_lexicon):
    lm = WordPredictor(max_context=2).fit(["minu teka", "minu teka", "minu tek"])
    # after "minu", "teka" is twice as likely as "tek"; both are 1 edit from "tek_"? use "tka"
    with_ctx = suggest("tek", small_lexicon, lm=lm, context=["minu"], k=3)
    assert with_ctx[0].token == "tek"  # exact match still pinned first
    rest = [c.token for c in with_ctx[1:]]
    assert "teka" in rest


def test_suggest_lm_changes_ranking():
    lex = make_lexicon(("mast", 1), ("most", 1))
    lm = WordPredictor(max_context=2).fit(["the most", "the most", "a mast"])
    got = suggest("mst", lex, lm=lm, context=["the"], k=2)
    assert got[0].token == "most"
    flat = suggest("mst", lex, k=2)
    assert flat[0].token == "mast"  # alphabetical tie without the lm


def test_suggest_edit_penalty_tradeoff():
    # dist-2-but-frequent vs dist-1-but-rare flips with the penalty weight
    lex = make_lexicon(("aaa", 500), ("abcb", 0))
    assert suggest("abc", lex, k=1, edit_penalty=0.5)[0].token == "aaa"
    assert suggest("abc", lex, k=1, edit_penalty=10.0)[0].token == "abcb"


def test_suggest_validation(small_lexicon):
    with pytest.raises(DataError):
        suggest("x", small_lexicon, k=0)
    with pytest.raises(DataError):
        suggest("x", small_lexicon, edit_penalty=-1.0)


# ---- check_sentence ---------------------------------------------------------------


def test_check_sentence_flags_only_unknown_words(small_lexicon):
    flags = check_sentence("balo mnu, 42 ...", small_lexicon)
    assert [f.token for f in flags] == ["mnu"]
    (flag,) = flags
    assert flag.suggestions[0].token == "minu"


def test_check_sentence_spans_index_the_sentence(small_lexicon):
    sentence = "balo blao teka"
    flags = check_sentence(sentence, small_lexicon)
    (flag,) = flags
    assert sentence[flag.start : flag.end] == flag.token == "blao"


def test_check_sentence_clean_sentence_no_flags(small_lexicon):
    assert check_sentence("balo minu teka.", small_lexicon) == []


def test_check_sentence_uses_preceding_context_with_lm():
    lex = make_lexicon(("mast", 1), ("most", 1), ("the", 5))
    lm = WordPredictor(max_context=2).fit(["the most", "the most", "a mast"])
    flags = check_sentence("the mst", lex, lm=lm)
    assert flags[0].suggestions[0].token == "most"


def test_check_sentence_k_limits_suggestions(small_lexicon):
    flags = check_sentence("blo", small_lexicon, k=1)
    assert len(flags[0].suggestions) == 1


# ---- evaluate_corrector --------------------------------------------------------------


@pytest.fixture()
def toy_eval_lexicon():
    return make_lexicon(("balo", 9), ("minu", 5), ("teka", 3), ("salto", 2))


def test_evaluate_corrector_perfect_on_recoverable_fixture(toy_eval_lexicon):
    model = TypoModel.from_lexicon(toy_eval_lexicon)
    sentences = ["balo minu", "teka salto", "minu teka balo"]
    pairs = gen_typo_pairs(sentences, model, seed=2)
    report = evaluate_corrector(pairs, toy_eval_lexicon)
    assert report.n == 3
    assert report.accuracy_top3 >= report.accuracy_top1
    assert 0.0 <= report.accuracy_top1 <= 1.0
    assert report.chrf_mean > 50.0


def test_evaluate_corrector_identity_pairs_score_perfect(toy_eval_lexicon):
    pairs = [TypoPair("balo minu", "balo minu", [])]
    report = evaluate_corrector(pairs, toy_eval_lexicon)
    assert report.accuracy_top1 == 1.0
    assert report.accuracy_top3 == 1.0
    assert report.chrf_mean == 100.0


def test_evaluate_corrector_top3_catches_rank2():
    # craft a lexicon where the right word is rank 2 by frequency
    lex = make_lexicon(("bat", 9), ("bit", 1))
    pairs = [TypoPair("bt", "bit", [])]
    report = evaluate_corrector(pairs, lex, max_dist=1)
    assert report.accuracy_top1 == 0.0
    assert report.accuracy_top3 == 1.0


def test_evaluate_corrector_unrecoverable_counts_zero():
    lex = make_lexicon(("zzz", 1))
    pairs = [TypoPair("qqq", "aaa", [])]
    report = evaluate_corrector(pairs, lex)
    assert report.accuracy_top1 == 0.0
    assert report.accuracy_top3 == 0.0


def test_evaluate_corrector_validation(toy_eval_lexicon):
    with pytest.raises(DataError):
        evaluate_corrector([], toy_eval_lexicon)
    with pytest.raises(DataError):
        evaluate_corrector([TypoPair("x", "   ", [])], toy_eval_lexicon)


# ---- round-trip property ---------------------------------------------------------------


def test_round_trip_rank1_recovery_singleton_neighborhood():
    # pairwise-distant words: every distance-1 corruption has a unique
    # lexicon word within distance 1, so rank 1 must recover it
    words = ["aaa", "bbb", "ccc", "ddd", "eee"]
    lex = make_lexicon(*((w, 1) for w in words))
    model = TypoModel.from_lexicon(lex)
    for word in words:
        for seed in range(10):
            bad, _ = corrupt(word, 1, model, seed=seed)
            got = suggest(bad, lex, max_dist=2, k=3)
            assert got, f"no suggestion for {bad!r}"
            assert got[0].token == word
