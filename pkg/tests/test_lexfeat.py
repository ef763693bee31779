"""Feature extraction tests: syntactic, category, affect, polarity, pruning."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tweetmood import lexfeat
from tweetmood.lexfeat import (
    AffectLexicon,
    CategoryLexicon,
    FeatureVector,
    assemble,
    category_features,
    feature_matrix,
    nrc_hashtag_features,
    polarity_scorer,
    prune_sparse,
    syntactic_features,
)
from tweetmood.resources import (
    default_affect_lexicon,
    default_category_lexicon,
    default_dictionaries,
    default_polarity_lexicon,
    diminisher_words,
    magnifier_words,
)
from tweetmood.textpipe import RawTweet, clean


@pytest.fixture(scope="module")
def dicts():
    return default_dictionaries()


def _clean(text, dicts):
    return clean(RawTweet("t", text), dicts)


class TestSyntactic:
    def test_elongated_flag_set(self, dicts):
        fv = syntactic_features(_clean("wowww that is great", dicts), magnifier_words(), diminisher_words())
        assert fv.as_dict()["long"] == 1.0

    def test_no_elongation_below_threshold(self, dicts):
        fv = syntactic_features(_clean("wow that is great", dicts), magnifier_words(), diminisher_words())
        assert fv.as_dict()["long"] == 0.0

    def test_log_length(self, dicts):
        fv = syntactic_features(
            _clean("one two three four five six seven eight", dicts),
            magnifier_words(), diminisher_words(),
        )
        assert fv.as_dict()["length"] == pytest.approx(math.log(8), abs=1e-12)

    def test_magnifier_and_diminisher_counts(self, dicts):
        fv = syntactic_features(
            _clean("this is really very good but hardly new", dicts),
            magnifier_words(), diminisher_words(),
        )
        d = fv.as_dict()
        assert d["mag"] == 2.0 and d["dim"] == 1.0

    def test_caps_hash_at_irony_flags(self, dicts):
        fv = syntactic_features(
            _clean("WOW @you #sarcasm incoming", dicts), magnifier_words(), diminisher_words()
        )
        d = fv.as_dict()
        assert (d["caps"], d["hash"], d["at"], d["irony"]) == (1.0, 1.0, 1.0, 1.0)

    def test_flags_are_binary_and_finite(self, dicts):
        fv = syntactic_features(_clean("plain words here", dicts), magnifier_words(), diminisher_words())
        d = fv.as_dict()
        for flag in ("long", "caps", "hash", "at", "irony"):
            assert d[flag] in (0.0, 1.0)


class TestCategory:
    def test_cap_at_five(self, tmp_path, dicts):
        lex_file = tmp_path / "cat.tsv"
        lex_file.write_text("jolly\tjoy\t2\nmerry\tjoy\t2\ngleeful\tjoy\t2\n", encoding="utf-8")
        lex = CategoryLexicon.load(lex_file)
        fv = category_features(_clean("jolly merry gleeful", dicts), lex)
        assert fv.as_dict()["joy"] == 5.0

    def test_no_matches_all_zero(self, dicts):
        fv = category_features(_clean("qwerty zxcvb", dicts), default_category_lexicon())
        assert np.all(fv.values == 0.0)
        assert len(fv) == 16

    def test_single_match(self, tmp_path, dicts):
        lex_file = tmp_path / "cat.tsv"
        lex_file.write_text("grumpy\tanger\t1.5\n", encoding="utf-8")
        lex = CategoryLexicon.load(lex_file)
        fv = category_features(_clean("feeling grumpy now", dicts), lex)
        d = fv.as_dict()
        assert d["anger"] == 1.5
        assert sum(v != 0 for v in fv.values) == 1

    def test_emoji_entries_match_raw_tokens(self, dicts):
        fv = category_features(_clean("I am 😠 now", dicts), default_category_lexicon())
        assert fv.as_dict()["anger"] > 0

    def test_values_bounded(self, dicts):
        fv = category_features(_clean("angry furious rage hate mad livid", dicts), default_category_lexicon())
        assert np.all(fv.values >= 0) and np.all(fv.values <= 5)

    def test_shipped_lexicon_has_338_entries(self):
        assert len(default_category_lexicon().entries) == 338

    def test_loader_rejects_bad_score(self, tmp_path):
        f = tmp_path / "cat.tsv"
        f.write_text("word\tjoy\t3\n", encoding="utf-8")
        with pytest.raises(ValueError, match="score"):
            CategoryLexicon.load(f)


class TestNrcHashtag:
    def test_max_over_hashtags(self, tmp_path, dicts):
        f = tmp_path / "aff.tsv"
        f.write_text("spooky\tfear\t0.3\ndread\tfear\t0.8\n", encoding="utf-8")
        lex = AffectLexicon.load(f)
        fv = nrc_hashtag_features(_clean("#spooky #dread stuff", dicts), lex)
        assert fv.as_dict()["hash_fear"] == 0.8

    def test_no_hashtags_all_zero(self, dicts):
        fv = nrc_hashtag_features(_clean("no tags here", dicts), default_affect_lexicon())
        assert fv.values.tolist() == [0.0, 0.0, 0.0, 0.0]

    def test_single_emotion_order(self, tmp_path, dicts):
        f = tmp_path / "aff.tsv"
        f.write_text("grr\tanger\t0.6\n", encoding="utf-8")
        lex = AffectLexicon.load(f)
        fv = nrc_hashtag_features(_clean("#grr", dicts), lex)
        assert fv.names == ("hash_anger", "hash_fear", "hash_joy", "hash_sadness")
        assert fv.values.tolist() == [0.6, 0.0, 0.0, 0.0]

    def test_camel_case_hashtag_words_hit(self, dicts):
        fv = nrc_hashtag_features(_clean("#SoHappy", dicts), default_affect_lexicon())
        assert fv.as_dict()["hash_joy"] > 0

    def test_values_in_unit_interval(self, dicts):
        fv = nrc_hashtag_features(
            _clean("#terrified #ecstatic #heartbroken", dicts), default_affect_lexicon()
        )
        assert np.all(fv.values >= 0) and np.all(fv.values <= 1)


class TestPolarity:
    def test_all_positive(self, dicts):
        lex = {"good": 1.0, "great": 1.0}
        fv = polarity_scorer(_clean("good great", dicts), lex)
        d = fv.as_dict()
        assert d["vader_pos"] == 1.0 and d["blob"] > 0

    def test_no_hits_neutral(self, dicts):
        fv = polarity_scorer(_clean("zxcv qwer", dicts), {})
        d = fv.as_dict()
        assert (d["vader_neg"], d["vader_neu"], d["vader_pos"], d["blob"]) == (0.0, 1.0, 0.0, 0.0)

    def test_mixed_hits_cancel(self, dicts):
        lex = {"good": 1.0, "bad": -1.0}
        fv = polarity_scorer(_clean("good bad stuff", dicts), lex)
        assert fv.as_dict()["blob"] == 0.0

    def test_shipped_lexicon_bounds(self, dicts):
        fv = polarity_scorer(
            _clean("good terrible fine awesome", dicts), default_polarity_lexicon()
        )
        assert -1.0 <= fv.as_dict()["blob"] <= 1.0


class TestAssemble:
    def test_empty(self):
        fv = assemble([])
        assert len(fv) == 0

    def test_disjoint_sizes(self, dicts):
        ct = _clean("happy days", dicts)
        a = nrc_hashtag_features(ct, default_affect_lexicon())
        b = category_features(ct, default_category_lexicon())
        combined = assemble([a, b])
        assert len(combined) == 20
        assert combined.groups["hash_anger"] == "hash_affect"

    def test_duplicate_name_rejected(self):
        a = FeatureVector(("joy",), np.array([1.0]), {"joy": "g1"})
        b = FeatureVector(("joy",), np.array([2.0]), {"joy": "g2"})
        with pytest.raises(ValueError, match="duplicate"):
            assemble([a, b])

    def test_permutation_changes_order_not_values(self):
        a = FeatureVector(("x",), np.array([1.0]), {"x": "a"})
        b = FeatureVector(("y",), np.array([2.0]), {"y": "b"})
        ab, ba = assemble([a, b]), assemble([b, a])
        assert ab.as_dict() == ba.as_dict()
        assert ab.names == ("x", "y") and ba.names == ("y", "x")


def _rows(matrix):
    names = tuple(f"f{i}" for i in range(matrix.shape[1]))
    groups = {n: "g" for n in names}
    return [FeatureVector(names, row, groups) for row in matrix]


class TestPruneSparse:
    def test_below_threshold_dropped(self):
        m = np.zeros((10, 1))
        m[:7, 0] = 1.0
        assert prune_sparse(_rows(m), min_support=8) == []

    def test_boundary_retained(self):
        m = np.zeros((10, 1))
        m[:8, 0] = 1.0
        assert prune_sparse(_rows(m), min_support=8) == ["f0"]

    def test_zero_support_keeps_all(self):
        m = np.zeros((3, 4))
        assert prune_sparse(_rows(m), min_support=0) == ["f0", "f1", "f2", "f3"]

    def test_mismatched_rows_rejected(self):
        a = FeatureVector(("x",), np.array([1.0]), {"x": "g"})
        b = FeatureVector(("y",), np.array([1.0]), {"y": "g"})
        with pytest.raises(ValueError, match="name order"):
            prune_sparse([a, b])

    @given(st.integers(min_value=0, max_value=12))
    @settings(max_examples=30, deadline=None)
    def test_monotone_in_min_support(self, support):
        rng = np.random.default_rng(42)
        m = (rng.uniform(size=(12, 6)) > 0.6).astype(float)
        rows = _rows(m)
        larger = set(prune_sparse(rows, min_support=support))
        smaller = set(prune_sparse(rows, min_support=support + 1))
        assert smaller <= larger


class TestFeatureMatrix:
    def test_stacks_rows(self):
        m = np.arange(6.0).reshape(3, 2)
        names, out = feature_matrix(_rows(m))
        assert names == ("f0", "f1")
        np.testing.assert_array_equal(out, m)

    def test_full_assembly_is_finite(self, dicts):
        ct = _clean("WOW really #SoHappy @you wowww :-)", dicts)
        fv = assemble([
            syntactic_features(ct, magnifier_words(), diminisher_words()),
            category_features(ct, default_category_lexicon()),
            nrc_hashtag_features(ct, default_affect_lexicon()),
            polarity_scorer(ct, default_polarity_lexicon()),
        ])
        assert len(fv) == 8 + 16 + 4 + 4
        assert np.all(np.isfinite(fv.values))
