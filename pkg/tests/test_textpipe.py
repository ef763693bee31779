"""Cleaning pipeline tests, including the golden two-track round trip."""

import string

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tweetmood import textpipe as tp
from tweetmood.resources import default_dictionaries
from tweetmood.textpipe import (
    RawTweet,
    ReplacementDictionaries,
    Token,
    clean,
    complex_pass,
    group_emojis,
    pos_tag,
    regex_pass,
    split_hashtag,
    tokenize,
)

GOLDEN_TEXT = "@USAIRWAYS is right :-) ! Flying in September #NiceToFly"
GOLDEN_SIMPLE = "twitter-entity is right happy-smily ! flying in september nice to fly"
GOLDEN_COMPLEX = "twitter-entity be right happy-smily ! fly in _date_ pleasant to fly"


@pytest.fixture(scope="module")
def dicts():
    return default_dictionaries()


class TestTokenize:
    def test_golden_fragment(self):
        assert [t.surface for t in tokenize("is right :-) !")] == ["is", "right", ":-)", "!"]

    def test_empty_input(self):
        assert tokenize("") == []

    def test_whitespace_collapse(self):
        assert [t.surface for t in tokenize("a  b")] == ["a", "b"]

    def test_punctuation_split_from_words(self):
        assert [t.surface for t in tokenize("hello, world!")] == ["hello", ",", "world", "!"]

    def test_emoji_single_tokens(self):
        assert [t.surface for t in tokenize("hi 😀😂 there")] == ["hi", "😀", "😂", "there"]

    def test_spans_index_into_source(self):
        text = "ab :-) cd"
        for t in tokenize(text):
            assert text[t.span[0] : t.span[1]] == t.surface

    @given(st.text(alphabet=string.printable + "😀é#@:-)", max_size=60))
    @settings(max_examples=200, deadline=None)
    def test_non_whitespace_characters_recovered(self, text):
        toks = tokenize(text)
        assert "".join(t.surface for t in toks) == "".join(text.split())
        assert all(not any(c.isspace() for c in t.surface) for t in toks)


class TestPosTag:
    def test_verb_suffix(self):
        (tok,) = pos_tag(tokenize("flying"))
        assert tok.pos == "V"

    def test_punctuation(self):
        (tok,) = pos_tag(tokenize("!"))
        assert tok.pos == ","

    def test_hashtag(self):
        (tok,) = pos_tag(tokenize("#NiceToFly"))
        assert tok.pos == "#"

    def test_assorted_rules(self):
        text = "@you http://x.co :-) 42 September quickly the and there"
        tags = [t.pos for t in pos_tag(tokenize(text))]
        assert tags == ["@", "U", "E", "$", "^", "R", "D", "&", "X"]

    def test_unknown_word_gets_fallback(self):
        (tok,) = pos_tag(tokenize("blorpt"))
        assert tok.pos == tp.FALLBACK_TAG == "N"

    def test_inventory_has_25_tags(self):
        assert len(tp.TAGSET) == 25
        assert len(set(tp.TAGSET)) == 25

    def test_custom_tagger_output_validated(self):
        def bad_tagger(tokens):
            return [Token(t.surface, "WAT", t.span) for t in tokens]

        with pytest.raises(ValueError, match="unknown tag"):
            pos_tag(tokenize("hi"), bad_tagger)

    @given(st.text(alphabet=string.printable + "😀éñ", max_size=40))
    @settings(max_examples=150, deadline=None)
    def test_tag_closure(self, text):
        for tok in pos_tag(tokenize(text)):
            assert tok.pos in tp.TAGSET


class TestGroupEmojis:
    def test_golden_emoticon(self, dicts):
        toks = pos_tag(tokenize(":-)"))
        assert group_emojis(toks, dicts.emoji_groups)[0].surface == "happy-smily"

    def test_non_emoji_unchanged(self, dicts):
        toks = pos_tag(tokenize("word"))
        assert group_emojis(toks, dicts.emoji_groups)[0].surface == "word"

    def test_unicode_emoji_lookup(self, dicts):
        toks = pos_tag(tokenize("😀"))
        assert group_emojis(toks, dicts.emoji_groups)[0].surface == "happy-smily"

    def test_unknown_emoji_passes_through(self, dicts):
        toks = pos_tag(tokenize("🦖"))
        assert group_emojis(toks, dicts.emoji_groups)[0].surface == "🦖"


class TestRegexPass:
    def test_mention_keyword(self):
        out = regex_pass(pos_tag(tokenize("@USAIRWAYS")))
        assert [t.surface for t in out] == ["twitter-entity"]

    def test_hashtag_split(self):
        out = regex_pass(pos_tag(tokenize("#NiceToFly")))
        assert [t.surface for t in out] == ["nice", "to", "fly"]

    def test_duplicate_collapse(self):
        out = regex_pass(pos_tag(tokenize("good good")))
        assert [t.surface for t in out] == ["good"]

    def test_url_keyword(self):
        out = regex_pass(pos_tag(tokenize("see https://t.co/abc now")))
        assert [t.surface for t in out] == ["see", tp.URL_KEYWORD, "now"]

    def test_lowercases(self):
        out = regex_pass(pos_tag(tokenize("Flying HIGH")))
        assert [t.surface for t in out] == ["flying", "high"]

    def test_split_hashtag_variants(self):
        assert split_hashtag("#NiceToFly") == ["nice", "to", "fly"]
        assert split_hashtag("#irony") == ["irony"]
        assert split_hashtag("#USA2018") == ["usa", "2018"]

    def test_idempotent(self, dicts):
        toks = pos_tag(tokenize("@User #GoodDay good good https://x.io :-)"))
        once = regex_pass(group_emojis(toks, dicts.emoji_groups))
        twice = regex_pass(once)
        assert [t.surface for t in twice] == [t.surface for t in once]


class TestComplexPass:
    def test_golden_replacements(self, dicts):
        toks = regex_pass(pos_tag(tokenize("Flying in September is nice")))
        out = complex_pass(toks, dicts)
        assert [t.surface for t in out] == ["fly", "in", "_date_", "be", "pleasant"]

    def test_no_dictionary_hits_unchanged(self, dicts):
        toks = regex_pass(pos_tag(tokenize("zebra qwerty")))
        out = complex_pass(toks, dicts)
        assert [t.surface for t in out] == ["zebra", "qwerty"]

    def test_longest_match_phrase(self, dicts):
        toks = regex_pass(pos_tag(tokenize("I love New York City a lot")))
        out = complex_pass(toks, dicts)
        assert "_place_" in [t.surface for t in out]
        assert "york" not in [t.surface for t in out]

    def test_idempotent_on_golden(self, dicts):
        toks = regex_pass(pos_tag(tokenize(GOLDEN_TEXT)))
        once = complex_pass(toks, dicts)
        twice = complex_pass(once, dicts)
        assert [t.surface for t in twice] == [t.surface for t in once]

    @given(st.lists(st.sampled_from(
        "flying september nice luv pleasant new york gr8 one be xyz london".split()
    ), min_size=1, max_size=10))
    @settings(max_examples=100, deadline=None)
    def test_idempotence_property(self, words):
        dicts = default_dictionaries()
        toks = pos_tag([Token(w, None, (0, len(w))) for w in words])
        once = complex_pass(toks, dicts)
        twice = complex_pass(once, dicts)
        assert [t.surface for t in twice] == [t.surface for t in once]


class TestClean:
    def test_golden_simple(self, dicts):
        ct = clean(RawTweet("t1", GOLDEN_TEXT), dicts)
        assert " ".join(ct.simple_surfaces()) == GOLDEN_SIMPLE

    def test_golden_complex(self, dicts):
        ct = clean(RawTweet("t1", GOLDEN_TEXT), dicts)
        assert " ".join(ct.complex_surfaces()) == GOLDEN_COMPLEX

    def test_untransformed_word(self, dicts):
        ct = clean(RawTweet("t2", "hello"), dicts)
        assert ct.simple_surfaces() == ["hello"]
        assert ct.complex_surfaces() == ["hello"]

    def test_empty_tweet_rejected(self, dicts):
        with pytest.raises(ValueError, match="empty tweet"):
            clean(RawTweet("t3", "   "), dicts)

    def test_deterministic(self, dicts):
        a = clean(RawTweet("t4", GOLDEN_TEXT), dicts)
        b = clean(RawTweet("t4", GOLDEN_TEXT), dicts)
        assert a == b

    def test_simple_track_ignores_word_dictionaries(self, dicts):
        # Words with lemma/synonym entries must survive the simple track.
        ct = clean(RawTweet("t5", "flying is nice"), dicts)
        assert ct.simple_surfaces() == ["flying", "is", "nice"]

    def test_both_tracks_nonempty_and_whitespace_free(self, dicts):
        ct = clean(RawTweet("t6", "@only_mention"), dicts)
        assert ct.simple and ct.complex
        for tok in ct.simple + ct.complex:
            assert " " not in tok.surface


class TestDictionaries:
    def test_tsv_loader_rejects_malformed(self, tmp_path):
        bad = tmp_path / "bad.tsv"
        bad.write_text("a\tb\tc\n", encoding="utf-8")
        with pytest.raises(ValueError, match="bad.tsv:1"):
            tp.load_tsv_mapping(bad)

    def test_tsv_loader_skips_comments(self, tmp_path):
        f = tmp_path / "ok.tsv"
        f.write_text("# comment\nKey\tVal\n\n", encoding="utf-8")
        assert tp.load_tsv_mapping(f) == {"key": "val"}

    def test_validate_rejects_synonym_chain(self):
        d = ReplacementDictionaries(
            synonyms={"a": "b", "b": "c"}, wiki={}, ner={}, lemmas={}, emoji_groups={}
        )
        with pytest.raises(ValueError, match="chain"):
            d.validate()

    def test_validate_rejects_unknown_entity_keyword(self):
        d = ReplacementDictionaries(
            synonyms={}, wiki={}, ner={"foo": "_animal_"}, lemmas={}, emoji_groups={}
        )
        with pytest.raises(ValueError, match="entity keyword"):
            d.validate()

    def test_validate_rejects_cross_stage_instability(self):
        # synonym output that the entity table would rewrite on a second pass
        d = ReplacementDictionaries(
            synonyms={"2day": "today"}, wiki={}, ner={"today": "_date_"},
            lemmas={}, emoji_groups={},
        )
        with pytest.raises(ValueError, match="unstable"):
            d.validate()

    def test_shipped_dictionaries_validate(self, dicts):
        dicts.validate()
