"""Two-track tweet cleaning pipeline.

Raw tweet text is tokenized, POS tagged, emoji-grouped and regex-normalized
into a "simple" token sequence; the "complex" sequence additionally applies
dictionary lemmatization, entity replacement, synonym replacement and a
wiki-derived replacement dictionary. All steps are pure functions over
immutable tokens, so cleaning is deterministic and safe to parallelize
per tweet. Dictionaries are plain TSV files and read-only after load.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Mapping, Sequence

logger = logging.getLogger(__name__)

# 25-tag inventory in the style of common Twitter POS taggers:
# nominal (N ^ S Z O), verbal (V L M), modifiers (A R), function words
# (D P & T X Y), twitter-specific (# @ ~ U E), plus !, $, punctuation and G.
TAGSET = (
    "N", "O", "^", "S", "Z", "V", "L", "M", "A", "R", "!", "D", "P",
    "&", "T", "X", "Y", "#", "@", "~", "U", "E", "$", ",", "G",
)
FALLBACK_TAG = "N"

ENTITY_KEYWORDS = ("_date_", "_number_", "_brand_", "_place_", "_name_")

URL_KEYWORD = "_url_"
MENTION_KEYWORD = "twitter-entity"


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str | None
    span: tuple[int, int]


@dataclass(frozen=True)
class RawTweet:
    id: str
    text: str


@dataclass(frozen=True)
class CleanedTweet:
    """Simple and complex cleaned variants of one tweet.

    ``text`` keeps the raw source so downstream features can still see
    casing, hashtags and emojis that cleaning rewrites.
    """

    id: str
    text: str
    simple: tuple[Token, ...]
    complex: tuple[Token, ...]

    def simple_surfaces(self) -> list[str]:
        return [t.surface for t in self.simple]

    def complex_surfaces(self) -> list[str]:
        return [t.surface for t in self.complex]


# -- tokenizer ----------------------------------------------------------------

_EMOTICON = r"""(?:
    [<>]?[:;=8xX]['^-]?[)(\]\[dDpP/\\|}{*3oO]+
  | [)(\]\[dDpP/\\|}{]+['^-]?[:;=8xX][<>]?
  | :'\(+ | :'\)+ | <3+
)"""

_EMOJI_BASE = (
    "\U0001F300-\U0001F5FF"
    "\U0001F600-\U0001F64F"
    "\U0001F680-\U0001F6FF"
    "\U0001F900-\U0001F9FF"
    "\U0001FA70-\U0001FAFF"
    "\U0001F1E6-\U0001F1FF"
    "☀-➿"
    "⬀-⯿"
    "❤"
)
# One emoji per token: a base character plus skin tones, variation
# selectors, and ZWJ-joined continuations. Adjacent distinct emojis split.
_EMOJI_MODS = "\U0001F3FB-\U0001F3FF️"
_EMOJI = f"[{_EMOJI_BASE}](?:[{_EMOJI_MODS}]|‍[{_EMOJI_BASE}])*"

# The master pattern compiles in VERBOSE mode (the emoticon block needs
# it), so '#' must be escaped outside character classes.
_URL = r"(?:https?://\S+|www\.\S+)"
_MENTION = r"@\w+"
_HASHTAG = r"\#\w+"
_NUMBER = r"[+-]?\d+(?:[.,:/]\d+)*%?(?:st|nd|rd|th)?"
_WORD = r"\w+(?:['’-]\w+)*"
_ELLIPSIS = r"(?:\.{2,}|…)"

_TOKEN_RE = re.compile(
    "|".join(
        f"(?:{p})"
        for p in (_URL, _MENTION, _HASHTAG, _EMOTICON, _EMOJI, _ELLIPSIS, _NUMBER, _WORD, r"\S")
    ),
    re.VERBOSE,
)

_URL_RE = re.compile(_URL + r"\Z")
_EMOTICON_RE = re.compile(_EMOTICON + r"\Z", re.VERBOSE)
_EMOJI_RE = re.compile(_EMOJI + r"\Z")
_NUMBER_RE = re.compile(_NUMBER + r"\Z")
_ELLIPSIS_RE = re.compile(_ELLIPSIS + r"\Z")


def tokenize(text: str) -> list[Token]:
    """Split text into word, punctuation, emoticon/emoji, URL, mention and
    hashtag tokens. Only whitespace is dropped: concatenating the surfaces
    recovers every non-whitespace character of the input."""
    return [
        Token(surface=m.group(0), pos=None, span=(m.start(), m.end()))
        for m in _TOKEN_RE.finditer(text)
    ]


# -- POS tagging ----------------------------------------------------------------

Tagger = Callable[[Sequence[Token]], list[Token]]

_WORD_TAGS: dict[str, str] = {}
_WORD_TAGS.update(dict.fromkeys(
    ("i", "me", "you", "he", "she", "it", "we", "they", "him", "her", "us",
     "them", "who", "whom", "what", "this", "that", "these", "those",
     "someone", "something", "anyone", "anything", "everyone", "everything",
     "nobody", "nothing", "myself", "yourself", "y'all", "u"), "O"))
_WORD_TAGS.update(dict.fromkeys(
    ("the", "a", "an", "some", "any", "no", "every", "each", "all", "both",
     "my", "your", "his", "its", "our", "their", "another", "either",
     "neither"), "D"))
_WORD_TAGS.update(dict.fromkeys(
    ("in", "on", "at", "of", "for", "with", "from", "to", "by", "about",
     "as", "into", "through", "after", "over", "between", "out", "against",
     "during", "without", "before", "under", "around", "among", "off", "up",
     "down", "near", "since", "until", "till", "upon", "via", "if",
     "because", "while", "although", "though", "unless", "whether"), "P"))
_WORD_TAGS.update(dict.fromkeys(("and", "or", "but", "nor"), "&"))
_WORD_TAGS["there"] = "X"
_WORD_TAGS["not"] = "R"
_WORD_TAGS.update(dict.fromkeys(
    ("oh", "ooh", "wow", "hey", "hi", "hello", "lol", "lmao", "rofl", "haha",
     "hahaha", "omg", "yay", "ugh", "hmm", "yeah", "yep", "nope", "please",
     "thanks", "thx", "huh", "yo", "ok", "okay"), "!"))
_WORD_TAGS.update(dict.fromkeys(
    ("be", "am", "is", "are", "was", "were", "been", "being", "do", "does",
     "did", "done", "have", "has", "had", "having", "will", "would", "shall",
     "should", "can", "could", "may", "might", "must", "get", "gets", "got",
     "gotten", "go", "goes", "went", "gone", "make", "makes", "made", "say",
     "says", "said", "see", "sees", "saw", "seen", "know", "knows", "knew",
     "known", "think", "thinks", "thought", "take", "takes", "took", "taken",
     "come", "comes", "came", "want", "wants", "need", "needs", "feel",
     "feels", "felt", "look", "looks", "give", "gives", "gave", "given",
     "find", "finds", "found", "tell", "tells", "told", "ask", "asks",
     "seem", "seems", "leave", "let", "lets", "keep", "keeps", "put",
     "can't", "won't", "don't", "doesn't", "didn't", "isn't", "aren't",
     "wasn't", "weren't", "ain't", "couldn't", "shouldn't", "wouldn't"), "V"))
_WORD_TAGS.update(dict.fromkeys(
    ("i'm", "you're", "we're", "they're", "it's", "that's", "he's", "she's",
     "there's", "what's", "who's", "i'll", "you'll", "we'll", "he'll",
     "she'll", "i've", "you've", "we've", "they've", "i'd", "you'd", "we'd"), "L"))
_WORD_TAGS.update(dict.fromkeys(
    ("good", "bad", "great", "nice", "happy", "sad", "right", "wrong", "big",
     "small", "new", "old", "best", "better", "worst", "worse", "cool",
     "awesome", "amazing", "terrible", "awful", "free", "hot", "cold",
     "easy", "hard", "high", "low", "long", "short", "real", "sure", "fun",
     "crazy", "weird", "cute", "sweet", "sick", "proud", "angry", "mad",
     "scared", "afraid", "excited", "bored", "tired", "lonely", "alone",
     "pleasant"), "A"))


def _tag_word(surface: str) -> str:
    if _URL_RE.match(surface):
        return "U"
    if len(surface) > 1 and surface[0] == "#":
        return "#"
    if len(surface) > 1 and surface[0] == "@":
        return "@"
    if _EMOTICON_RE.match(surface) or _EMOJI_RE.match(surface):
        return "E"
    lower = surface.lower()
    if lower == "rt" or _ELLIPSIS_RE.match(surface):
        return "~"
    if _NUMBER_RE.match(surface):
        return "$"
    if not any(c.isalnum() for c in surface):
        return ","
    if lower in _WORD_TAGS:
        return _WORD_TAGS[lower]
    if lower.endswith("'s") and len(surface) > 2:
        return "Z" if surface[0].isupper() else "S"
    if len(lower) >= 5 and (lower.endswith("ing") or lower.endswith("ed")):
        return "V"
    if len(lower) >= 4 and lower.endswith("ly"):
        return "R"
    if surface[0].isupper():
        return "^"
    if lower.endswith(("ful", "less", "ous", "ive", "able", "ible", "ish", "ic", "al", "ary")):
        return "A"
    return FALLBACK_TAG


class RuleTagger:
    """Default POS tagger: token-shape and suffix/lexicon rules over the
    fixed 25-tag inventory. Context-free by design; good enough to give
    the tag embeddings a consistent signal."""

    def __call__(self, tokens: Sequence[Token]) -> list[Token]:
        return [replace(t, pos=_tag_word(t.surface)) for t in tokens]


def pos_tag(tokens: Sequence[Token], tagger: Tagger | None = None) -> list[Token]:
    """Fill the ``pos`` field of every token.

    Tag closure is enforced here regardless of which tagger ran: every
    emitted tag must belong to the 25-tag inventory."""
    tagged = (tagger or RuleTagger())(tokens)
    for t in tagged:
        if t.pos not in TAGSET:
            raise ValueError(f"tagger produced unknown tag {t.pos!r} for {t.surface!r}")
    return tagged


# -- cleaning passes ----------------------------------------------------------------


def group_emojis(tokens: Sequence[Token], emoji_groups: Mapping[str, str]) -> list[Token]:
    """Replace every known emoji or emoticon with its group keyword.

    Unknown emojis pass through unchanged and are logged."""
    out = []
    for t in tokens:
        target = emoji_groups.get(t.surface)
        if target is not None:
            out.append(replace(t, surface=target))
            continue
        if _EMOTICON_RE.match(t.surface) or _EMOJI_RE.match(t.surface):
            logger.debug("unknown emoji passed through: %r", t.surface)
        out.append(t)
    return out


_CAMEL_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+")


def split_hashtag(surface: str) -> list[str]:
    """Break a #CamelCasedHashtag into lower-cased words."""
    return [w.lower() for w in _CAMEL_RE.findall(surface.lstrip("#"))]


def regex_pass(tokens: Sequence[Token], tagger: Tagger | None = None) -> list[Token]:
    """Shared normalization: URL and mention keywords, hashtag splitting,
    lower-casing, and collapsing immediately repeated tokens.

    Words produced by hashtag splitting are re-tagged, since their '#' tag
    no longer describes them."""
    tagger = tagger or RuleTagger()
    expanded: list[Token] = []
    for t in tokens:
        if t.pos == "U" or _URL_RE.match(t.surface):
            expanded.append(replace(t, surface=URL_KEYWORD))
        elif len(t.surface) > 1 and t.surface[0] == "@":
            expanded.append(replace(t, surface=MENTION_KEYWORD))
        elif len(t.surface) > 1 and t.surface[0] == "#":
            words = split_hashtag(t.surface)
            expanded.extend(
                pos_tag([Token(w, None, t.span) for w in words], tagger)
            )
        else:
            expanded.append(t)
    lowered = [
        replace(t, surface=t.surface.lower()) if t.surface != t.surface.lower() else t
        for t in expanded
    ]
    collapsed: list[Token] = []
    for t in lowered:
        if collapsed and collapsed[-1].surface == t.surface:
            continue
        collapsed.append(t)
    return collapsed


@dataclass(frozen=True)
class ReplacementDictionaries:
    """Replacement tables for the complex cleaning track.

    All keys and values are lower-case; ``ner`` and ``wiki`` keys may be
    multi-word phrases matched longest-first. ``emoji_groups`` keys keep
    their original case (emoticons are case-sensitive)."""

    synonyms: Mapping[str, str]
    wiki: Mapping[str, str]
    ner: Mapping[str, str]
    lemmas: Mapping[str, str]
    emoji_groups: Mapping[str, str]

    def validate(self) -> None:
        for name in ("synonyms", "wiki", "ner", "lemmas"):
            table = getattr(self, name)
            for k in table:
                if k != k.lower():
                    raise ValueError(f"{name} key not lower-cased: {k!r}")
        bad = set(self.ner.values()) - set(ENTITY_KEYWORDS)
        if bad:
            raise ValueError(f"ner values outside the entity keyword set: {sorted(bad)}")
        for v in self.synonyms.values():
            if self.synonyms.get(v, v) != v:
                raise ValueError(f"synonym chain via {v!r}: replacement output is itself replaced")
        for v in self.lemmas.values():
            if self.lemmas.get(v, v) != v:
                raise ValueError(f"lemma value {v!r} is not a lemma fixed point")
        # Single-word outputs of any stage must survive the whole chain
        # unchanged, otherwise complex_pass would not be idempotent.
        outputs = set(self.lemmas.values()) | set(self.synonyms.values())
        outputs |= set(self.ner.values()) | set(self.wiki.values())
        for w in outputs:
            if " " in w:
                raise ValueError(f"replacement value must be a single token: {w!r}")
            if self._chain_word(w) != w:
                raise ValueError(f"replacement output {w!r} is unstable under re-cleaning")

    def _chain_word(self, w: str) -> str:
        w = self.lemmas.get(w, w)
        w = self.ner.get(w, w)
        w = self.synonyms.get(w, w)
        return self.wiki.get(w, w)


def _phrase_replace(tokens: list[Token], table: Mapping[str, str]) -> list[Token]:
    """Longest-match phrase replacement over lower-case surfaces."""
    if not table:
        return tokens
    max_len = max(k.count(" ") + 1 for k in table)
    out: list[Token] = []
    i = 0
    while i < len(tokens):
        hit = None
        for k in range(min(max_len, len(tokens) - i), 0, -1):
            phrase = " ".join(t.surface for t in tokens[i : i + k])
            if phrase in table:
                hit = (k, table[phrase])
                break
        if hit is None:
            out.append(tokens[i])
            i += 1
        else:
            k, keyword = hit
            span = (tokens[i].span[0], tokens[i + k - 1].span[1])
            out.append(Token(keyword, tokens[i].pos, span))
            i += k
    return out


def complex_pass(tokens: Sequence[Token], dicts: ReplacementDictionaries) -> list[Token]:
    """Additional complex-track steps, in order: lemma lookup, entity
    phrase replacement, synonym replacement, wiki replacement.

    Idempotent on its own output for dictionaries that pass
    ``ReplacementDictionaries.validate``."""
    out = [replace(t, surface=dicts.lemmas.get(t.surface, t.surface)) for t in tokens]
    out = _phrase_replace(out, dicts.ner)
    out = [replace(t, surface=dicts.synonyms.get(t.surface, t.surface)) for t in out]
    return _phrase_replace(out, dicts.wiki)


def clean(
    raw: RawTweet,
    dicts: ReplacementDictionaries,
    tagger: Tagger | None = None,
) -> CleanedTweet:
    """Run the full two-track pipeline on one tweet."""
    if not raw.text.strip():
        raise ValueError("empty tweet")
    tokens = tokenize(raw.text)
    tagged = pos_tag(tokens, tagger)
    grouped = group_emojis(tagged, dicts.emoji_groups)
    simple = regex_pass(grouped, tagger)
    cplx = complex_pass(simple, dicts)
    return CleanedTweet(id=raw.id, text=raw.text, simple=tuple(simple), complex=tuple(cplx))


# -- dictionary files ----------------------------------------------------------------


def load_tsv_mapping(path, lowercase_keys: bool = True) -> dict[str, str]:
    """Read a key<TAB>value file; '#'-prefixed lines are comments."""
    table: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected key<TAB>value, got {line!r}")
        key, value = parts
        table[key.lower() if lowercase_keys else key] = value.lower()
    return table


def load_word_list(path) -> list[str]:
    """One lower-case word per line; '#'-prefixed lines are comments."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.append(line.lower())
    return words
