"""Lexicon and syntactic scalar features computed from cleaned tweets.

Feature values are assembled into named, ordered vectors with a group
label per feature, mirroring how downstream reports aggregate related
columns. Lexicon matching happens on the raw token stream (before emoji
grouping and hashtag splitting) so emoji and hashtag entries can hit.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .textpipe import CleanedTweet, split_hashtag, tokenize

NAMED_CATEGORIES = (
    "anger", "disappointed", "fear", "hopeful", "joy", "lonely", "love",
    "negative", "neutral", "positive", "sadness", "surprise",
)
DEFAULT_EXTRA_CATEGORIES = ("anticipation", "disgust", "optimism", "trust")
ALLOWED_CATEGORY_SCORES = (0.5, 1.0, 1.5, 2.0)
CATEGORY_SCORE_CAP = 5.0

AFFECT_EMOTIONS = ("anger", "fear", "joy", "sadness")


@dataclass(frozen=True)
class FeatureVector:
    """Ordered (name, value) pairs with a group label per feature."""

    names: tuple[str, ...]
    values: np.ndarray
    groups: Mapping[str, str]

    def __post_init__(self):
        if len(self.names) != len(self.values):
            raise ValueError("names and values length mismatch")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate feature names")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature values must be finite")

    def __len__(self) -> int:
        return len(self.names)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values.tolist()))


def _vector(pairs: Sequence[tuple[str, float]], group_of) -> FeatureVector:
    names = tuple(name for name, _ in pairs)
    values = np.array([v for _, v in pairs], dtype=np.float64)
    groups = {name: group_of(name) for name in names}
    return FeatureVector(names=names, values=values, groups=groups)


def assemble(parts: Sequence[FeatureVector]) -> FeatureVector:
    """Order-stable concatenation; duplicate names are an error."""
    names: list[str] = []
    groups: dict[str, str] = {}
    chunks = []
    for part in parts:
        for n in part.names:
            if n in groups:
                raise ValueError(f"duplicate feature name across parts: {n!r}")
            groups[n] = part.groups[n]
        names.extend(part.names)
        chunks.append(part.values)
    values = np.concatenate(chunks) if chunks else np.zeros(0)
    return FeatureVector(names=tuple(names), values=values, groups=groups)


def feature_matrix(rows: Sequence[FeatureVector]) -> tuple[tuple[str, ...], np.ndarray]:
    if not rows:
        raise ValueError("no feature rows")
    names = rows[0].names
    for r in rows[1:]:
        if r.names != names:
            raise ValueError("feature rows disagree on name order")
    return names, np.stack([r.values for r in rows])


def prune_sparse(rows: Sequence[FeatureVector], min_support: int = 8) -> list[str]:
    """Keep features that are nonzero in at least ``min_support`` rows."""
    names, matrix = feature_matrix(rows)
    support = (matrix != 0).sum(axis=0)
    return [n for n, s in zip(names, support) if s >= min_support]


def select_features(fv: FeatureVector, retained: Sequence[str]) -> FeatureVector:
    keep = set(retained)
    pairs = [(n, v) for n, v in zip(fv.names, fv.values) if n in keep]
    return _vector(pairs, lambda n: fv.groups[n])


# -- lexicons ----------------------------------------------------------------


@dataclass(frozen=True)
class CategoryLexicon:
    """Emotion-category word/emoji lexicon: token -> (category, score).

    Scores are restricted to {0.5, 1, 1.5, 2}. Sixteen categories: the
    twelve core labels are fixed, the remaining four are configurable."""

    entries: Mapping[str, tuple[str, float]]
    categories: tuple[str, ...]

    @classmethod
    def load(cls, path, extra_categories: Iterable[str] = DEFAULT_EXTRA_CATEGORIES) -> "CategoryLexicon":
        categories = tuple(sorted(set(NAMED_CATEGORIES) | set(extra_categories)))
        if len(categories) != 16:
            raise ValueError(f"expected 16 categories, got {len(categories)}")
        entries: dict[str, tuple[str, float]] = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected token<TAB>category<TAB>score")
            token, category, score_s = parts
            score = float(score_s)
            if category not in categories:
                raise ValueError(f"{path}:{lineno}: unknown category {category!r}")
            if score not in ALLOWED_CATEGORY_SCORES:
                raise ValueError(f"{path}:{lineno}: score {score} outside {ALLOWED_CATEGORY_SCORES}")
            if token in entries:
                raise ValueError(f"{path}:{lineno}: duplicate token {token!r}")
            entries[token] = (category, score)
        return cls(entries=entries, categories=categories)


@dataclass(frozen=True)
class AffectLexicon:
    """Affect intensity lexicon: word -> {emotion: score in [0, 1]}."""

    entries: Mapping[str, Mapping[str, float]]

    @classmethod
    def load(cls, path) -> "AffectLexicon":
        entries: dict[str, dict[str, float]] = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected token<TAB>emotion<TAB>score")
            word, emotion, score_s = parts
            score = float(score_s)
            if emotion not in AFFECT_EMOTIONS:
                raise ValueError(f"{path}:{lineno}: unknown emotion {emotion!r}")
            if not 0.0 <= score <= 1.0:
                raise ValueError(f"{path}:{lineno}: score {score} outside [0, 1]")
            entries.setdefault(word.lower(), {})[emotion] = score
        return cls(entries=entries)


def load_polarity_lexicon(path) -> dict[str, float]:
    """word -> signed polarity in [-1, 1]."""
    table: dict[str, float] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected word<TAB>score")
        score = float(parts[1])
        if not -1.0 <= score <= 1.0:
            raise ValueError(f"{path}:{lineno}: polarity {score} outside [-1, 1]")
        table[parts[0].lower()] = score
    return table


# -- feature extractors ----------------------------------------------------------------

_ELONGATION_RE = re.compile(r"(.)\1{2,}")
_HASHTAG_RE = re.compile(r"#\w+")
_IRONY_RE = re.compile(r"#(irony|sarcasm)\b", re.IGNORECASE)


def _raw_surfaces(t: CleanedTweet) -> list[str]:
    return [tok.surface for tok in tokenize(t.text)]


def syntactic_features(
    t: CleanedTweet,
    magnifiers: frozenset[str] | set[str],
    diminishers: frozenset[str] | set[str],
) -> FeatureVector:
    """Counts and flags: magnifiers, diminishers, log token count,
    elongation ('wowww'), all-caps words, '#', '@', and irony hashtags.

    Caps, '#', '@' and irony are read off the raw text because cleaning
    lower-cases and rewrites those; elongation and the word counts use the
    simple variant, which never normalizes repeated letters."""
    surfaces = t.simple_surfaces()
    raw = _raw_surfaces(t)
    mag = float(sum(s in magnifiers for s in surfaces))
    dim = float(sum(s in diminishers for s in surfaces))
    length = math.log(len(surfaces))
    long_flag = float(any(_ELONGATION_RE.search(s) for s in surfaces))
    caps = float(any(s.isalpha() and s.isupper() and len(s) >= 2 for s in raw))
    has_hash = float("#" in t.text)
    has_at = float("@" in t.text)
    irony = float(bool(_IRONY_RE.search(t.text)))
    pairs = [
        ("mag", mag), ("dim", dim), ("length", length), ("long", long_flag),
        ("caps", caps), ("hash", has_hash), ("at", has_at), ("irony", irony),
    ]
    return _vector(pairs, lambda n: n)


def category_features(t: CleanedTweet, lex: CategoryLexicon) -> FeatureVector:
    """Per category, the sum of matched token scores capped at 5.

    Matches run over raw tokens (lower-cased words, original emojis), so
    emoji entries are still visible."""
    totals = dict.fromkeys(lex.categories, 0.0)
    for surface in _raw_surfaces(t):
        entry = lex.entries.get(surface) or lex.entries.get(surface.lower())
        if entry is not None:
            category, score = entry
            totals[category] = min(totals[category] + score, CATEGORY_SCORE_CAP)
    return _vector([(c, totals[c]) for c in lex.categories], lambda n: n)


def nrc_hashtag_features(t: CleanedTweet, lex: AffectLexicon) -> FeatureVector:
    """Per emotion, the largest lexicon score over all hashtag words."""
    best = dict.fromkeys(AFFECT_EMOTIONS, 0.0)
    for hashtag in _HASHTAG_RE.findall(t.text):
        for word in split_hashtag(hashtag):
            for emotion, score in lex.entries.get(word, {}).items():
                best[emotion] = max(best[emotion], score)
    pairs = [(f"hash_{e}", best[e]) for e in AFFECT_EMOTIONS]
    return _vector(pairs, lambda n: "hash_affect")


def polarity_scorer(t: CleanedTweet, lex: Mapping[str, float]) -> FeatureVector:
    """Deterministic stand-in for external polarity predictors.

    Emits negative/neutral/positive token proportions plus the signed
    mean polarity of matched tokens (0 when nothing matches)."""
    surfaces = t.simple_surfaces()
    scores = [lex[s] for s in surfaces if s in lex]
    n = len(surfaces)
    neg = sum(s < 0 for s in scores) / n
    pos = sum(s > 0 for s in scores) / n
    neu = 1.0 - neg - pos
    polarity = float(np.mean(scores)) if scores else 0.0
    pairs = [
        ("vader_neg", neg), ("vader_neu", neu), ("vader_pos", pos),
        ("blob", polarity),
    ]
    return _vector(pairs, lambda n: "blob" if n == "blob" else "vader")
