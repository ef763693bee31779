"""Access to the dictionaries and lexicons shipped with the package.

The shipped contents are illustrative; the file formats are the contract.
Point the loaders at your own files to swap any of them out.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from .lexfeat import AffectLexicon, CategoryLexicon, load_polarity_lexicon
from .textpipe import ReplacementDictionaries, load_tsv_mapping, load_word_list

AFFECT_EMOTION_NAMES = ("anger", "fear", "joy", "sadness")


def data_path(name: str) -> Path:
    path = Path(str(resources.files("tweetmood") / "data" / name))
    if not path.exists():
        raise FileNotFoundError(f"packaged data file missing: {name}")
    return path


@lru_cache(maxsize=1)
def default_dictionaries() -> ReplacementDictionaries:
    dicts = ReplacementDictionaries(
        synonyms=load_tsv_mapping(data_path("synonyms.tsv")),
        wiki=load_tsv_mapping(data_path("wiki.tsv")),
        ner=load_tsv_mapping(data_path("ner.tsv")),
        lemmas=load_tsv_mapping(data_path("lemmas.tsv")),
        emoji_groups=load_tsv_mapping(data_path("emoji_groups.tsv"), lowercase_keys=False),
    )
    dicts.validate()
    return dicts


@lru_cache(maxsize=1)
def default_category_lexicon() -> CategoryLexicon:
    return CategoryLexicon.load(data_path("category_lexicon.tsv"))


@lru_cache(maxsize=1)
def default_affect_lexicon() -> AffectLexicon:
    return AffectLexicon.load(data_path("affect_intensity.tsv"))


@lru_cache(maxsize=1)
def default_polarity_lexicon() -> dict[str, float]:
    return load_polarity_lexicon(data_path("polarity.tsv"))


@lru_cache(maxsize=1)
def magnifier_words() -> frozenset[str]:
    return frozenset(load_word_list(data_path("magnifiers.txt")))


@lru_cache(maxsize=1)
def diminisher_words() -> frozenset[str]:
    return frozenset(load_word_list(data_path("diminishers.txt")))


@lru_cache(maxsize=1)
def distant_keywords() -> dict[str, list[str]]:
    """Roughly 40 hand-compiled keywords per emotion for distant
    supervision."""
    return {
        emotion: load_word_list(data_path(f"keywords_{emotion}.txt"))
        for emotion in AFFECT_EMOTION_NAMES
    }
