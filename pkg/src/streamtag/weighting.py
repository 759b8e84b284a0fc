"""Term weights: IDF, TCoR and the length/mention word weight."""

import math
from dataclasses import dataclass

from ._validation import check_non_negative_real
from .exceptions import EmptyWindowError


@dataclass(frozen=True)
class TermWeightConfig:
    mention_weight: float = 3.0
    per_letter_bonus: float = 0.1
    base_word_weight: float = 1.0

    def __post_init__(self):
        for name in ("mention_weight", "per_letter_bonus", "base_word_weight"):
            object.__setattr__(self, name, check_non_negative_real(getattr(self, name), name))


def idf_from_counts(total_posts: int, doc_freq: int) -> float:
    """Natural-log IDF; unseen terms get ``log(2 * total_posts)``.

    The unseen value is strictly above the largest attainable IDF,
    ``log(total_posts)``, so unseen terms rank as the rarest.
    """
    if total_posts < 1:
        raise EmptyWindowError("IDF is undefined on an empty window")
    if doc_freq <= 0:
        return math.log(total_posts * 2)
    return math.log(total_posts / doc_freq)


def idf(snapshot, word: str) -> float:
    return idf_from_counts(snapshot.total_posts, snapshot.doc_freq(word))


def tcor_from_counts(doc_freq: int, length_sum: int, n_hashtags: int) -> float:
    if doc_freq <= 0:
        return 0.0
    inv_len = 1.0 / (length_sum / doc_freq) if length_sum > 0 else 0.0
    inv_tags = 1.0 / n_hashtags if n_hashtags > 0 else 0.0
    return (inv_len + inv_tags) / 2


def tcor(snapshot, word: str) -> float:
    """Term-corpus relevance: mean of 1/avg-post-length and 1/#hashtags."""
    view = snapshot.term(word, with_seqs=False)
    if view is None:
        return 0.0
    return tcor_from_counts(view.doc_freq, view.length_sum, len(view.cooc))


def word_weight(word: str, config: TermWeightConfig = TermWeightConfig()) -> float:
    if not word:
        raise ValueError("word_weight of an empty word")
    if word.startswith("@"):
        return config.mention_weight
    return config.base_word_weight + config.per_letter_bonus * len(word)
