"""Hashtag classifiers over a window snapshot.

All three classifiers start from the same candidate set: the posts that
contain at least one of the query's highest-IDF terms. Naive Bayes scores
every hashtag seen on a candidate with a weighted *sum* of per-term
posteriors; KNN ranks candidates by the summed TCoR weight of shared terms
and lets the top K vote; the hybrid mixes the two top-n lists.

Every ranking is totally ordered (score, then a per-classifier secondary
key, then hashtag text), so results do not depend on thread scheduling or
dict ordering.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ._validation import check_choice, check_non_negative_real, check_positive_int
from .exceptions import ConfigError
from .preprocessing import Post, PreprocessConfig, ProcessedPost, preprocess
from .weighting import TermWeightConfig, idf_from_counts, tcor_from_counts, word_weight

CLASSIFIERS = ("nb", "knn", "hybrid")


@dataclass(frozen=True)
class ClassifierConfig:
    top_n: int = 3
    knn_k: int = 10
    nb_weight: float = 0.4
    knn_weight: float = 0.6
    idf_query_words: int = 3
    term_weights: TermWeightConfig = field(default_factory=TermWeightConfig)
    classifier: str = "hybrid"

    def __post_init__(self):
        check_positive_int(self.top_n, "top_n")
        check_positive_int(self.knn_k, "knn_k")
        check_positive_int(self.idf_query_words, "idf_query_words")
        nb = check_non_negative_real(self.nb_weight, "nb_weight")
        knn = check_non_negative_real(self.knn_weight, "knn_weight")
        if nb + knn <= 0:
            raise ConfigError("nb_weight + knn_weight must be positive")
        check_choice(self.classifier, CLASSIFIERS, "classifier")


@dataclass(frozen=True)
class Recommendation:
    entries: Tuple[Tuple[str, float], ...] = ()

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def hashtags(self) -> List[str]:
        return [h for h, _ in self.entries]

    @property
    def scores(self) -> List[float]:
        return [s for _, s in self.entries]

    def to_list(self):
        return [{"hashtag": h, "score": s} for h, s in self.entries]


EMPTY = Recommendation()


class _Query:
    """Per-query cache of term statistics drawn from one snapshot."""

    def __init__(self, snapshot, query: ProcessedPost, config: ClassifierConfig):
        self.snapshot = snapshot
        self.config = config
        self.terms = tuple(sorted(query.terms))
        self.total = snapshot.total_posts
        if self.terms and self.total:
            self.views = snapshot.lookup(self.terms)
        else:
            self.views = {}
        self._selected = None

    @property
    def selected(self) -> Tuple[str, ...]:
        """The query terms with the highest IDF, rarest first."""
        if self._selected is None:
            if not self.views:
                self._selected = ()
            else:
                ranked = sorted(
                    self.terms,
                    key=lambda t: (-idf_from_counts(self.total, self._df(t)), t),
                )
                self._selected = tuple(ranked[: self.config.idf_query_words])
        return self._selected

    def _df(self, term):
        view = self.views.get(term)
        return 0 if view is None else view.doc_freq

    def candidate_seqs(self) -> np.ndarray:
        arrays = [self.views[t].seqs for t in self.selected if self.views.get(t) is not None]
        if not arrays:
            return np.empty(0, dtype=np.int64)
        return np.unique(np.concatenate(arrays))

    def candidate_hashtags(self) -> List[str]:
        tags = set()
        for t in self.selected:
            view = self.views.get(t)
            if view is not None:
                tags.update(view.cooc)
        return sorted(tags)

    def weight(self, term) -> float:
        return word_weight(term, self.config.term_weights)


def _top(items, n):
    return Recommendation(tuple(items[:n]))


# ---------------------------------------------------------------------------
# candidate retrieval


def similar_posts(snapshot, query: ProcessedPost, config: Optional[ClassifierConfig] = None) -> set:
    """Ids of window posts sharing at least one of the query's top-IDF terms."""
    q = _Query(snapshot, query, config or ClassifierConfig())
    return set(snapshot.post_ids(q.candidate_seqs()))


# ---------------------------------------------------------------------------
# Naive Bayes


def _nb_scores(q: _Query) -> Dict[str, float]:
    hashtags = q.candidate_hashtags()
    if not hashtags:
        return {}
    tag_counts = q.snapshot.hashtag_counts(hashtags)
    total = q.total
    present = [(t, q.views[t], q.weight(t)) for t in q.terms if q.views.get(t) is not None]
    scores = {}
    for h in hashtags:
        n_h = tag_counts[h]
        p_h = n_h / total
        parts = []
        for _, view, weight in present:
            c = view.cooc.get(h)
            if not c:
                continue
            p_w_given_h = c / n_h
            p_w = view.doc_freq / total
            parts.append(p_w_given_h * p_h / p_w * weight)
        scores[h] = math.fsum(parts)
    return scores


def _nb(q: _Query) -> Recommendation:
    scores = _nb_scores(q)
    ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return _top(ranked, q.config.top_n)


def nb_classify(snapshot, query: ProcessedPost, config: Optional[ClassifierConfig] = None) -> Recommendation:
    """Summed Naive Bayes: score(h) = sum_w P(w|h) P(h) / P(w) * weight(w)."""
    return _nb(_Query(snapshot, query, config or ClassifierConfig()))


# ---------------------------------------------------------------------------
# K nearest neighbours


def _similarities(q: _Query, cand: np.ndarray) -> np.ndarray:
    base = q.snapshot.base_seq
    seq_parts, weight_parts = [], []
    # Terms are visited in sorted order so each post's similarity is
    # accumulated in a fixed order, independent of how it is computed.
    for t in q.terms:
        view = q.views.get(t)
        if view is None or not len(view.seqs):
            continue
        w = tcor_from_counts(view.doc_freq, view.length_sum, len(view.cooc)) * q.weight(t)
        seq_parts.append(view.seqs)
        weight_parts.append(np.full(len(view.seqs), w))
    seqs = np.concatenate(seq_parts) - base
    weights = np.concatenate(weight_parts)
    sims = np.bincount(seqs, weights=weights, minlength=q.total)
    return sims[cand - base]


def _neighbors(q: _Query):
    """The K most similar candidates as (seqs, sims), best first."""
    cand = q.candidate_seqs()
    if not len(cand):
        return cand, np.empty(0)
    sims = _similarities(q, cand)
    keep = sims > 0
    cand, sims = cand[keep], sims[keep]
    k = q.config.knn_k
    if len(sims) > k:
        kth = np.partition(sims, len(sims) - k)[len(sims) - k]
        keep = sims >= kth
        cand, sims = cand[keep], sims[keep]
    # Ties on similarity go to the more recent post.
    order = np.lexsort((-cand, -sims))[:k]
    return cand[order], sims[order]


def _knn(q: _Query) -> Tuple[Recommendation, Dict[str, float]]:
    seqs, sims = _neighbors(q)
    if not len(seqs):
        return EMPTY, {}
    counts: Dict[str, int] = {}
    support: Dict[str, list] = {}
    for tags, sim in zip(q.snapshot.hashtags_by_seq(seqs), sims.tolist()):
        for h in tags:
            counts[h] = counts.get(h, 0) + 1
            support.setdefault(h, []).append(sim)
    support_sum = {h: math.fsum(v) for h, v in support.items()}
    ranked = sorted(counts, key=lambda h: (-counts[h], -support_sum[h], h))
    return _top([(h, float(counts[h])) for h in ranked], q.config.top_n), support_sum


def knn_classify(snapshot, query: ProcessedPost, config: Optional[ClassifierConfig] = None) -> Recommendation:
    """TCoR-weighted KNN: the K most similar candidates vote one per hashtag."""
    return _knn(_Query(snapshot, query, config or ClassifierConfig()))[0]


# ---------------------------------------------------------------------------
# hybrid


def _minmax(rec: Recommendation) -> Dict[str, float]:
    if not rec.entries:
        return {}
    lo, hi = min(rec.scores), max(rec.scores)
    if hi == lo:
        return {h: 1.0 for h in rec.hashtags}
    return {h: (s - lo) / (hi - lo) for h, s in rec.entries}


def combine(nb: Recommendation, knn: Recommendation, config: ClassifierConfig) -> Recommendation:
    """Weighted vote of two top-n lists, tie-broken by normalized scores."""
    nb_tags, knn_tags = set(nb.hashtags), set(knn.hashtags)
    nb_norm, knn_norm = _minmax(nb), _minmax(knn)
    combined = {}
    for h in nb_tags | knn_tags:
        score = 0.0
        if h in nb_tags:
            score += config.nb_weight
        if h in knn_tags:
            score += config.knn_weight
        combined[h] = score
    ranked = sorted(
        combined,
        key=lambda h: (-combined[h], -(nb_norm.get(h, 0.0) + knn_norm.get(h, 0.0)), h),
    )
    return _top([(h, combined[h]) for h in ranked], config.top_n)


def _hybrid(q: _Query) -> Recommendation:
    return combine(_nb(q), _knn(q)[0], q.config)


def hybrid_classify(snapshot, query: ProcessedPost, config: Optional[ClassifierConfig] = None) -> Recommendation:
    return _hybrid(_Query(snapshot, query, config or ClassifierConfig()))


_DISPATCH = {"nb": _nb, "knn": lambda q: _knn(q)[0], "hybrid": _hybrid}


def classify(snapshot, query: ProcessedPost, config: Optional[ClassifierConfig] = None) -> Recommendation:
    """Run the classifier named by ``config.classifier``."""
    config = config or ClassifierConfig()
    q = _Query(snapshot, query, config)
    if not q.views:
        return EMPTY
    return _DISPATCH[config.classifier](q)


def as_query(post: ProcessedPost) -> ProcessedPost:
    """Strip labels so the post can be used as a query."""
    return ProcessedPost(post.id, post.words, post.mentions, frozenset())


def recommend(window, raw_post, config: Optional[ClassifierConfig] = None,
              preprocess_config: Optional[PreprocessConfig] = None) -> Recommendation:
    """Preprocess a raw post and classify it against a fresh snapshot."""
    if isinstance(raw_post, str):
        raw_post = Post("", 0, raw_post)
    query = as_query(preprocess(raw_post, preprocess_config))
    return classify(window.snapshot(), query, config)
