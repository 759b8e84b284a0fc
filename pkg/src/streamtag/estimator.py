"""scikit-learn style wrappers around the window and classifiers."""

from typing import List

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._validation import check_choice, check_positive_int
from .classifiers import CLASSIFIERS, ClassifierConfig, Recommendation, as_query, classify
from .preprocessing import Post, PreprocessConfig, ProcessedPost, default_stopwords, load_stopwords, preprocess
from .weighting import TermWeightConfig
from .window import ModelWindow


def _check_posts(X) -> List:
    """Accept an iterable of raw strings or ``Post`` objects."""
    if isinstance(X, (str, bytes, Post)):
        raise ValueError("expected an iterable of posts, got a single post; wrap it in a list")
    try:
        items = list(X)
    except TypeError:
        raise ValueError(f"expected an iterable of posts, got {type(X).__name__}") from None
    out = []
    for i, x in enumerate(items):
        if isinstance(x, Post):
            out.append(x)
        elif isinstance(x, str):
            out.append(Post(str(i), 0, x))
        else:
            raise ValueError(f"element {i} is {type(x).__name__}, expected str or Post")
    return out


def _check_labels(y, n):
    if y is None:
        return None
    labels = [frozenset(h.lstrip("#").lower() for h in ([ys] if isinstance(ys, str) else ys)) for ys in y]
    if len(labels) != n:
        raise ValueError(f"y has {len(labels)} entries for {n} posts")
    return labels


def _resolve_stopwords(stopwords):
    if stopwords is None:
        return default_stopwords()
    if isinstance(stopwords, str):
        return load_stopwords(stopwords)
    return frozenset(stopwords)


class TextPreprocessor(TransformerMixin, BaseEstimator):
    """Stateless transformer from raw posts to ``ProcessedPost`` objects."""

    def __init__(self, stopwords=None, min_word_length=3, stemming=False, include_hashtags=False):
        self.stopwords = stopwords
        self.min_word_length = min_word_length
        self.stemming = stemming
        self.include_hashtags = include_hashtags

    def _config(self):
        return PreprocessConfig(
            stopwords=_resolve_stopwords(self.stopwords),
            min_word_length=self.min_word_length,
            stemming=bool(self.stemming),
            include_hashtags=bool(self.include_hashtags),
        )

    def fit(self, X=None, y=None):
        self.config_ = self._config()
        return self

    def transform(self, X) -> List[ProcessedPost]:
        config = getattr(self, "config_", None) or self._config()
        return [preprocess(p, config) for p in _check_posts(X)]


class HashtagRecommender(BaseEstimator):
    """Sliding-window hashtag recommender.

    ``fit`` fills a fresh window from labeled posts (hashtags are read from
    the text, or from ``y`` when given); ``partial_fit`` streams more posts
    through it, evicting the oldest; ``predict`` returns the top hashtags for
    each post with its own hashtags removed from the features.
    """

    def __init__(self, window_size=100_000, classifier="hybrid", top_n=3, knn_k=10,
                 nb_weight=0.4, knn_weight=0.6, idf_query_words=3, mention_weight=3.0,
                 per_letter_bonus=0.1, base_word_weight=1.0, stemming=False,
                 include_hashtags=False, stopwords=None, min_word_length=3):
        self.window_size = window_size
        self.classifier = classifier
        self.top_n = top_n
        self.knn_k = knn_k
        self.nb_weight = nb_weight
        self.knn_weight = knn_weight
        self.idf_query_words = idf_query_words
        self.mention_weight = mention_weight
        self.per_letter_bonus = per_letter_bonus
        self.base_word_weight = base_word_weight
        self.stemming = stemming
        self.include_hashtags = include_hashtags
        self.stopwords = stopwords
        self.min_word_length = min_word_length

    def _configs(self):
        check_positive_int(self.window_size, "window_size")
        check_choice(self.classifier, CLASSIFIERS, "classifier")
        classifier_config = ClassifierConfig(
            top_n=self.top_n,
            knn_k=self.knn_k,
            nb_weight=self.nb_weight,
            knn_weight=self.knn_weight,
            idf_query_words=self.idf_query_words,
            term_weights=TermWeightConfig(self.mention_weight, self.per_letter_bonus, self.base_word_weight),
            classifier=self.classifier,
        )
        preprocess_config = PreprocessConfig(
            stopwords=_resolve_stopwords(self.stopwords),
            min_word_length=self.min_word_length,
            stemming=bool(self.stemming),
            include_hashtags=bool(self.include_hashtags),
        )
        return classifier_config, preprocess_config

    def _check_fitted(self):
        if not hasattr(self, "window_"):
            raise NotFittedError("HashtagRecommender is not fitted; call fit first")

    def _labeled(self, X, y):
        posts = _check_posts(X)
        labels = _check_labels(y, len(posts))
        for i, post in enumerate(posts):
            pp = preprocess(post, self.preprocess_config_)
            if labels is not None:
                pp = ProcessedPost(pp.id, pp.words, pp.mentions, labels[i])
            if pp.hashtags:
                yield pp
            else:
                self.n_skipped_ += 1

    def fit(self, X, y=None):
        self.classifier_config_, self.preprocess_config_ = self._configs()
        self.window_ = ModelWindow(self.window_size)
        self.n_skipped_ = 0
        self.window_.extend(self._labeled(X, y))
        return self

    def partial_fit(self, X, y=None):
        if not hasattr(self, "window_"):
            return self.fit(X, y)
        self.window_.extend(self._labeled(X, y))
        return self

    def recommend(self, X) -> List[Recommendation]:
        self._check_fitted()
        snapshot = self.window_.snapshot()
        config = self.classifier_config_
        return [
            classify(snapshot, as_query(preprocess(p, self.preprocess_config_)), config)
            for p in _check_posts(X)
        ]

    def predict(self, X) -> List[List[str]]:
        return [rec.hashtags for rec in self.recommend(X)]

    def score(self, X, y=None) -> float:
        """Fraction of posts with at least one correct recommendation."""
        self._check_fitted()
        posts = _check_posts(X)
        labels = _check_labels(y, len(posts))
        if labels is None:
            labels = [preprocess(p, self.preprocess_config_).hashtags for p in posts]
        recs = self.predict(posts)
        if not posts:
            return 0.0
        return sum(bool(set(r) & set(t)) for r, t in zip(recs, labels)) / len(posts)
