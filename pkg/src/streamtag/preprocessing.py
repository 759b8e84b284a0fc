"""Corpus parsing and the post cleaning pipeline.

A raw post is split on whitespace, URLs are dropped, hashtags become class
labels, mentions are kept apart as high-weight features and whatever is left
is lowercased, stripped of punctuation and filtered.
"""

import json
import os
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import FrozenSet, Iterable, Iterator, List, Optional, Tuple

from nltk.stem.porter import PorterStemmer

from ._validation import check_positive_int
from .exceptions import ParseError

MAX_TEXT_BYTES = 560
URL_PREFIXES = ("http://", "https://", "www.")
STOPWORDS_ENV = "STREAMTAG_STOPWORDS"


@dataclass(frozen=True)
class Post:
    id: str
    timestamp: int
    text: str


@dataclass(frozen=True)
class ProcessedPost:
    id: str
    words: Tuple[str, ...]
    mentions: Tuple[str, ...] = ()
    hashtags: FrozenSet[str] = frozenset()

    @property
    def word_count(self) -> int:
        return len(self.words) + len(self.mentions)

    @property
    def terms(self) -> FrozenSet[str]:
        """Distinct feature terms (words and mentions) of the post."""
        return frozenset(self.words) | frozenset(self.mentions)

    def to_dict(self):
        return {
            "id": self.id,
            "words": list(self.words),
            "mentions": list(self.mentions),
            "hashtags": sorted(self.hashtags),
            "word_count": self.word_count,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            id=str(d["id"]),
            words=tuple(d.get("words", ())),
            mentions=tuple(d.get("mentions", ())),
            hashtags=frozenset(d.get("hashtags", ())),
        )

    def render(self) -> str:
        """Turn the post back into text that preprocesses to the same post."""
        parts = list(self.words) + list(self.mentions)
        parts += ["#" + h for h in sorted(self.hashtags)]
        return " ".join(parts)


# ---------------------------------------------------------------------------
# stop words


def _parse_stopword_lines(lines):
    words = set()
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line.lower())
    return frozenset(words)


@lru_cache(maxsize=None)
def default_stopwords() -> FrozenSet[str]:
    text = resources.files("streamtag").joinpath("data/stopwords_en.txt").read_text("utf-8")
    return _parse_stopword_lines(text.splitlines())


def load_stopwords(path=None) -> FrozenSet[str]:
    """Load a stop-word file, one word per line with ``#`` comments.

    Without a path the ``STREAMTAG_STOPWORDS`` environment variable is
    consulted, then the packaged list.
    """
    if path is None:
        path = os.environ.get(STOPWORDS_ENV) or None
    if path is None:
        return default_stopwords()
    with open(path, encoding="utf-8") as fh:
        return _parse_stopword_lines(fh)


@dataclass(frozen=True)
class PreprocessConfig:
    stopwords: FrozenSet[str] = field(default_factory=default_stopwords)
    min_word_length: int = 3
    stemming: bool = False
    # Ablation switch: keep hashtag text as a feature word as well as a label.
    include_hashtags: bool = False

    def __post_init__(self):
        check_positive_int(self.min_word_length, "min_word_length")
        object.__setattr__(self, "stopwords", frozenset(self.stopwords))


# ---------------------------------------------------------------------------
# parsing


def parse_corpus_line(line: str, line_number: Optional[int] = None,
                      max_text_bytes: int = MAX_TEXT_BYTES) -> Post:
    try:
        obj = json.loads(line)
    except (json.JSONDecodeError, RecursionError) as exc:
        raise ParseError(f"malformed JSON ({exc.__class__.__name__})", line_number) from None
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", line_number)
    for key in ("id", "timestamp", "text"):
        if key not in obj:
            raise ParseError(f"missing field {key!r}", line_number)
    post_id, ts, text = obj["id"], obj["timestamp"], obj["text"]
    if not isinstance(post_id, str) or not post_id:
        raise ParseError("id must be a non-empty string", line_number)
    if isinstance(ts, bool) or not isinstance(ts, int) or ts < 0:
        raise ParseError("timestamp must be a non-negative integer", line_number)
    if not isinstance(text, str):
        raise ParseError("text must be a string", line_number)
    if len(text.encode("utf-8", "surrogatepass")) > max_text_bytes:
        raise ParseError(f"text longer than {max_text_bytes} bytes", line_number)
    return Post(post_id, ts, text)


def read_corpus(source, errors: Optional[list] = None) -> Iterator[Post]:
    """Yield posts from a JSON Lines file path or an iterable of lines.

    Bad lines raise ``ParseError`` unless an ``errors`` list is given, in
    which case they are appended to it and skipped. Duplicate ids count as
    parse errors.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            yield from read_corpus(fh, errors)
        return
    seen = set()
    for number, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            post = parse_corpus_line(line, number)
            if post.id in seen:
                raise ParseError(f"duplicate id {post.id!r}", number)
        except ParseError as exc:
            if errors is None:
                raise
            errors.append(exc)
            continue
        seen.add(post.id)
        yield post


# ---------------------------------------------------------------------------
# cleaning


def tokenize(text: str) -> List[str]:
    return text.split()


_ASCII_PUNCT = {c: None for c in range(128) if unicodedata.category(chr(c)).startswith("P")}


def _is_punct(ch):
    return unicodedata.category(ch).startswith("P")


def strip_punctuation(token: str) -> str:
    """Delete (not split on) every Unicode punctuation character."""
    if token.isascii():
        return token.translate(_ASCII_PUNCT)
    return "".join(ch for ch in token if not _is_punct(ch))


def _lstrip_punct(token):
    i = 0
    while i < len(token) and _is_punct(token[i]):
        i += 1
    return token[i:]


def _rstrip_punct(token):
    j = len(token)
    while j > 0 and _is_punct(token[j - 1]):
        j -= 1
    return token[:j]


def is_url(token: str) -> bool:
    """True for tokens that look like links, ignoring wrapping punctuation.

    Hashtags and mentions are never links.
    """
    token = token.lower()
    if token.startswith(("#", "@")):
        return False
    return _lstrip_punct(token).startswith(URL_PREFIXES)


_STEMMER = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)


@lru_cache(maxsize=65536)
def porter_stem(word: str) -> str:
    """Porter (1980) stem of ``word``; non-alphabetic words pass through."""
    if not (word.isascii() and word.isalpha()):
        return word
    return _STEMMER.stem(word, to_lowercase=False)


def _keep_word(word, config):
    return (
        len(word) >= config.min_word_length
        and word not in config.stopwords
        and not word.isdigit()
        and not word.startswith("http")
    )


def preprocess(post, config: Optional[PreprocessConfig] = None) -> ProcessedPost:
    """Clean a ``Post`` (or bare text) into a ``ProcessedPost``."""
    if config is None:
        config = _default_config()
    if isinstance(post, str):
        post_id, text = "", post
    else:
        post_id, text = post.id, post.text

    hashtags = set()
    mentions = []
    candidates = []
    for token in tokenize(text):
        low = token.lower()
        if is_url(low):
            continue
        if low.startswith("#"):
            tag = strip_punctuation(low[1:])
            if tag:
                hashtags.add(tag)
                if config.include_hashtags:
                    candidates.append(tag)
            continue
        if low.startswith("@"):
            mention = _rstrip_punct(low)
            if len(mention) > 1:
                mentions.append(mention)
            continue
        word = strip_punctuation(low)
        if word:
            candidates.append(word)

    words = []
    for word in candidates:
        if not _keep_word(word, config):
            continue
        if not config.include_hashtags and word in hashtags:
            continue
        if config.stemming:
            word = porter_stem(word)
            if not _keep_word(word, config):
                continue
            if not config.include_hashtags and word in hashtags:
                continue
        words.append(word)
    return ProcessedPost(post_id, tuple(words), tuple(mentions), frozenset(hashtags))


@lru_cache(maxsize=1)
def _default_config():
    return PreprocessConfig()


def preprocess_many(posts: Iterable, config: Optional[PreprocessConfig] = None) -> List[ProcessedPost]:
    return [preprocess(p, config) for p in posts]
