"""Seeded synthetic corpora with a known word -> hashtag structure.

Every hashtag owns a small, disjoint set of signature words; a post picks a
hashtag uniformly, then fills each word slot with one of that hashtag's
signature words or, with probability ``noise_word_probability``, with a word
from a shared noise vocabulary. Words are pronounceable consonant-vowel
triples (``"bakotu"``) that survive every preprocessing filter.
"""

import json
import random
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

from ._validation import check_positive_int, check_probability
from .exceptions import ConfigError
from .preprocessing import MAX_TEXT_BYTES, Post, default_stopwords

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"
_SYLLABLES = [c + v for c in _CONSONANTS for v in _VOWELS]
LEXICON_SIZE = len(_SYLLABLES) ** 3
BASE_TIMESTAMP = 1_365_897_600_000  # 2013-04-14T00:00:00Z in ms


def lexicon_word(index: int) -> str:
    n = len(_SYLLABLES)
    a, rest = divmod(index, n * n)
    b, c = divmod(rest, n)
    return _SYLLABLES[a] + _SYLLABLES[b] + _SYLLABLES[c]


def _is_usable(word):
    return word.isalpha() and len(word) >= 3 and word not in default_stopwords()


@dataclass
class GeneratorSpec:
    seed: int = 0
    num_hashtags: int = 20
    signature_words_per_hashtag: int = 3
    noise_vocab_size: int = 1000
    words_per_post: Tuple[int, int] = (4, 8)
    posts: int = 1000
    noise_word_probability: float = 0.2
    # Optional explicit vocabularies; drawn from the lexicon when absent.
    signature_words: Optional[Dict[str, List[str]]] = None
    noise_words: Optional[List[str]] = None

    def __post_init__(self):
        self.words_per_post = tuple(self.words_per_post)
        self.validate()

    def validate(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        for name in ("num_hashtags", "signature_words_per_hashtag", "noise_vocab_size", "posts"):
            check_positive_int(getattr(self, name), name)
        if len(self.words_per_post) != 2:
            raise ConfigError("words_per_post must be a [min, max] pair")
        lo, hi = self.words_per_post
        check_positive_int(lo, "words_per_post[0]")
        check_positive_int(hi, "words_per_post[1]")
        if lo > hi:
            raise ConfigError(f"words_per_post range is empty: {self.words_per_post}")
        check_probability(self.noise_word_probability, "noise_word_probability")

        if self.signature_words is not None:
            if len(self.signature_words) != self.num_hashtags:
                raise ConfigError("signature_words must list exactly num_hashtags hashtags")
            seen = {}
            for tag, words in self.signature_words.items():
                if not words:
                    raise ConfigError(f"hashtag {tag!r} has no signature words")
                for w in words:
                    if not _is_usable(w) or w != w.lower():
                        raise ConfigError(f"signature word {w!r} would not survive preprocessing")
                    if w in seen and seen[w] != tag:
                        raise ConfigError(
                            f"signature vocabularies overlap: {w!r} in {seen[w]!r} and {tag!r}")
                    seen[w] = tag
            if self.noise_words is not None:
                overlap = set(self.noise_words) & set(seen)
                if overlap:
                    raise ConfigError(f"noise words overlap signature words: {sorted(overlap)[:5]}")
        if self.noise_words is not None:
            if len(self.noise_words) != self.noise_vocab_size:
                raise ConfigError("noise_words must have noise_vocab_size entries")
            if any(not _is_usable(w) for w in self.noise_words):
                raise ConfigError("noise words must survive preprocessing")

        needed = self.num_hashtags * (1 + self.signature_words_per_hashtag) + self.noise_vocab_size
        if needed > LEXICON_SIZE // 2:
            raise ConfigError(f"spec needs {needed} distinct words; lexicon holds {LEXICON_SIZE // 2} safely")
        longest = max(
            [len(lexicon_word(0))] + [len(w) for ws in (self.signature_words or {}).values() for w in ws]
            + [len(w) for w in (self.noise_words or [])]
        )
        if hi * (longest + 1) + 2 * longest > MAX_TEXT_BYTES:
            raise ConfigError("words_per_post upper bound makes posts longer than the text limit")

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown generator fields: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_file(cls, path):
        with open(path, encoding="utf-8") as fh:
            try:
                d = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}: invalid JSON: {exc}") from None
        if not isinstance(d, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return cls.from_dict(d)

    def to_dict(self):
        d = asdict(self)
        d["words_per_post"] = list(self.words_per_post)
        return d


@dataclass
class Vocabulary:
    signature: Dict[str, List[str]] = field(default_factory=dict)
    noise: List[str] = field(default_factory=list)

    @property
    def hashtags(self) -> List[str]:
        return list(self.signature)


def build_vocabulary(spec: GeneratorSpec) -> Vocabulary:
    rng = random.Random(f"vocab:{spec.seed}")
    used = set()
    if spec.signature_words is not None:
        used.update(spec.signature_words)
        used.update(w for ws in spec.signature_words.values() for w in ws)
    if spec.noise_words is not None:
        used.update(spec.noise_words)

    def fresh():
        while True:
            w = lexicon_word(rng.randrange(LEXICON_SIZE))
            if w not in used and _is_usable(w):
                used.add(w)
                return w

    if spec.signature_words is not None:
        signature = {t: list(ws) for t, ws in spec.signature_words.items()}
    else:
        signature = {}
        for _ in range(spec.num_hashtags):
            tag = fresh()
            signature[tag] = [fresh() for _ in range(spec.signature_words_per_hashtag)]
    noise = list(spec.noise_words) if spec.noise_words is not None else [
        fresh() for _ in range(spec.noise_vocab_size)]
    return Vocabulary(signature, noise)


def generate_posts(spec: GeneratorSpec) -> Iterator[Post]:
    vocab = build_vocabulary(spec)
    tags = vocab.hashtags
    rng = random.Random(spec.seed)
    lo, hi = spec.words_per_post
    p_noise = spec.noise_word_probability
    for i in range(spec.posts):
        tag = tags[rng.randrange(len(tags))]
        sig = vocab.signature[tag]
        words = []
        for _ in range(rng.randint(lo, hi)):
            if rng.random() < p_noise:
                words.append(vocab.noise[rng.randrange(len(vocab.noise))])
            else:
                words.append(sig[rng.randrange(len(sig))])
        text = " ".join(words) + " #" + tag
        yield Post(f"s{spec.seed}-{i}", BASE_TIMESTAMP + 1000 * i, text)


def generate(spec: GeneratorSpec) -> Iterator[str]:
    """Corpus lines (without trailing newline) in JSON Lines format."""
    for post in generate_posts(spec):
        yield json.dumps({"id": post.id, "timestamp": post.timestamp, "text": post.text},
                         ensure_ascii=False)


def write_corpus(spec: GeneratorSpec, path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for line in generate(spec):
            fh.write(line + "\n")
            n += 1
    return n
