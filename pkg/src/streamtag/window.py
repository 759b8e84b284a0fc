"""Sliding-window data model.

The window is a FIFO of labeled posts plus two hash maps, one keyed by
feature term (words and mentions) and one keyed by hashtag, that are updated
incrementally on every push and eviction. Each term also keeps a postings
list of the sequence numbers of the posts containing it; since eviction is
strictly oldest-first, postings are append-right / pop-left queues that stay
sorted.

Concurrency: one writer thread calls :meth:`ModelWindow.push`, any number of
reader threads work through :class:`WindowSnapshot`. A snapshot pins a
version number; every read goes to the live maps under a shared lock and then
undoes the pushes newer than the pinned version using a bounded journal of
recent (added, evicted) pairs.
"""

import json
import threading
from array import array
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

import numpy as np

from ._validation import check_positive_int
from .exceptions import EmptyWindowError, SnapshotExpiredError, UnlabeledPostError
from .preprocessing import ProcessedPost

_EMPTY_SEQS = np.empty(0, dtype=np.int64)


@dataclass
class WordStats:
    doc_freq: int = 0
    length_sum: int = 0
    cooc: Dict[str, int] = field(default_factory=dict)
    postings: FrozenSet[str] = frozenset()

    @property
    def n_hashtags(self) -> int:
        """Number of distinct hashtags co-occurring with the term."""
        return len(self.cooc)


@dataclass
class HashtagStats:
    post_count: int = 0


class RWLock:
    """Writer-preferring readers/writer lock."""

    def __init__(self):
        self._cond = threading.Condition(threading.Lock())
        self._readers = 0
        self._writer = False
        self._waiting_writers = 0

    def acquire_read(self):
        with self._cond:
            while self._writer or self._waiting_writers:
                self._cond.wait()
            self._readers += 1

    def release_read(self):
        with self._cond:
            self._readers -= 1
            if not self._readers:
                self._cond.notify_all()

    def acquire_write(self):
        with self._cond:
            self._waiting_writers += 1
            while self._writer or self._readers:
                self._cond.wait()
            self._waiting_writers -= 1
            self._writer = True

    def release_write(self):
        with self._cond:
            self._writer = False
            self._cond.notify_all()


class _Postings:
    __slots__ = ("buf", "head")

    def __init__(self):
        self.buf = array("q")
        self.head = 0

    def __len__(self):
        return len(self.buf) - self.head

    def append(self, seq):
        self.buf.append(seq)

    def popleft(self, seq):
        if self.buf[self.head] != seq:
            raise AssertionError("postings out of FIFO order")
        self.head += 1
        if self.head >= 32 and 2 * self.head >= len(self.buf):
            del self.buf[: self.head]
            self.head = 0

    def to_array(self):
        if len(self.buf) == self.head:
            return _EMPTY_SEQS
        return np.frombuffer(self.buf[self.head:], dtype=np.int64)

    def __iter__(self):
        return iter(self.buf[self.head:])


class _TermEntry:
    __slots__ = ("doc_freq", "length_sum", "cooc", "postings")

    def __init__(self):
        self.doc_freq = 0
        self.length_sum = 0
        self.cooc = {}
        self.postings = _Postings()


class _Entry:
    """A queued post with its derived, immutable indexing keys."""

    __slots__ = ("seq", "post", "terms", "hashtags", "word_count")

    def __init__(self, seq, post):
        self.seq = seq
        self.post = post
        self.terms = tuple(sorted(post.terms))
        self.hashtags = tuple(sorted(post.hashtags))
        self.word_count = post.word_count


@dataclass(frozen=True)
class TermView:
    """Statistics of one term as seen by a snapshot."""

    doc_freq: int
    length_sum: int
    cooc: Dict[str, int]
    seqs: np.ndarray


class ModelWindow:
    """Fixed-capacity FIFO of labeled posts with incremental statistics.

    Parameters
    ----------
    capacity : int
        Maximum number of posts held; pushing beyond it evicts the oldest.
    journal_size : int
        How many recent pushes a lagging snapshot can still undo.
    """

    def __init__(self, capacity: int, journal_size: int = 4096):
        self.capacity = check_positive_int(capacity, "capacity")
        self.journal_size = check_positive_int(journal_size, "journal_size")
        self._queue: deque = deque()
        self._terms: Dict[str, _TermEntry] = {}
        self._tags: Dict[str, int] = {}
        self._by_seq: Dict[int, _Entry] = {}
        self._by_id: Dict[str, int] = {}
        self._version = 0
        self._journal: deque = deque(maxlen=self.journal_size)
        self._lock = RWLock()

    def __len__(self):
        return len(self._queue)

    def __repr__(self):
        return f"ModelWindow(capacity={self.capacity}, posts={len(self._queue)})"

    @property
    def total_posts(self) -> int:
        return len(self._queue)

    @property
    def version(self) -> int:
        """Number of pushes applied so far."""
        return self._version

    @property
    def is_full(self) -> bool:
        return len(self._queue) == self.capacity

    # -- writer side -------------------------------------------------------

    def push(self, post: ProcessedPost) -> Optional[ProcessedPost]:
        """Append ``post``; return the evicted oldest post, if any."""
        if not post.hashtags:
            raise UnlabeledPostError(f"post {post.id!r} carries no hashtag")
        self._lock.acquire_write()
        try:
            entry = _Entry(self._version, post)
            self._add(entry)
            evicted = None
            if len(self._queue) > self.capacity:
                evicted = self._queue.popleft()
                self._remove(evicted)
            self._version += 1
            self._journal.append((entry, evicted))
        finally:
            self._lock.release_write()
        return evicted.post if evicted is not None else None

    def extend(self, posts) -> int:
        n = 0
        for post in posts:
            self.push(post)
            n += 1
        return n

    def _add(self, entry):
        self._queue.append(entry)
        self._by_seq[entry.seq] = entry
        self._by_id[entry.post.id] = entry.seq
        tags = self._tags
        for h in entry.hashtags:
            tags[h] = tags.get(h, 0) + 1
        terms = self._terms
        for t in entry.terms:
            te = terms.get(t)
            if te is None:
                te = terms[t] = _TermEntry()
            te.doc_freq += 1
            te.length_sum += entry.word_count
            cooc = te.cooc
            for h in entry.hashtags:
                cooc[h] = cooc.get(h, 0) + 1
            te.postings.append(entry.seq)

    def _remove(self, entry):
        del self._by_seq[entry.seq]
        if self._by_id.get(entry.post.id) == entry.seq:
            del self._by_id[entry.post.id]
        tags = self._tags
        for h in entry.hashtags:
            n = tags[h] - 1
            if n:
                tags[h] = n
            else:
                del tags[h]
        terms = self._terms
        for t in entry.terms:
            te = terms[t]
            te.doc_freq -= 1
            if not te.doc_freq:
                del terms[t]
                continue
            te.length_sum -= entry.word_count
            cooc = te.cooc
            for h in entry.hashtags:
                n = cooc[h] - 1
                if n:
                    cooc[h] = n
                else:
                    del cooc[h]
            te.postings.popleft(entry.seq)

    # -- direct (writer-thread) inspection --------------------------------

    def posts(self) -> List[ProcessedPost]:
        """Queued posts, oldest first."""
        return [e.post for e in self._queue]

    def posts_containing(self, word: str) -> set:
        te = self._terms.get(word)
        if te is None:
            return set()
        by_seq = self._by_seq
        return {by_seq[s].post.id for s in te.postings}

    def word_stats(self) -> Dict[str, WordStats]:
        """Materialize the term map (for inspection and tests)."""
        by_seq = self._by_seq
        return {
            t: WordStats(te.doc_freq, te.length_sum, dict(te.cooc),
                         frozenset(by_seq[s].post.id for s in te.postings))
            for t, te in self._terms.items()
        }

    def hashtag_stats(self) -> Dict[str, HashtagStats]:
        return {h: HashtagStats(n) for h, n in self._tags.items()}

    @property
    def n_terms(self) -> int:
        return len(self._terms)

    def snapshot(self) -> "WindowSnapshot":
        return WindowSnapshot(self)

    stats_snapshot = snapshot

    # -- model dump ---------------------------------------------------------

    def to_dict(self):
        return {"capacity": self.capacity, "posts": [p.to_dict() for p in self.posts()]}

    def dump(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def from_dict(cls, d, journal_size=4096):
        window = cls(d["capacity"], journal_size=journal_size)
        window.extend(ProcessedPost.from_dict(p) for p in d["posts"])
        return window

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


class WindowSnapshot:
    """Consistent read-only view of a window as of one version.

    Reads stay valid while the writer keeps pushing, as long as the snapshot
    lags by no more than ``journal_size`` pushes.
    """

    def __init__(self, window: ModelWindow):
        self._window = window
        window._lock.acquire_read()
        try:
            self.version = window._version
            self.total_posts = len(window._queue)
        finally:
            window._lock.release_read()
        self.base_seq = self.version - self.total_posts

    def _pending(self):
        """Journal entries newer than this snapshot, newest first.

        Undoing newest-first guarantees a post evicted after the snapshot is
        restored before the push that added it (if also newer) removes it.
        """
        w = self._window
        lag = w._version - self.version
        if not lag:
            return ()
        if lag > len(w._journal):
            raise SnapshotExpiredError(
                f"snapshot at version {self.version} is {lag} pushes behind "
                f"(journal keeps {len(w._journal)})")
        journal = w._journal
        return [journal[-i] for i in range(1, lag + 1)]

    # -- per-term reads -----------------------------------------------------

    def _term_view(self, term, pending, with_seqs):
        te = self._window._terms.get(term)
        if te is None:
            doc_freq, length_sum, cooc, seqs = 0, 0, {}, _EMPTY_SEQS
        else:
            doc_freq, length_sum, cooc = te.doc_freq, te.length_sum, dict(te.cooc)
            seqs = te.postings.to_array() if with_seqs else None
        if pending:
            evicted_seqs = []
            for added, evicted in pending:
                if term in added.terms:
                    doc_freq -= 1
                    length_sum -= added.word_count
                    for h in added.hashtags:
                        cooc[h] -= 1
                        if not cooc[h]:
                            del cooc[h]
                if evicted is not None and term in evicted.terms:
                    doc_freq += 1
                    length_sum += evicted.word_count
                    for h in evicted.hashtags:
                        cooc[h] = cooc.get(h, 0) + 1
                    # Posts both added and evicted after the snapshot cancel out.
                    if evicted.seq < self.version:
                        evicted_seqs.append(evicted.seq)
            if with_seqs:
                seqs = seqs[: np.searchsorted(seqs, self.version)]
                if evicted_seqs:
                    seqs = np.concatenate([np.array(sorted(evicted_seqs), dtype=np.int64), seqs])
        if not doc_freq:
            return None
        return TermView(doc_freq, length_sum, cooc, seqs)

    def lookup(self, terms, with_seqs=True) -> Dict[str, Optional[TermView]]:
        """Statistics for several terms under a single lock acquisition."""
        lock = self._window._lock
        lock.acquire_read()
        try:
            pending = self._pending()
            return {t: self._term_view(t, pending, with_seqs) for t in terms}
        finally:
            lock.release_read()

    def term(self, word: str, with_seqs=True) -> Optional[TermView]:
        return self.lookup((word,), with_seqs)[word]

    def doc_freq(self, word: str) -> int:
        view = self.term(word, with_seqs=False)
        return 0 if view is None else view.doc_freq

    def word_stats(self, word: str) -> Optional[WordStats]:
        view = self.term(word)
        if view is None:
            return None
        ids = frozenset(self.post_ids(view.seqs))
        return WordStats(view.doc_freq, view.length_sum, dict(view.cooc), ids)

    def posts_containing(self, word: str) -> set:
        view = self.term(word)
        return set() if view is None else set(self.post_ids(view.seqs))

    # -- hashtags and posts ------------------------------------------------

    def hashtag_counts(self, hashtags) -> Dict[str, int]:
        lock = self._window._lock
        lock.acquire_read()
        try:
            pending = self._pending()
            tags = self._window._tags
            out = {h: tags.get(h, 0) for h in hashtags}
            for added, evicted in pending:
                for h in added.hashtags:
                    if h in out:
                        out[h] -= 1
                if evicted is not None:
                    for h in evicted.hashtags:
                        if h in out:
                            out[h] += 1
            return out
        finally:
            lock.release_read()

    def hashtag_stats(self, hashtag: str) -> Optional[HashtagStats]:
        n = self.hashtag_counts((hashtag,))[hashtag]
        return HashtagStats(n) if n else None

    def _entries(self, seqs) -> List[_Entry]:
        lock = self._window._lock
        lock.acquire_read()
        try:
            pending = self._pending()
            by_seq = self._window._by_seq
            extra = {e.seq: e for _, e in pending if e is not None}
            out = []
            for s in seqs:
                s = int(s)
                if not (self.base_seq <= s < self.version):
                    raise KeyError(s)
                e = by_seq.get(s)
                out.append(e if e is not None else extra[s])
            return out
        finally:
            lock.release_read()

    def posts_by_seq(self, seqs) -> List[ProcessedPost]:
        return [e.post for e in self._entries(seqs)]

    def hashtags_by_seq(self, seqs) -> List[Tuple[str, ...]]:
        return [e.hashtags for e in self._entries(seqs)]

    def post_ids(self, seqs) -> List[str]:
        return [e.post.id for e in self._entries(seqs)]

    def post(self, post_id: str) -> Optional[ProcessedPost]:
        """Look a post of this view up by id."""
        lock = self._window._lock
        lock.acquire_read()
        try:
            pending = self._pending()
            seq = self._window._by_id.get(post_id)
            if seq is not None and self.base_seq <= seq < self.version:
                return self._window._by_seq[seq].post
            for _, evicted in pending:
                if evicted is not None and evicted.post.id == post_id:
                    if evicted.seq >= self.base_seq:
                        return evicted.post
            return None
        finally:
            lock.release_read()

    def posts(self) -> List[ProcessedPost]:
        return self.posts_by_seq(range(self.base_seq, self.version))

    def require_posts(self):
        if not self.total_posts:
            raise EmptyWindowError("window holds no posts")
