import random
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import recompute_stats
from streamtag.exceptions import ConfigError, SnapshotExpiredError, UnlabeledPostError
from streamtag.preprocessing import ProcessedPost
from streamtag.window import HashtagStats, ModelWindow, WordStats


def post(pid, words, tags=("t",), mentions=()):
    return ProcessedPost(str(pid), tuple(words), tuple(mentions), frozenset(tags))


def assert_matches_oracle(window):
    words, tags = recompute_stats(window.posts())
    assert window.word_stats() == words
    assert window.hashtag_stats() == tags


def random_post(rng, i, vocab=12, n_tags=4):
    words = [f"w{rng.randrange(vocab)}" for _ in range(rng.randint(0, 5))]
    mentions = [f"@u{rng.randrange(3)}" for _ in range(rng.randint(0, 1))]
    tags = {f"h{rng.randrange(n_tags)}" for _ in range(rng.randint(1, 2))}
    return post(i, words, tags, mentions)


# -- construction --------------------------------------------------------------


def test_new_window_empty():
    w = ModelWindow(3)
    assert len(w) == 0 and w.total_posts == 0 and w.capacity == 3
    assert w.word_stats() == {} and w.hashtag_stats() == {}


@pytest.mark.parametrize("capacity", [0, -1, 1.5, True, "3"])
def test_new_window_rejects_bad_capacity(capacity):
    with pytest.raises(ConfigError):
        ModelWindow(capacity)


def test_large_capacity_allocates_nothing_up_front():
    w = ModelWindow(1_000_000)
    assert len(w._queue) == 0 and w.n_terms == 0


# -- push ----------------------------------------------------------------------


def test_push_fifo():
    w = ModelWindow(2)
    a, b, c = post("A", ["x"]), post("B", ["y"]), post("C", ["z"])
    assert w.push(a) is None
    assert w.push(b) is None
    assert w.push(c) == a
    assert [p.id for p in w.posts()] == ["B", "C"]


def test_push_single_post_stats():
    w = ModelWindow(5)
    w.push(post(1, ["flood"], ["weather"]))
    stats = w.word_stats()["flood"]
    assert stats.cooc == {"weather": 1}
    assert stats == WordStats(1, 1, {"weather": 1}, frozenset({"1"}))
    assert w.hashtag_stats() == {"weather": HashtagStats(1)}


def test_push_rejects_unlabeled():
    w = ModelWindow(2)
    with pytest.raises(UnlabeledPostError):
        w.push(post(1, ["x"], tags=()))
    assert len(w) == 0 and w.version == 0


def test_duplicate_words_count_once():
    w = ModelWindow(2)
    w.push(post(1, ["rain", "rain", "cold"], ["w"]))
    s = w.word_stats()["rain"]
    assert s.doc_freq == 1 and s.cooc == {"w": 1}
    assert s.length_sum == 3  # word_count keeps duplicates
    assert_matches_oracle(w)


def test_round_trip_against_oracle():
    rng = random.Random(3)
    w = ModelWindow(7)
    for i in range(8):
        w.push(random_post(rng, i))
    assert len(w) == 7
    assert_matches_oracle(w)


def test_posts_containing():
    w = ModelWindow(2)
    assert w.posts_containing("storm") == set()
    w.push(post(1, ["storm", "flood"]))
    w.push(post(2, ["storm"]))
    assert w.posts_containing("storm") == {"1", "2"}
    w.push(post(3, ["sunny"]))
    assert w.posts_containing("flood") == set()
    assert "flood" not in w.word_stats()
    assert w.posts_containing("storm") == {"2"}


def test_eviction_deletes_entries():
    w = ModelWindow(1)
    w.push(post(1, ["only"], ["a"]))
    w.push(post(2, ["other"], ["b"]))
    assert set(w.word_stats()) == {"other"}
    assert set(w.hashtag_stats()) == {"b"}


def test_postings_compaction_keeps_order():
    w = ModelWindow(5)
    for i in range(500):
        w.push(post(i, ["common", f"u{i}"]))
        view = w.snapshot().term("common")
        assert np.all(np.diff(view.seqs) > 0)
        assert len(view.seqs) == min(i + 1, 5)
    assert_matches_oracle(w)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1), st.integers(1, 80))
def test_random_sequences_match_oracle(capacity, seed, n):
    rng = random.Random(seed)
    w = ModelWindow(capacity)
    for i in range(n):
        w.push(random_post(rng, i))
        assert len(w) == min(i + 1, capacity)
    assert_matches_oracle(w)


def test_fifo_order_sequence_numbers():
    w = ModelWindow(4)
    evicted = []
    for i in range(20):
        out = w.push(post(i, ["x"]))
        if out is not None:
            evicted.append(int(out.id))
    assert evicted == list(range(16))


def test_boundedness_under_turnover():
    rng = random.Random(0)
    w = ModelWindow(50)
    sizes = []
    for i in range(50 * 10):
        w.push(post(i, [f"w{rng.randrange(10_000)}" for _ in range(4)]))
        sizes.append(w.n_terms)
    occurrences = sum(len(p.terms) for p in w.posts())
    assert w.n_terms <= occurrences
    assert max(sizes) <= 50 * 4


# -- snapshots -------------------------------------------------------------------


def test_snapshot_frozen_across_push():
    w = ModelWindow(3)
    w.push(post(1, ["a"], ["x"]))
    snap = w.snapshot()
    w.push(post(2, ["a", "b"], ["y"]))
    assert snap.total_posts == 1
    assert snap.doc_freq("a") == 1 and snap.doc_freq("b") == 0
    assert snap.posts_containing("a") == {"1"}
    assert snap.hashtag_stats("y") is None
    assert snap.post("2") is None and snap.post("1").id == "1"


def test_snapshot_sees_evicted_posts():
    w = ModelWindow(2)
    w.push(post(1, ["a"], ["x"]))
    w.push(post(2, ["b"], ["y"]))
    snap = w.snapshot()
    before = {t: snap.word_stats(t) for t in ("a", "b", "c")}
    for i in range(3, 6):
        w.push(post(i, ["c", "a"], ["z"]))
    assert {t: snap.word_stats(t) for t in ("a", "b", "c")} == before
    assert [p.id for p in snap.posts()] == ["1", "2"]
    assert snap.post("1").id == "1"
    assert snap.hashtag_counts(["x", "y", "z"]) == {"x": 1, "y": 1, "z": 0}


def test_two_snapshots_agree():
    rng = random.Random(5)
    w = ModelWindow(10)
    for i in range(30):
        w.push(random_post(rng, i))
    s1, s2 = w.snapshot(), w.snapshot()
    for t in [f"w{i}" for i in range(12)] + ["@u0", "nope"]:
        assert s1.word_stats(t) == s2.word_stats(t)


def test_snapshot_total_while_warming_up():
    w = ModelWindow(10)
    for i in range(4):
        w.push(post(i, ["a"]))
    assert w.snapshot().total_posts == 4


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1), st.integers(0, 30), st.integers(0, 30))
def test_lagging_snapshot_matches_oracle(capacity, seed, before, after):
    rng = random.Random(seed)
    w = ModelWindow(capacity)
    for i in range(before):
        w.push(random_post(rng, i))
    snap = w.snapshot()
    expected_words, expected_tags = recompute_stats(w.posts())
    for i in range(before, before + after):
        w.push(random_post(rng, i))
    for t in [f"w{i}" for i in range(12)] + ["@u0", "@u1", "@u2"]:
        assert snap.word_stats(t) == expected_words.get(t)
    tags = [f"h{i}" for i in range(4)]
    got = snap.hashtag_counts(tags)
    assert got == {h: expected_tags[h].post_count if h in expected_tags else 0 for h in tags}
    assert snap.total_posts == min(before, capacity)


def test_snapshot_expires_beyond_journal():
    w = ModelWindow(3, journal_size=4)
    w.push(post(0, ["a"]))
    snap = w.snapshot()
    for i in range(1, 5):
        w.push(post(i, ["a"]))
    assert snap.doc_freq("a") == 1
    w.push(post(5, ["a"]))
    with pytest.raises(SnapshotExpiredError):
        snap.doc_freq("a")


def test_concurrent_readers_see_consistent_snapshots():
    rng = random.Random(11)
    w = ModelWindow(20, journal_size=100_000)
    for i in range(20):
        w.push(random_post(rng, i))
    snaps = []
    stop = threading.Event()
    failures = []

    def writer():
        for i in range(20, 2000):
            snaps.append((w.snapshot(), recompute_stats(w.posts())))
            w.push(random_post(rng, i))
        stop.set()

    def reader(seed):
        r = random.Random(seed)
        while not stop.is_set() or r.random() < 0.5:
            if not snaps:
                continue
            snap, (words, _) = snaps[r.randrange(len(snaps))]
            t = f"w{r.randrange(12)}"
            if snap.word_stats(t) != words.get(t):
                failures.append((snap.version, t))

    threads = [threading.Thread(target=reader, args=(s,)) for s in range(4)]
    for t in threads:
        t.start()
    writer()
    for t in threads:
        t.join()
    assert not failures


# -- dump ------------------------------------------------------------------------


def test_dump_round_trip(tmp_path):
    rng = random.Random(2)
    w = ModelWindow(6)
    for i in range(15):
        w.push(random_post(rng, i))
    path = tmp_path / "model.json"
    w.dump(path)
    loaded = ModelWindow.load(path)
    assert loaded.capacity == 6
    assert loaded.posts() == w.posts()
    assert loaded.word_stats() == w.word_stats()
    assert set(w.to_dict()) == {"capacity", "posts"}
