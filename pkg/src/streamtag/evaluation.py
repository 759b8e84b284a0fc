"""Replay evaluation: fill the window, then recommend-score-push per post."""

import csv
import json
import os
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, List, Optional

import numpy as np

from ._validation import check_positive_int
from .classifiers import ClassifierConfig, Recommendation, as_query, classify
from .preprocessing import Post, PreprocessConfig, preprocess
from .window import ModelWindow


@dataclass(frozen=True)
class EvalConfig:
    window_capacity: int
    eval_count: int
    thread_count: int = 1

    def __post_init__(self):
        check_positive_int(self.window_capacity, "window_capacity")
        check_positive_int(self.eval_count, "eval_count")
        check_positive_int(self.thread_count, "thread_count")


@dataclass
class EvalReport:
    evaluated: int = 0
    hits: int = 0
    hit_rate: float = 0.0
    precision: float = 0.0
    recall: float = 0.0
    f_measure: float = 0.0
    posts_per_second: float = 0.0
    skipped_unlabeled: int = 0
    truncated: bool = False

    def to_dict(self):
        return asdict(self)

    def to_json(self, exclude_timing=False):
        d = self.to_dict()
        if exclude_timing:
            d.pop("posts_per_second")
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class PostResult:
    post_id: str
    recommendation: Recommendation
    actual: frozenset
    latency: float = 0.0

    @property
    def correct(self) -> int:
        return len(set(self.recommendation.hashtags) & self.actual)

    @property
    def hit(self) -> bool:
        return self.correct > 0


@dataclass
class _Tally:
    evaluated: int = 0
    hits: int = 0
    recommended: int = 0
    correct: int = 0
    actual: int = 0

    def add(self, result: PostResult):
        self.evaluated += 1
        c = result.correct
        self.hits += c > 0
        self.correct += c
        self.recommended += len(result.recommendation)
        self.actual += len(result.actual)

    def report(self, elapsed, skipped, truncated) -> EvalReport:
        n = self.evaluated
        precision = self.correct / self.recommended if self.recommended else 0.0
        recall = self.correct / self.actual if self.actual else 0.0
        f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        return EvalReport(
            evaluated=n,
            hits=self.hits,
            hit_rate=self.hits / n if n else 0.0,
            precision=precision,
            recall=recall,
            f_measure=f,
            posts_per_second=n / elapsed if n and elapsed > 0 else 0.0,
            skipped_unlabeled=skipped,
            truncated=truncated,
        )


def _timed_classify(snapshot, query, config):
    t0 = time.perf_counter()
    rec = classify(snapshot, query, config)
    return rec, time.perf_counter() - t0


class Replay:
    """Drives one pass of the evaluation protocol over a post stream.

    The caller's thread is the single writer. With ``thread_count > 1``
    classification runs on a pool; each query gets a snapshot taken just
    before its own post is pushed, so results match the serial run exactly.
    """

    def __init__(self, eval_config: EvalConfig, classifier_config=None, preprocess_config=None,
                 window: Optional[ModelWindow] = None):
        self.eval_config = eval_config
        self.classifier_config = classifier_config or ClassifierConfig()
        self.preprocess_config = preprocess_config or PreprocessConfig()
        self.window = window if window is not None else ModelWindow(eval_config.window_capacity)
        self.skipped_unlabeled = 0
        self.truncated = False
        self.elapsed = 0.0
        self.push_seconds = 0.0

    def _labeled(self, posts):
        for post in posts:
            pp = preprocess(post, self.preprocess_config)
            if not pp.hashtags:
                self.skipped_unlabeled += 1
                continue
            yield pp

    def fill(self, labeled) -> bool:
        window = self.window
        if window.is_full:
            return True
        for pp in labeled:
            window.push(pp)
            if window.is_full:
                return True
        return False

    def results(self, posts: Iterable[Post]):
        """Yield a ``PostResult`` per evaluated post, in stream order."""
        labeled = self._labeled(posts)
        if not self.fill(labeled):
            self.truncated = True
            return
        threads = self.eval_config.thread_count
        count = self.eval_config.eval_count
        if threads == 1:
            yield from self._serial(labeled, count)
        else:
            yield from self._pooled(labeled, count, threads)

    def _serial(self, labeled, count):
        window, config = self.window, self.classifier_config
        done = 0
        start = time.perf_counter()
        for pp in labeled:
            rec, latency = _timed_classify(window.snapshot(), as_query(pp), config)
            t0 = time.perf_counter()
            window.push(pp)
            self.push_seconds += time.perf_counter() - t0
            self.elapsed = time.perf_counter() - start
            yield PostResult(pp.id, rec, pp.hashtags, latency)
            done += 1
            if done == count:
                break
        else:
            self.truncated = done < count
        self.elapsed = time.perf_counter() - start

    def _pooled(self, labeled, count, threads):
        window, config = self.window, self.classifier_config
        max_inflight = max(1, min(4 * threads, window.journal_size // 2))
        inflight = deque()
        submitted = 0
        start = time.perf_counter()
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for pp in labeled:
                fut = pool.submit(_timed_classify, window.snapshot(), as_query(pp), config)
                inflight.append((pp, fut))
                t0 = time.perf_counter()
                window.push(pp)
                self.push_seconds += time.perf_counter() - t0
                submitted += 1
                while len(inflight) >= max_inflight:
                    yield self._collect(inflight.popleft())
                if submitted == count:
                    break
            else:
                self.truncated = submitted < count
            while inflight:
                yield self._collect(inflight.popleft())
        self.elapsed = time.perf_counter() - start

    @staticmethod
    def _collect(item):
        pp, fut = item
        rec, latency = fut.result()
        return PostResult(pp.id, rec, pp.hashtags, latency)


def run_evaluation(posts: Iterable[Post], eval_config: EvalConfig,
                   classifier_config: Optional[ClassifierConfig] = None,
                   preprocess_config: Optional[PreprocessConfig] = None,
                   window: Optional[ModelWindow] = None,
                   on_result: Optional[Callable[[PostResult], None]] = None) -> EvalReport:
    """Replay ``posts`` and score every recommendation.

    Phase one fills a window of ``window_capacity`` labeled posts. Phase two
    takes the next ``eval_count`` labeled posts; each is classified with its
    hashtags removed, scored as a hit when any recommended hashtag is among
    its actual ones, and then pushed into the window.
    """
    replay = Replay(eval_config, classifier_config, preprocess_config, window)
    tally = _Tally()
    for result in replay.results(posts):
        tally.add(result)
        if on_result is not None:
            on_result(result)
    return tally.report(replay.elapsed, replay.skipped_unlabeled, replay.truncated)


def run_benchmark(posts: Iterable[Post], eval_config: EvalConfig,
                  classifier_config: Optional[ClassifierConfig] = None,
                  preprocess_config: Optional[PreprocessConfig] = None) -> dict:
    """Steady-state recommendation rate and latency percentiles."""
    replay = Replay(eval_config, classifier_config, preprocess_config)
    latencies = [r.latency for r in replay.results(posts)]
    n = len(latencies)
    out = {
        "evaluated": n,
        "posts_per_second": n / replay.elapsed if n and replay.elapsed > 0 else 0.0,
        "p50_latency_ms": 0.0,
        "p99_latency_ms": 0.0,
        "pushes_per_second": n / replay.push_seconds if n and replay.push_seconds > 0 else 0.0,
        "truncated": replay.truncated,
    }
    if n:
        p50, p99 = np.percentile(np.array(latencies) * 1000.0, [50, 99])
        out["p50_latency_ms"] = float(p50)
        out["p99_latency_ms"] = float(p99)
    return out


LOG_HEADER = ["post_id", "recommended", "scores", "actual", "hit"]


def log_row(result: PostResult) -> List[str]:
    return [
        result.post_id,
        "|".join(result.recommendation.hashtags),
        "|".join(repr(s) for s in result.recommendation.scores),
        "|".join(sorted(result.actual)),
        "1" if result.hit else "0",
    ]


class PostLog:
    """Per-post CSV log writer, usable as an ``on_result`` callback."""

    def __init__(self, path):
        self.path = path
        try:
            self._fh = open(path, "w", encoding="utf-8", newline="")
        except OSError as exc:
            raise OSError(f"cannot open log {path}: {exc.strerror}") from exc
        self._writer = csv.writer(self._fh)
        self._writer.writerow(LOG_HEADER)

    def __call__(self, result: PostResult):
        self._writer.writerow(log_row(result))

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_report(report: EvalReport, path, results: Optional[Iterable[PostResult]] = None,
                 log_path=None) -> None:
    """Write the report as JSON and, optionally, a per-post CSV log."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write report {os.fspath(path)}: {exc.strerror}") from exc
    if log_path is not None:
        with PostLog(log_path) as log:
            for r in results or ():
                log(r)


def read_report(path) -> EvalReport:
    with open(path, encoding="utf-8") as fh:
        return EvalReport.from_dict(json.load(fh))
