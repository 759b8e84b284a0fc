import csv
import json

import pytest

from streamtag.classifiers import ClassifierConfig
from streamtag.evaluation import (
    LOG_HEADER,
    EvalConfig,
    EvalReport,
    PostLog,
    read_report,
    run_benchmark,
    run_evaluation,
    write_report,
)
from streamtag.exceptions import ConfigError
from streamtag.preprocessing import Post, preprocess
from streamtag.synthetic import GeneratorSpec, generate_posts
from streamtag.window import ModelWindow


def posts_from(texts):
    return [Post(str(i), i, t) for i, t in enumerate(texts)]


SMALL = GeneratorSpec(seed=4, num_hashtags=10, posts=700, noise_word_probability=0.3)


def test_eval_config_validation():
    with pytest.raises(ConfigError):
        EvalConfig(0, 1)
    with pytest.raises(ConfigError):
        EvalConfig(1, 1, thread_count=0)


def test_single_class_window_hits():
    posts = posts_from(["flood #weather"] * 6)
    report = run_evaluation(posts, EvalConfig(5, 1))
    assert report.evaluated == 1 and report.hits == 1 and report.hit_rate == 1.0


def test_unknown_hashtag_misses():
    posts = posts_from(["flood #weather"] * 5 + ["flood #brandnew"])
    report = run_evaluation(posts, EvalConfig(5, 1))
    assert report.evaluated == 1 and report.hits == 0


def test_unlabeled_posts_skipped_and_counted():
    posts = posts_from(["flood #weather", "no label here", "flood #weather", "also none", "flood #weather"])
    report = run_evaluation(posts, EvalConfig(2, 5))
    assert report.skipped_unlabeled == 2
    assert report.evaluated == 1
    assert report.truncated


def test_truncated_before_window_fills():
    report = run_evaluation(posts_from(["a #b"] * 3), EvalConfig(10, 5))
    assert report.evaluated == 0 and report.truncated and report.hit_rate == 0.0


def test_metrics_recount_from_log(tmp_path):
    log_path = tmp_path / "log.csv"
    with PostLog(log_path) as log:
        report = run_evaluation(generate_posts(SMALL), EvalConfig(400, 300), on_result=log)
    with open(log_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == LOG_HEADER
    assert len(rows) == report.evaluated == 300
    hits = correct = recommended = actual = 0
    for row in rows:
        rec = [h for h in row["recommended"].split("|") if h]
        act = set(row["actual"].split("|"))
        c = len(set(rec) & act)
        hits += c > 0
        correct += c
        recommended += len(rec)
        actual += len(act)
        assert (row["hit"] == "1") == (c > 0)
        assert len(rec) <= 3
    assert report.hits == hits
    assert report.hit_rate == hits / 300
    assert report.precision == correct / recommended
    assert report.recall == correct / actual
    p, r = report.precision, report.recall
    assert report.f_measure == pytest.approx(2 * p * r / (p + r))


def test_top1_single_label_metrics_coincide():
    clean = GeneratorSpec(seed=4, num_hashtags=10, posts=700, noise_word_probability=0.0)
    report = run_evaluation(generate_posts(clean), EvalConfig(400, 200), ClassifierConfig(top_n=1))
    # no unseen words, so every post gets exactly one recommendation
    assert report.precision == pytest.approx(report.recall) == pytest.approx(report.hit_rate)


def test_top1_recall_equals_hit_rate_with_empty_recommendations():
    results = []
    report = run_evaluation(generate_posts(SMALL), EvalConfig(400, 200), ClassifierConfig(top_n=1),
                            on_result=results.append)
    answered = sum(1 for r in results if r.recommendation.hashtags)
    # unseen noise words can fill the query slots and yield nothing
    assert answered < report.evaluated
    assert report.recall == pytest.approx(report.hit_rate)
    assert report.precision == pytest.approx(report.hits / answered)


def test_window_holds_last_labeled_posts():
    window = ModelWindow(50)
    posts = list(generate_posts(SMALL))[:180]
    run_evaluation(posts, EvalConfig(50, 100), window=window)
    # fill 50, evaluate 100, leave the remaining 30 unread
    expected = [preprocess(p).id for p in posts[100:150]]
    assert [p.id for p in window.posts()] == expected


@pytest.mark.parametrize("kind", ["nb", "knn", "hybrid"])
def test_thread_count_does_not_change_report(kind):
    cfg = ClassifierConfig(classifier=kind)
    serial = run_evaluation(generate_posts(SMALL), EvalConfig(300, 300, 1), cfg)
    pooled = run_evaluation(generate_posts(SMALL), EvalConfig(300, 300, 8), cfg)
    assert serial.to_json(exclude_timing=True) == pooled.to_json(exclude_timing=True)


def test_pooled_logs_match_serial():
    logs = {}
    for threads in (1, 4):
        rows = []
        run_evaluation(generate_posts(SMALL), EvalConfig(300, 300, threads),
                       on_result=lambda r: rows.append((r.post_id, r.recommendation)))
        logs[threads] = rows
    assert logs[1] == logs[4]


def test_report_json_round_trip(tmp_path):
    report = run_evaluation(generate_posts(SMALL), EvalConfig(300, 100))
    path = tmp_path / "r.json"
    write_report(report, path)
    assert read_report(path) == report
    assert set(json.loads(path.read_text())) == {
        "evaluated", "hits", "hit_rate", "precision", "recall", "f_measure",
        "posts_per_second", "skipped_unlabeled", "truncated"}


def test_empty_report(tmp_path):
    report = run_evaluation([], EvalConfig(5, 5))
    path = tmp_path / "r.json"
    write_report(report, path, results=[], log_path=tmp_path / "l.csv")
    d = json.loads(path.read_text())
    assert d["hit_rate"] == 0 and d["truncated"] is True and d["evaluated"] == 0
    assert (tmp_path / "l.csv").read_text().strip() == ",".join(LOG_HEADER)


def test_write_report_io_error(tmp_path):
    with pytest.raises(OSError, match="nope"):
        write_report(EvalReport(), tmp_path / "nope" / "r.json")


def test_benchmark_smoke():
    out = run_benchmark(generate_posts(SMALL), EvalConfig(100, 100))
    assert out["evaluated"] == 100
    assert out["posts_per_second"] > 0
    assert out["p99_latency_ms"] >= out["p50_latency_ms"] > 0
