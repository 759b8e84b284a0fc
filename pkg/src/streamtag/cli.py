"""Command-line entry point: ``streamtag {gen,recommend,evaluate,bench}``.

Exit codes: 0 success, 2 usage or configuration error, 3 I/O error,
4 not enough labeled posts to fill the window. Machine-readable output goes
to stdout as JSON, diagnostics to stderr.
"""

import argparse
import json
import logging
import sys

from .classifiers import CLASSIFIERS, ClassifierConfig, recommend
from .evaluation import EvalConfig, PostLog, run_benchmark, run_evaluation, write_report
from .exceptions import ConfigError, ParseError
from .preprocessing import PreprocessConfig, load_stopwords, preprocess, read_corpus
from .synthetic import GeneratorSpec, write_corpus
from .weighting import TermWeightConfig
from .window import ModelWindow

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DATA = 4

log = logging.getLogger("streamtag")


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _add_model_flags(p, window_default):
    p.add_argument("corpus", help="JSON Lines corpus")
    p.add_argument("--window-size", type=int, default=window_default)
    p.add_argument("--classifier", choices=CLASSIFIERS, default="hybrid")
    p.add_argument("--k", type=int, default=10, help="nearest neighbours (default 10)")
    p.add_argument("--top-n", type=int, default=3)
    p.add_argument("--nb-weight", type=float, default=0.4)
    p.add_argument("--knn-weight", type=float, default=0.6)
    p.add_argument("--idf-query-words", type=int, default=3)
    p.add_argument("--mention-weight", type=float, default=3.0)
    p.add_argument("--stemming", action="store_true")
    p.add_argument("--include-hashtags", action="store_true",
                   help="keep each post's own hashtags as feature words (ablation)")
    p.add_argument("--stopwords-file", default=None,
                   help="overrides $STREAMTAG_STOPWORDS and the packaged list")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="streamtag", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a synthetic corpus")
    p.add_argument("spec_file", help="JSON generator spec")
    p.add_argument("out_path")

    p = sub.add_parser("recommend", help="recommend hashtags for one post")
    _add_model_flags(p, window_default=100_000)
    p.add_argument("text")

    p = sub.add_parser("evaluate", help="replay a corpus and score recommendations")
    _add_model_flags(p, window_default=1_000_000)
    p.add_argument("--eval-count", type=int, default=1_000_000)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--report", default=None, help="write the report JSON here too")
    p.add_argument("--log", default=None, help="per-post CSV log")

    p = sub.add_parser("bench", help="measure recommendation throughput")
    _add_model_flags(p, window_default=100_000)
    p.add_argument("--eval-count", type=int, default=10_000)
    p.add_argument("--threads", type=int, default=1)
    return parser


def _configs(args):
    try:
        stopwords = load_stopwords(args.stopwords_file)
    except OSError as exc:
        raise CliError(f"cannot read stop-word file: {exc}", EXIT_IO) from None
    classifier_config = ClassifierConfig(
        top_n=args.top_n,
        knn_k=args.k,
        nb_weight=args.nb_weight,
        knn_weight=args.knn_weight,
        idf_query_words=args.idf_query_words,
        term_weights=TermWeightConfig(mention_weight=args.mention_weight),
        classifier=args.classifier,
    )
    preprocess_config = PreprocessConfig(
        stopwords=stopwords, stemming=args.stemming, include_hashtags=args.include_hashtags)
    return classifier_config, preprocess_config


def _corpus(path, errors):
    try:
        yield from read_corpus(path, errors)
    except OSError as exc:
        raise CliError(f"cannot read corpus {path}: {exc.strerror}", EXIT_IO) from None


def _report_skips(errors):
    if errors:
        log.warning("skipped %d malformed corpus lines (first: %s)", len(errors), errors[0])


def _emit(obj):
    json.dump(obj, sys.stdout)
    sys.stdout.write("\n")


def cmd_gen(args):
    try:
        spec = GeneratorSpec.from_file(args.spec_file)
    except OSError as exc:
        raise CliError(f"cannot read spec {args.spec_file}: {exc.strerror}", EXIT_IO) from None
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    try:
        n = write_corpus(spec, args.out_path)
    except OSError as exc:
        raise CliError(f"cannot write {args.out_path}: {exc.strerror}", EXIT_IO) from None
    log.info("wrote %d posts to %s", n, args.out_path)
    return EXIT_OK


def cmd_recommend(args):
    check = EvalConfig(args.window_size, 1)
    classifier_config, preprocess_config = _configs(args)
    window = ModelWindow(check.window_capacity)
    errors = []
    for post in _corpus(args.corpus, errors):
        pp = preprocess(post, preprocess_config)
        if pp.hashtags:
            window.push(pp)
            if window.is_full:
                break
    _report_skips(errors)
    if not window.is_full:
        raise CliError(f"corpus holds only {len(window)} labeled posts; "
                       f"window needs {window.capacity}", EXIT_DATA)
    rec = recommend(window, args.text, classifier_config, preprocess_config)
    _emit(rec.to_list())
    return EXIT_OK


def cmd_evaluate(args):
    eval_config = EvalConfig(args.window_size, args.eval_count, args.threads)
    classifier_config, preprocess_config = _configs(args)
    errors = []
    post_log = None
    if args.log:
        try:
            post_log = PostLog(args.log)
        except OSError as exc:
            raise CliError(str(exc), EXIT_IO) from None
    try:
        report = run_evaluation(_corpus(args.corpus, errors), eval_config, classifier_config,
                                preprocess_config, on_result=post_log)
    finally:
        if post_log is not None:
            post_log.close()
    _report_skips(errors)
    if report.truncated:
        log.warning("corpus exhausted early; report covers %d posts", report.evaluated)
    if args.report:
        try:
            write_report(report, args.report)
        except OSError as exc:
            raise CliError(str(exc), EXIT_IO) from None
    _emit(report.to_dict())
    return EXIT_OK


def cmd_bench(args):
    eval_config = EvalConfig(args.window_size, args.eval_count, args.threads)
    classifier_config, preprocess_config = _configs(args)
    errors = []
    result = run_benchmark(_corpus(args.corpus, errors), eval_config, classifier_config,
                           preprocess_config)
    _report_skips(errors)
    if result["evaluated"] == 0:
        raise CliError("corpus too small to fill the window", EXIT_DATA)
    _emit({k: result[k] for k in ("posts_per_second", "p50_latency_ms", "p99_latency_ms")})
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "recommend": cmd_recommend, "evaluate": cmd_evaluate, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    # own handler so diagnostics reach stderr even if the root logger is configured
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("streamtag: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.INFO if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except CliError as exc:
        print(f"streamtag: {exc}", file=sys.stderr)
        return exc.code
    except (ConfigError, ParseError) as exc:
        print(f"streamtag: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        log.removeHandler(handler)


if __name__ == "__main__":
    sys.exit(main())
