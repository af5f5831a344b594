"""Command-line entrypoint orchestrating all workflows."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import __version__
from .alignment import (
    aggregate_ratings,
    apply_alignment,
    evaluate_alignment,
    fit_alignment,
    load_alignment_model,
    load_ratings,
    save_alignment_model,
)
from .backends.factory import registry_from_config
from .benchmark import BENCHMARK_SCHEMA_VERSION, benchmark_stats, load_benchmark
from .errors import ConfigurationError, ParseError, RetryableClientError, ValidationError, VidevalError
from .media import FrameSamplingPolicy, ingest
from .metrics import MetricConfig
from .promptgen import RecordedLLMClient, generate_prompts
from .reporting import build_breakdown, build_leaderboard, export_report
from .suite import load_suite_result, run_suite, save_suite_result

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARTIAL = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 64, not argparse's 2
        raise UsageError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="videval", description="Text-to-video evaluation harness.")
    parser.add_argument(
        "--version",
        action="version",
        version=f"videval {__version__} (benchmark schema {BENCHMARK_SCHEMA_VERSION})",
    )
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("validate-benchmark", help="validate a benchmark file")
    p.add_argument("path")

    p = sub.add_parser("stats", help="print benchmark statistics")
    p.add_argument("path")

    p = sub.add_parser("run", help="run the metric suite over one model directory")
    p.add_argument("--model-dir", required=True)
    p.add_argument("--model-id", default=None)
    p.add_argument("--benchmark", required=True)
    p.add_argument("--config", default=None, help="backend bindings JSON file")
    p.add_argument("--preset", choices=["mock"], default=None, help="fill slots with a preset")
    p.add_argument("--out", required=True)
    p.add_argument("--sampling", default="all", help="all or uniform:K")
    p.add_argument("--metrics", default=None, help="comma-separated metric ids (default: all)")
    p.add_argument("--flow-threshold", type=float, default=2.0)
    p.add_argument("--paper-scale", action="store_true")
    p.add_argument("--inception-splits", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("fit-alignment", help="fit per-aspect alignment from ratings")
    p.add_argument("--ratings", required=True)
    p.add_argument("--results", required=True, nargs="+")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train", type=int, default=300)
    p.add_argument("--holdout", type=int, default=200)
    p.add_argument("--input-scale", type=float, default=1.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("correlate", help="holdout rank correlations for a fitted model")
    p.add_argument("--model", required=True)
    p.add_argument("--ratings", required=True)
    p.add_argument("--results", required=True, nargs="+")
    p.add_argument("--all-rows", action="store_true", help="use all labeled rows, not just holdout")

    p = sub.add_parser("report", help="render leaderboard or grouped breakdown")
    p.add_argument("--results", nargs="+", default=None)
    p.add_argument("--results-dir", default=None)
    p.add_argument("--ratings", default=None)
    p.add_argument("--alignment-model", default=None)
    p.add_argument("--format", choices=["md", "csv", "json"], default="md")
    p.add_argument("--group-by", choices=["meta", "subtype"], default=None)
    p.add_argument("--benchmark", default=None, help="required with --group-by")
    p.add_argument("--paper-scale", action="store_true")
    p.add_argument("--out", default=None)

    p = sub.add_parser("serve-annotation", help="serve the rating study HTTP API")
    p.add_argument("--study", required=True, help="study directory")
    p.add_argument("--port", type=int, default=8008)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--create-from", default=None, help="study definition JSON to create first")
    p.add_argument("--static-dir", default=None, help="built rater UI assets to serve at /")

    p = sub.add_parser("generate-prompts", help="generate prompt candidates via an LLM client")
    p.add_argument("--meta-class", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sub-type", default="general")
    p.add_argument("--recorded-dir", required=True, help="recorded-response directory")
    p.add_argument("--out", default=None)

    return parser


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_results(paths: list[str]) -> dict:
    suites = {}
    for path in paths:
        suite = load_suite_result(path)
        if suite.model_id in suites:
            raise ValidationError(f"duplicate model id {suite.model_id!r} across result files")
        suites[suite.model_id] = suite
    return suites


def _cmd_validate_benchmark(args) -> int:
    benchmark = load_benchmark(args.path)
    print(f"OK: {len(benchmark.records)} records, schema version {benchmark.version}")
    return EXIT_OK


def _cmd_stats(args) -> int:
    report = benchmark_stats(load_benchmark(args.path))
    print(json.dumps(asdict(report), sort_keys=True, indent=1))
    return EXIT_OK


def _cmd_run(args) -> int:
    benchmark = load_benchmark(args.benchmark)
    config: dict = {}
    if args.config is not None:
        config_path = Path(args.config)
        if not config_path.is_file():
            raise ConfigurationError(f"config file {config_path} does not exist")
        try:
            loaded = json.loads(config_path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", path=str(config_path)) from exc
        config = loaded.get("backends", loaded)
    if args.preset is not None:
        config = {"preset": args.preset, **config}
    if not config:
        raise ConfigurationError("run needs --config or --preset to bind backends")
    registry = registry_from_config(config)
    sampling = FrameSamplingPolicy.parse(args.sampling)
    cfg = MetricConfig(
        flow_threshold=args.flow_threshold,
        paper_scale=args.paper_scale,
        inception_splits=args.inception_splits,
    )
    evaluation_set, report = ingest(args.model_dir, benchmark, sampling, model_id=args.model_id)
    metric_ids = tuple(m.strip() for m in args.metrics.split(",")) if args.metrics else None
    suite = run_suite(evaluation_set, registry, cfg, metric_ids=metric_ids)
    suite.metadata["seed"] = args.seed
    suite.metadata["sampling"] = sampling.describe()
    save_suite_result(suite, args.out)
    for prompt_id in report.missing:
        print(f"missing video for prompt {prompt_id}", file=sys.stderr)
    for prompt_id, message in report.errors:
        print(f"undecodable video for prompt {prompt_id}: {message}", file=sys.stderr)
    item_errors = suite.item_errors()
    for metric_id, prompt_id, message in item_errors:
        print(f"item error [{metric_id}] {prompt_id}: {message}", file=sys.stderr)
    print(f"wrote {args.out}: {len(suite.results)} metrics, {len(suite.skips)} skipped")
    partial = bool(report.missing or report.errors or item_errors)
    return EXIT_PARTIAL if partial else EXIT_OK


def _cmd_fit_alignment(args) -> int:
    labels = aggregate_ratings(load_ratings(args.ratings))
    suites = _load_results(args.results)
    model = fit_alignment(
        labels,
        suites,
        seed=args.seed,
        train_size=args.train,
        holdout_size=args.holdout,
        input_scale=args.input_scale,
    )
    save_alignment_model(model, args.out)
    print(f"wrote {args.out}: {len(model.aspects)} aspect models")
    return EXIT_OK


def _cmd_correlate(args) -> int:
    model = load_alignment_model(args.model)
    labels = aggregate_ratings(load_ratings(args.ratings))
    suites = _load_results(args.results)
    report = evaluate_alignment(model, labels, suites, holdout_only=not args.all_rows)
    print(json.dumps({"aspects": report.aspects, "row_counts": report.row_counts}, sort_keys=True, indent=1))
    return EXIT_OK


def _cmd_report(args) -> int:
    paths = list(args.results or [])
    if args.results_dir is not None:
        paths.extend(str(p) for p in sorted(Path(args.results_dir).glob("*.jsonl")))
    if not paths:
        raise ConfigurationError("report needs --results files or --results-dir")
    suites = _load_results(paths)
    final_scores = None
    if args.alignment_model is not None and args.ratings is not None:
        model = load_alignment_model(args.alignment_model)
        labels = aggregate_ratings(load_ratings(args.ratings))
        final_scores = apply_alignment(model, suites, labels)
    if args.group_by is not None:
        if args.benchmark is None:
            raise ConfigurationError("--group-by needs --benchmark to resolve prompt groups")
        benchmark = load_benchmark(args.benchmark)
        group_by = {"meta": "meta_class", "subtype": "sub_type"}[args.group_by]
        text = export_report(build_breakdown(suites, benchmark, group_by), args.format)
    else:
        text = export_report(build_leaderboard(suites, final_scores, args.paper_scale), args.format)
    _write_or_print(text, args.out)
    return EXIT_OK


def _cmd_serve_annotation(args) -> int:
    import uvicorn

    from .annotation import AnnotationStore, Study, create_app

    study_dir = Path(args.study)
    if args.create_from is not None and not (study_dir / "study.json").exists():
        definition = json.loads(Path(args.create_from).read_text(encoding="utf-8"))
        store = AnnotationStore.create(study_dir, Study.from_document(definition))
    else:
        store = AnnotationStore(study_dir)
    app = create_app(store, static_dir=args.static_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def _cmd_generate_prompts(args) -> int:
    client = RecordedLLMClient(args.recorded_dir)
    reports = generate_prompts(args.meta_class, args.n, client, sub_type=args.sub_type)
    lines = []
    for report in reports:
        lines.append(
            json.dumps(
                {
                    "text": report.candidate.text if report.candidate else None,
                    "accepted": report.accepted,
                    "reason": report.reason,
                },
                sort_keys=True,
                separators=(",", ":"),
            )
        )
    _write_or_print("\n".join(lines) + "\n", args.out)
    return EXIT_OK


_COMMANDS = {
    "validate-benchmark": _cmd_validate_benchmark,
    "stats": _cmd_stats,
    "run": _cmd_run,
    "fit-alignment": _cmd_fit_alignment,
    "correlate": _cmd_correlate,
    "report": _cmd_report,
    "serve-annotation": _cmd_serve_annotation,
    "generate-prompts": _cmd_generate_prompts,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except RetryableClientError as exc:
        print(f"error (retryable): {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except VidevalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
