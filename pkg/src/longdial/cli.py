"""Command-line entry points for the summarization pipeline.

One verb per stage plus `run` for the whole pipeline and `export-train`
for emitting training pairs. All verbs read the same JSON config; a few
path-like settings can be overridden per invocation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .corpus import CorpusError
from .pipeline import (
    PipelineError,
    STAGES,
    export_training_file,
    load_config,
    run_pipeline,
)

logger = logging.getLogger(__name__)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="path to a JSON run config")
    parser.add_argument("--corpus", help="override corpus_path from the config")
    parser.add_argument("--output-dir", help="override output_dir from the config")
    parser.add_argument("--cache-dir", help="override cache_dir from the config")
    parser.add_argument(
        "--resume",
        action="store_true",
        help="skip dialogues whose artifacts for a stage already exist",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="chatty logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="longdial",
        description=(
            "Hierarchical long-dialogue summarization: segment, split, "
            "condense, enrich, summarize, evaluate."
        ),
    )
    subparsers = parser.add_subparsers(dest="verb", required=True)

    run = subparsers.add_parser("run", help="run the pipeline end to end")
    _add_common(run)
    run.add_argument(
        "--stages",
        help=f"comma-separated subset of: {', '.join(STAGES)}",
    )

    for stage in STAGES:
        stage_parser = subparsers.add_parser(stage, help=f"run only the {stage} stage")
        _add_common(stage_parser)

    export = subparsers.add_parser(
        "export-train",
        help="write enriched-input/gold-summary training pairs as JSONL",
    )
    _add_common(export)
    export.add_argument("--output", required=True, help="path for the JSONL file")
    export.add_argument(
        "--partitions",
        help="comma-separated partitions to export (default: all configured)",
    )
    return parser


def _apply_overrides(config: dict, args: argparse.Namespace) -> dict:
    if args.corpus:
        config["corpus_path"] = args.corpus
    if args.output_dir:
        config["output_dir"] = args.output_dir
    if args.cache_dir:
        config["cache_dir"] = args.cache_dir
    return config


def _print_manifest_summary(manifest: dict) -> None:
    for stage, stats in manifest["stages"].items():
        details = ", ".join(f"{key}={value}" for key, value in stats.items())
        print(f"{stage}: {details}")
    failures = manifest["failures"]
    if failures:
        print(f"failures: {len(failures)}")
        for failure in failures:
            print(f"  {failure['stage']}/{failure['dialogue_id']}: {failure['error']}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = _apply_overrides(load_config(args.config), args)
        if args.verb == "export-train":
            partitions = args.partitions.split(",") if args.partitions else None
            count = export_training_file(config, args.output, partitions=partitions)
            print(f"wrote {count} training pairs to {args.output}")
            return 0
        if args.verb == "run":
            stages = args.stages.split(",") if args.stages else None
        else:
            stages = [args.verb]
        manifest = run_pipeline(config, stages=stages, resume=args.resume)
        _print_manifest_summary(manifest)
        if "evaluate" in manifest["stages"]:
            report_path = f"{config['output_dir']}/evaluate/report.json"
            with open(report_path, encoding="utf-8") as handle:
                aggregate = json.load(handle).get("aggregate")
            if aggregate:
                line = "  ".join(
                    f"{metric} f1={scores['f1']:.4f}"
                    for metric, scores in aggregate.items()
                )
                print(f"aggregate: {line}")
        return 0
    except (PipelineError, CorpusError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
