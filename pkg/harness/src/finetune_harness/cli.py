"""Command-line entry points: make-toy, train, serve."""

from __future__ import annotations

import argparse
import logging
import sys

from .data import DataError
from .serve import MODES, make_app
from .toy import build_toy_model
from .train import TrainSettings, TrainingError, train

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finetune-harness",
        description=(
            "Finetune and serve small sequence-to-sequence summarizers: "
            "build a toy checkpoint, train on JSONL pairs, serve over HTTP."
        ),
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="chatty logging")
    subparsers = parser.add_subparsers(dest="verb", required=True)

    toy = subparsers.add_parser(
        "make-toy", help="build a tiny random checkpoint with a character tokenizer"
    )
    toy.add_argument("--output", required=True, help="directory for the checkpoint")
    toy.add_argument("--seed", type=int, default=7, help="weight init seed")

    fit = subparsers.add_parser("train", help="finetune a checkpoint on JSONL pairs")
    fit.add_argument("--model", required=True, help="checkpoint directory to start from")
    fit.add_argument("--pairs", required=True, help="JSONL training pairs file")
    fit.add_argument("--output", required=True, help="directory for the trained model")
    fit.add_argument("--epochs", type=int, default=1)
    fit.add_argument("--batch-size", type=int, default=2)
    fit.add_argument("--learning-rate", type=float, default=1e-3)
    fit.add_argument("--max-input-tokens", type=int, default=512)
    fit.add_argument("--max-target-tokens", type=int, default=64)
    fit.add_argument("--seed", type=int, default=13)
    fit.add_argument(
        "--partitions",
        help="comma-separated partitions to train on (default: all in the file)",
    )

    serve = subparsers.add_parser("serve", help="serve summaries over HTTP")
    serve.add_argument("--mode", choices=MODES, default="echo")
    serve.add_argument("--checkpoint", help="model directory (model mode only)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8080)
    serve.add_argument("--max-new-tokens", type=int, default=48)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.verb == "make-toy":
            path = build_toy_model(args.output, seed=args.seed)
            print(f"wrote toy checkpoint to {path}")
            return 0
        if args.verb == "train":
            partitions = (
                tuple(args.partitions.split(",")) if args.partitions else None
            )
            history = train(
                TrainSettings(
                    model_dir=args.model,
                    pairs_path=args.pairs,
                    output_dir=args.output,
                    epochs=args.epochs,
                    batch_size=args.batch_size,
                    learning_rate=args.learning_rate,
                    max_input_tokens=args.max_input_tokens,
                    max_target_tokens=args.max_target_tokens,
                    seed=args.seed,
                    partitions=partitions,
                )
            )
            means = ", ".join(f"{mean:.4f}" for mean in history["epoch_means"])
            print(
                f"trained on {history['pairs']} pairs for {history['steps']} steps; "
                f"epoch mean loss: {means}"
            )
            print(f"saved checkpoint to {args.output}")
            return 0
        if args.verb == "serve":
            import uvicorn

            app = make_app(
                checkpoint=args.checkpoint,
                mode=args.mode,
                max_new_tokens=args.max_new_tokens,
            )
            uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
            return 0
        raise AssertionError(f"unhandled verb {args.verb!r}")
    except (DataError, TrainingError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
