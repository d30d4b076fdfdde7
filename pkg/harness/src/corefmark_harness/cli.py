"""Command-line interface: init-tiny, finetune, generate."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from corefmark_harness.config import TrainConfig, load_config
from corefmark_harness.data import SchemaError


def cmd_init_tiny(args: argparse.Namespace) -> int:
    from corefmark_harness.tiny import init_tiny

    path = init_tiny(args.out_dir, family=args.family, seed=args.seed)
    print(f"tiny {args.family} model written to {path}")
    return 0


def _resolve_config(args: argparse.Namespace) -> TrainConfig:
    config = load_config(args.config) if args.config else TrainConfig()
    overrides = {}
    for name in (
        "base_model_id",
        "evaluation_strategy",
        "learning_rate",
        "weight_decay",
        "save_total_limit",
        "num_train_epochs",
        "batch_size",
        "seed",
        "max_output_length",
    ):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.gradient_checkpointing is not None:
        overrides["gradient_checkpointing"] = args.gradient_checkpointing == "true"
    return dataclasses.replace(config, **overrides) if overrides else config


def cmd_finetune(args: argparse.Namespace) -> int:
    from corefmark_harness.finetune import finetune

    config = _resolve_config(args)
    artifacts = finetune(args.train, args.val, config, args.out_dir)
    for row in artifacts.epochs:
        print(
            f"epoch {row['epoch']}: train_loss={row.get('train_loss', 'n/a')} "
            f"val_loss={row.get('val_loss', 'n/a')}"
        )
    print(f"checkpoint: {artifacts.checkpoint_dir}")
    print(f"config echo: {artifacts.config_path}")
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    from corefmark_harness.generate import generate

    count = generate(
        args.checkpoint,
        args.inputs,
        args.out,
        max_output_length=args.max_output_length,
        batch_size=args.batch_size,
        sample=args.sample,
    )
    print(f"{count} predictions -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coref-harness",
        description="Fine-tune a base model on annotation pair files and generate predictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init-tiny", help="materialize a tiny offline base model")
    p.add_argument("out_dir")
    p.add_argument("--family", choices=("seq2seq", "causal"), default="seq2seq")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_init_tiny)

    p = sub.add_parser("finetune", help="fine-tune a base model on pair files")
    p.add_argument("train")
    p.add_argument("val")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--config", default=None, help="flat key = value file")
    p.add_argument("--base-model-id", default=None)
    p.add_argument("--evaluation-strategy", default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--weight-decay", type=float, default=None)
    p.add_argument("--save-total-limit", type=int, default=None)
    p.add_argument("--num-train-epochs", type=int, default=None)
    p.add_argument("--gradient-checkpointing", choices=("true", "false"), default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-output-length", type=int, default=None)
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("generate", help="write a prediction file from a checkpoint")
    p.add_argument("checkpoint")
    p.add_argument("inputs", help="pair file; only novel_id/sent_id/input are used")
    p.add_argument("out")
    p.add_argument("--max-output-length", type=int, default=512)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--sample", action="store_true", help="sample instead of greedy")
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (SchemaError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
