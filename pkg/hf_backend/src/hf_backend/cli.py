"""CLI for the transformer adapter.

Exit codes follow the primary pipeline's convention: 0 success, 1 validation
(label-space or corpus-format problems), 2 fetch/I-O failures, 3 internal.
"""

from __future__ import annotations

import argparse
import sys
import traceback

from .finetune import (
    AdapterError,
    CorpusFormatError,
    FetchError,
    FinetuneSpec,
    LabelSpaceError,
    finetune_and_predict,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hf-dialect-backend",
        description="Fine-tune a pretrained transformer on a labeled dialect corpus "
        "and write prediction files in the dialectid file protocol.",
    )
    parser.add_argument("--model-name", required=True, help="checkpoint name or local path")
    parser.add_argument("--train", required=True, help="labeled training corpus (TSV)")
    parser.add_argument(
        "--eval",
        action="append",
        required=True,
        metavar="NAME=PATH",
        help="repeatable; eval corpus to predict, e.g. --eval dev=dev.tsv",
    )
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--model-id", default=None, help="default: checkpoint basename")
    parser.add_argument("--epochs", type=int, default=10)
    parser.add_argument("--lr", type=float, default=1e-5)
    parser.add_argument("--batch-size", type=int, default=32)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-len", type=int, default=128)
    parser.add_argument("--device", default="cpu")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    eval_paths = {}
    for item in args.eval:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            print(f"error: --eval expects NAME=PATH, got {item!r}", file=sys.stderr)
            return 1
        if name in eval_paths:
            print(f"error: duplicate eval split {name!r}", file=sys.stderr)
            return 1
        eval_paths[name] = path
    spec = None
    try:
        spec = FinetuneSpec(
            model_name=args.model_name,
            epochs=args.epochs,
            learning_rate=args.lr,
            batch_size=args.batch_size,
            max_sequence_length=args.max_len,
            seed=args.seed,
            device=args.device,
        )
        finetune_and_predict(
            spec, args.train, eval_paths, args.out_dir, model_id=args.model_id
        )
        return 0
    except (LabelSpaceError, CorpusFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FetchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AdapterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
