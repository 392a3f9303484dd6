"""Command-line entry point.

Subcommands wire the pipeline stages together: `clean`, `split`,
`train-baseline`, `predict`, `ensemble`, `evaluate`, `report`, and the
all-in-one `run` driven by a declarative config file.

Exit codes: 0 success, 1 validation/parse/alignment error, 2 I/O error,
3 internal error. DIALECTID_OUT_DIR provides the default output directory
where a command does not name one.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback
from dataclasses import replace
from pathlib import Path

from . import __version__
from .baseline.features import fit_vocabulary, vectorize
from .baseline.modelio import load_model, save_model
from .baseline.optimizer import AdamWParams
from .baseline.training import TrainConfig, train
from .corpus import Corpus, SplitSpec, load_corpus, save_corpus, split_corpus
from .ensemble import (
    VotePolicy,
    agreement_report,
    format_agreement_text,
    hard_vote,
    soft_vote,
    write_agreement_tsv,
)
from .errors import DialectIdError, StageError, ValidationError
from .evaluation import (
    compare_models,
    confusion_matrix,
    format_compare_json,
    format_compare_text,
    format_compare_tsv,
    format_report_json,
    format_report_text,
    format_report_tsv,
    metrics_report,
)
from .pipeline import run_pipeline
from .predfile import PredictionSet, export_submission, read_predictions, write_predictions
from .preprocess import DEFAULT_NOISE_TOKENS, CleaningConfig, clean_corpus_with_stats
from .runconfig import (
    BASELINE_PROFILE_LEARNING_RATE,
    SCHEMA_LEARNING_RATE,
    load_run_config,
    with_seed_override,
)

OUT_DIR_ENV = "DIALECTID_OUT_DIR"

# Paper-recipe split fractions (18000/1800/3600 of 23400).
DEFAULT_FRACTIONS = (10 / 13, 1 / 13, 2 / 13)


def _env_out_dir() -> Path | None:
    value = os.environ.get(OUT_DIR_ENV)
    return Path(value) if value else None


def _resolve_out_dir(flag_value: str | None) -> Path:
    if flag_value:
        return Path(flag_value)
    env = _env_out_dir()
    if env is not None:
        return env
    raise ValidationError(f"no output directory: pass --out-dir or set {OUT_DIR_ENV}")


def _cleaning_config(args) -> CleaningConfig:
    tokens = tuple(args.noise_token) if args.noise_token else DEFAULT_NOISE_TOKENS
    return CleaningConfig(
        noise_tokens=tokens,
        collapse_whitespace=not args.no_collapse_whitespace,
        trim=not args.no_trim,
    )


def cmd_clean(args) -> int:
    corpus = load_corpus(args.input, args.format)
    cleaned, stats = clean_corpus_with_stats(corpus, _cleaning_config(args))
    dropped = 0
    if not args.keep_empty:
        kept = tuple(ex for ex in cleaned if ex.content != "")
        dropped = len(cleaned) - len(kept)
        cleaned = Corpus(examples=kept, label_space=cleaned.label_space)
    save_corpus(cleaned, args.output, args.out_format or args.format)
    print(f"processed {stats.examples} examples")
    print(f"removed {stats.tokens_removed} noise tokens")
    print(f"{stats.emptied_contents} contents emptied by cleaning")
    if not args.keep_empty:
        print(f"dropped {dropped} empty examples")
    return 0


def cmd_split(args) -> int:
    corpus = load_corpus(args.input, args.format)
    spec = SplitSpec(
        train_fraction=args.train_fraction,
        dev_fraction=args.dev_fraction,
        test_fraction=args.test_fraction,
        seed=args.seed,
    )
    parts = split_corpus(corpus, spec)
    out_dir = _resolve_out_dir(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem
    fmt = args.out_format or args.format or Path(args.input).suffix.lstrip(".") or "tsv"
    for name, part in zip(("train", "dev", "test"), parts):
        path = out_dir / f"{stem}.{name}.{fmt}"
        save_corpus(part, path, fmt)
        print(f"{name}: {len(part)} examples -> {path}")
    return 0


def cmd_train_baseline(args) -> int:
    corpus = load_corpus(args.corpus, args.format)
    vocab = fit_vocabulary(
        corpus.contents(), n_min=args.n_min, n_max=args.n_max, max_features=args.max_features
    )
    config = TrainConfig(
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        optimizer=AdamWParams(
            beta1=args.beta1,
            beta2=args.beta2,
            epsilon=args.epsilon,
            weight_decay=args.weight_decay,
        ),
        seed=args.seed,
    )
    model, losses = train(corpus, vocab, config)
    save_model(model, vocab, args.model_out)
    print(f"vocabulary: {len(vocab)} n-grams ({args.n_min}..{args.n_max})")
    for epoch, loss in enumerate(losses, start=1):
        print(f"epoch {epoch}: mean loss {loss:.6f}")
    print(f"model -> {args.model_out}")
    return 0


def cmd_predict(args) -> int:
    model, vocab = load_model(args.model)
    corpus = load_corpus(args.corpus, args.format)
    from .baseline.model import predict as predict_one

    entries = []
    probabilities = []
    for ex in corpus:
        label, probs = predict_one(model, vectorize(ex.content, vocab))
        entries.append((ex.id, label))
        probabilities.append(tuple(float(p) for p in probs))
    pset = PredictionSet(
        model_id=args.model_id or Path(args.model).stem,
        entries=tuple(entries),
        probabilities=tuple(probabilities),
        label_space=model.label_space,
    )
    write_predictions(pset, args.out)
    print(f"{len(pset)} predictions -> {args.out}")
    if args.submission:
        export_submission(pset, args.submission)
        print(f"submission labels -> {args.submission}")
    return 0


def cmd_ensemble(args) -> int:
    if len(args.predictions) < 2:
        raise ValidationError(f"ensemble requires >= 2 prediction files, got {len(args.predictions)}")
    first = read_predictions(args.predictions[0])
    sets = [first]
    for path in args.predictions[1:]:
        sets.append(read_predictions(path, expected_ids=first.ids()))
    priority = tuple(args.priority.split(",")) if args.priority else tuple(s.model_id for s in sets)
    policy = VotePolicy(
        strategy=args.strategy,
        tie_break=args.tie_break,
        model_priority=priority if args.tie_break == "model-priority" else None,
    )
    voted = hard_vote(sets, policy) if args.strategy == "hard" else soft_vote(sets, policy)
    write_predictions(voted, args.out)
    print(f"ensemble of {len(sets)} models -> {args.out}")
    report = agreement_report(sets)
    if args.agreement_out:
        write_agreement_tsv(report, args.agreement_out)
        print(f"agreement report -> {args.agreement_out}")
    print(format_agreement_text(report))
    return 0


def _score_prediction_file(gold: Corpus, path: str):
    unlabeled = [ex.id for ex in gold if ex.label is None]
    if unlabeled:
        raise ValidationError(f"gold corpus has unlabeled example {unlabeled[0]!r}")
    pset = read_predictions(path, expected_ids=gold.ids())
    matrix = confusion_matrix(
        [ex.label for ex in gold], pset.labels(), gold.label_space
    )
    return pset, metrics_report(matrix)


def cmd_evaluate(args) -> int:
    gold = load_corpus(args.gold, args.gold_format)
    _, report = _score_prediction_file(gold, args.predictions)
    if args.format == "json":
        sys.stdout.write(format_report_json(report, args.digits))
    elif args.format == "tsv":
        sys.stdout.write(format_report_tsv(report, args.digits))
    else:
        print(format_report_text(report, args.digits, average=args.average))
    return 0


def cmd_report(args) -> int:
    gold = load_corpus(args.gold, args.gold_format)
    scored = []
    for path in args.predictions:
        pset, report = _score_prediction_file(gold, path)
        scored.append((pset.model_id, report))
    table = compare_models(scored, average=args.average)
    if args.format == "json":
        sys.stdout.write(format_compare_json(table, args.digits))
    elif args.format == "tsv":
        sys.stdout.write(format_compare_tsv(table, args.digits))
    else:
        print(format_compare_text(table, args.digits))
    return 0


def cmd_run(args) -> int:
    config = load_run_config(args.config, output_dir_default=_env_out_dir())
    if args.out_dir:
        config = replace(config, output_dir=Path(args.out_dir).resolve())
    if args.seed is not None:
        config = with_seed_override(config, args.seed)
    result = run_pipeline(config)
    for split_name, table in result.tables.items():
        print(f"\n== results on {split_name} ==")
        print(format_compare_text(table, config.evaluation.digits))
    print(f"\nrun manifest -> {result.manifest_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dialectid",
        description="Multi-class dialect identification pipeline: clean, split, "
        "train baselines, ensemble by hard voting, score with macro-F1.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("clean", help="remove noise tokens and normalize whitespace")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--format", choices=("tsv", "csv"), default=None)
    p.add_argument("--out-format", choices=("tsv", "csv"), default=None)
    p.add_argument(
        "--noise-token",
        action="append",
        metavar="TOKEN",
        help=f"repeatable; default: {' '.join(DEFAULT_NOISE_TOKENS)}",
    )
    p.add_argument("--no-collapse-whitespace", action="store_true")
    p.add_argument("--no-trim", action="store_true")
    p.add_argument(
        "--keep-empty",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="keep examples whose content is empty after cleaning (default)",
    )
    p.set_defaults(func=cmd_clean)

    p = sub.add_parser("split", help="seeded train/dev/test split")
    p.add_argument("input")
    p.add_argument("--format", choices=("tsv", "csv"), default=None)
    p.add_argument("--out-format", choices=("tsv", "csv"), default=None)
    p.add_argument("--out-dir", default=None, help=f"default: ${OUT_DIR_ENV}")
    p.add_argument("--train-fraction", type=float, default=DEFAULT_FRACTIONS[0])
    p.add_argument("--dev-fraction", type=float, default=DEFAULT_FRACTIONS[1])
    p.add_argument("--test-fraction", type=float, default=DEFAULT_FRACTIONS[2])
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser(
        "train-baseline",
        help="train the native TF-IDF softmax baseline on a (cleaned) labeled corpus",
    )
    p.add_argument("corpus")
    p.add_argument("--format", choices=("tsv", "csv"), default=None)
    p.add_argument("--model-out", required=True)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--max-features", type=int, default=50_000)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument(
        "--learning-rate",
        type=float,
        default=BASELINE_PROFILE_LEARNING_RATE,
        help="baseline profile default %(default)s; the shared-task recipe value "
        f"({SCHEMA_LEARNING_RATE}) is a transformer fine-tuning rate that barely "
        "moves this linear model",
    )
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--beta1", type=float, default=0.9)
    p.add_argument("--beta2", type=float, default=0.999)
    p.add_argument("--epsilon", type=float, default=1e-8)
    p.add_argument("--weight-decay", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_baseline)

    p = sub.add_parser("predict", help="predict labels for a corpus with a saved baseline model")
    p.add_argument("model")
    p.add_argument("corpus")
    p.add_argument("--format", choices=("tsv", "csv"), default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--model-id", default=None, help="default: model file stem")
    p.add_argument("--submission", default=None, help="also export bare label-per-line file")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("ensemble", help="combine >= 2 prediction files by voting")
    p.add_argument("predictions", nargs="+")
    p.add_argument("--strategy", choices=("hard", "soft"), default="hard")
    p.add_argument("--tie-break", choices=("model-priority", "lexicographic"), default="model-priority")
    p.add_argument(
        "--priority",
        default=None,
        help="comma-separated model ids for model-priority ties; default: input order",
    )
    p.add_argument("--out", required=True)
    p.add_argument("--agreement-out", default=None, help="write the agreement report TSV here")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("evaluate", help="score one prediction file against gold labels")
    p.add_argument("gold")
    p.add_argument("predictions")
    p.add_argument("--gold-format", choices=("tsv", "csv"), default=None)
    p.add_argument("--format", choices=("text", "tsv", "json"), default="text")
    p.add_argument("--digits", type=int, default=2)
    p.add_argument("--average", choices=("macro", "weighted"), default="macro")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="per-model results table for >= 1 prediction files")
    p.add_argument("predictions", nargs="+")
    p.add_argument("--gold", required=True)
    p.add_argument("--gold-format", choices=("tsv", "csv"), default=None)
    p.add_argument("--format", choices=("text", "tsv", "json"), default="text")
    p.add_argument("--digits", type=int, default=2)
    p.add_argument("--average", choices=("macro", "weighted"), default="macro")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("run", help="execute a full pipeline run from a config file")
    p.add_argument("config")
    p.add_argument("--out-dir", default=None, help=f"override output_dir (or ${OUT_DIR_ENV})")
    p.add_argument("--seed", type=int, default=None, help="override config seeds")
    p.set_defaults(func=cmd_run)

    return parser


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, StageError):
        return _exit_code(exc.cause)
    if isinstance(exc, ValidationError):
        return 1
    if isinstance(exc, OSError):
        return 2
    return 3


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DialectIdError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
