"""End-to-end run: clean -> split -> train/collect predictions -> ensemble ->
evaluate -> report.

Every output is written atomically, and the run manifest is written last, so
a run directory containing run_manifest.json is complete and a directory
without it is a failed/partial run. Given the same config (including seeds),
prediction files and reports are byte-identical across runs; only the
manifest carries timestamps.
"""

from __future__ import annotations

import hashlib
import json
from contextlib import contextmanager
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .baseline.features import fit_vocabulary, vectorize
from .baseline.modelio import save_model
from .baseline.training import train
from .corpus import Corpus, load_corpus, split_corpus, split_sizes
from .ensemble import (
    VotePolicy,
    agreement_report,
    format_agreement_text,
    hard_vote,
    soft_vote,
    write_agreement_tsv,
)
from .errors import StageError, ValidationError
from .evaluation import (
    MetricsReport,
    ResultsTable,
    compare_models,
    confusion_matrix,
    format_compare_text,
    format_compare_tsv,
    format_report_json,
    metrics_report,
)
from .fileio import atomic_write
from .predfile import BackendManifest, PredictionSet, read_predictions, write_predictions
from .preprocess import clean_corpus_with_stats
from .runconfig import (
    ExternalBackendSpec,
    NativeBackendSpec,
    RunConfig,
    SCHEMA_LEARNING_RATE,
)


@dataclass
class RunResult:
    output_dir: Path
    tables: dict[str, ResultsTable]  # split name -> results table
    manifest_path: Path


@contextmanager
def _stage(name: str):
    try:
        yield
    except StageError:
        raise
    except Exception as exc:
        raise StageError(name, exc) from exc


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _predict_corpus(model, vocab, corpus: Corpus, model_id: str) -> PredictionSet:
    from .baseline.model import predict

    entries = []
    probabilities = []
    for ex in corpus:
        label, probs = predict(model, vectorize(ex.content, vocab))
        entries.append((ex.id, label))
        probabilities.append(tuple(float(p) for p in probs))
    return PredictionSet(
        model_id=model_id,
        entries=tuple(entries),
        probabilities=tuple(probabilities),
        label_space=model.label_space,
    )


def _gold_labels(split_name: str, corpus: Corpus) -> list[str]:
    missing = [ex.id for ex in corpus if ex.label is None]
    if missing:
        raise ValidationError(
            f"cannot evaluate on split {split_name!r}: example {missing[0]!r} has no gold label"
        )
    return [ex.label for ex in corpus]


def run_pipeline(config: RunConfig, log=print) -> RunResult:
    """Execute a full run as described by `config`. Returns the per-split
    results tables and the manifest path."""
    out = config.output_dir
    created_at = datetime.now(timezone.utc).isoformat()
    outputs: dict[str, Path] = {}

    with _stage("setup"):
        (out / "predictions").mkdir(parents=True, exist_ok=True)
        (out / "models").mkdir(exist_ok=True)
        (out / "reports").mkdir(exist_ok=True)

    with _stage("load"):
        raw_corpus = load_corpus(config.corpus_path, config.corpus_format)
        log(f"loaded {len(raw_corpus)} examples, {len(raw_corpus.label_space)} labels")

    with _stage("clean"):
        cleaned, stats = clean_corpus_with_stats(raw_corpus, config.cleaning)
        log(
            f"cleaned {stats.examples} examples: removed {stats.tokens_removed} noise tokens, "
            f"{stats.emptied_contents} contents emptied"
        )

    with _stage("split"):
        train_split, dev_split, test_split = split_corpus(cleaned, config.split)
        splits = {"train": train_split, "dev": dev_split, "test": test_split}
        log(
            "split sizes: "
            + ", ".join(f"{name}={len(corpus)}" for name, corpus in splits.items())
        )

    train_corpus = train_split
    if config.extra_training:
        with _stage("extra-training"):
            examples = list(train_split.examples)
            label_space = set(train_split.label_space)
            for extra_path, extra_format in config.extra_training:
                extra_raw = load_corpus(extra_path, extra_format)
                extra_cleaned, _ = clean_corpus_with_stats(extra_raw, config.cleaning)
                examples.extend(extra_cleaned.examples)
                label_space.update(extra_cleaned.label_space)
            train_corpus = Corpus(
                examples=tuple(examples), label_space=tuple(sorted(label_space))
            )
            log(f"training set extended to {len(train_corpus)} examples")

    eval_splits = config.evaluation.splits
    predictions: dict[str, dict[str, PredictionSet]] = {name: {} for name in eval_splits}
    backend_manifests: list[BackendManifest] = []
    lr_profile: dict[str, dict] = {}

    for backend in config.backends:
        with _stage(f"backend:{backend.model_id}"):
            if isinstance(backend, NativeBackendSpec):
                vocab = fit_vocabulary(
                    train_corpus.contents(),
                    n_min=backend.features.n_min,
                    n_max=backend.features.n_max,
                    max_features=backend.features.max_features,
                )
                model, losses = train(train_corpus, vocab, backend.train)
                log(
                    f"{backend.model_id}: trained {len(vocab)} features, "
                    f"loss {losses[0]:.4f} -> {losses[-1]:.4f}"
                )
                model_path = out / "models" / f"{backend.model_id}.model"
                save_model(model, vocab, model_path)
                outputs[f"models/{backend.model_id}.model"] = model_path
                lr_profile[backend.model_id] = {
                    "learning_rate_used": backend.train.learning_rate,
                    "schema_default_learning_rate": SCHEMA_LEARNING_RATE,
                }
                fingerprint = {
                    "features": {
                        "n_min": backend.features.n_min,
                        "n_max": backend.features.n_max,
                        "max_features": backend.features.max_features,
                    },
                    "train": {
                        "epochs": backend.train.epochs,
                        "learning_rate": backend.train.learning_rate,
                        "batch_size": backend.train.batch_size,
                        "seed": backend.train.seed,
                        "beta1": backend.train.optimizer.beta1,
                        "beta2": backend.train.optimizer.beta2,
                        "epsilon": backend.train.optimizer.epsilon,
                        "weight_decay": backend.train.optimizer.weight_decay,
                    },
                    "final_loss": losses[-1],
                }
                for split_name in eval_splits:
                    pset = _predict_corpus(model, vocab, splits[split_name], backend.model_id)
                    predictions[split_name][backend.model_id] = pset
            else:
                assert isinstance(backend, ExternalBackendSpec)
                fingerprint = {"predictions": {}}
                for split_name in eval_splits:
                    if split_name not in backend.predictions:
                        raise ValidationError(
                            f"external backend {backend.model_id!r} has no prediction file "
                            f"for evaluated split {split_name!r}"
                        )
                    source = backend.predictions[split_name]
                    loaded = read_predictions(source, expected_ids=splits[split_name].ids())
                    pset = PredictionSet(
                        model_id=backend.model_id,
                        entries=loaded.entries,
                        probabilities=loaded.probabilities,
                        label_space=loaded.label_space,
                    )
                    predictions[split_name][backend.model_id] = pset
                    fingerprint["predictions"][split_name] = {
                        "path": str(source),
                        "sha256": _sha256(source),
                    }
                log(f"{backend.model_id}: external predictions validated")
            backend_manifests.append(
                BackendManifest(
                    model_id=backend.model_id,
                    backend_kind="native-baseline"
                    if isinstance(backend, NativeBackendSpec)
                    else "external",
                    config_fingerprint=fingerprint,
                    created_at=created_at,
                )
            )

    with _stage("write-predictions"):
        for split_name in eval_splits:
            for model_id, pset in predictions[split_name].items():
                rel = f"predictions/{model_id}.{split_name}.tsv"
                write_predictions(pset, out / rel)
                outputs[rel] = out / rel

    ensemble_sets: dict[str, PredictionSet] = {}
    with _stage("ensemble"):
        policy = VotePolicy(
            strategy=config.ensemble_strategy,
            tie_break=config.tie_break,
            model_priority=config.model_priority if config.tie_break == "model-priority" else None,
        )
        for split_name in eval_splits:
            sets = [predictions[split_name][b.model_id] for b in config.backends]
            voted = hard_vote(sets, policy) if policy.strategy == "hard" else soft_vote(sets, policy)
            ensemble_sets[split_name] = voted
            rel = f"predictions/ensemble.{split_name}.tsv"
            write_predictions(voted, out / rel)
            outputs[rel] = out / rel

            report = agreement_report(sets)
            rel_tsv = f"agreement.{split_name}.tsv"
            write_agreement_tsv(report, out / rel_tsv)
            outputs[rel_tsv] = out / rel_tsv
            rel_txt = f"agreement.{split_name}.txt"
            with atomic_write(out / rel_txt) as f:
                f.write(format_agreement_text(report) + "\n")
            outputs[rel_txt] = out / rel_txt

    tables: dict[str, ResultsTable] = {}
    with _stage("evaluate"):
        digits = config.evaluation.digits
        for split_name in eval_splits:
            gold_corpus = splits[split_name]
            gold = _gold_labels(split_name, gold_corpus)
            scored: list[tuple[str, MetricsReport]] = []
            for model_id in [b.model_id for b in config.backends] + ["ensemble"]:
                pset = (
                    ensemble_sets[split_name]
                    if model_id == "ensemble"
                    else predictions[split_name][model_id]
                )
                matrix = confusion_matrix(gold, pset.labels(), gold_corpus.label_space)
                report = metrics_report(matrix)
                scored.append((model_id, report))
                rel = f"reports/{model_id}.{split_name}.json"
                with atomic_write(out / rel) as f:
                    f.write(format_report_json(report, digits))
                outputs[rel] = out / rel
            table = compare_models(scored, average=config.evaluation.average)
            tables[split_name] = table
            rel = f"reports/compare.{split_name}.tsv"
            with atomic_write(out / rel) as f:
                f.write(format_compare_tsv(table, digits))
            outputs[rel] = out / rel
            rel = f"reports/compare.{split_name}.txt"
            with atomic_write(out / rel) as f:
                f.write(format_compare_text(table, digits) + "\n")
            outputs[rel] = out / rel

    with _stage("manifest"):
        manifest = {
            "created_at": created_at,
            "corpus": {
                "path": str(config.corpus_path),
                "sha256": _sha256(config.corpus_path),
                "examples": len(raw_corpus),
                "label_space": list(cleaned.label_space),
            },
            "cleaning": {
                "noise_tokens": list(config.cleaning.noise_tokens),
                "collapse_whitespace": config.cleaning.collapse_whitespace,
                "trim": config.cleaning.trim,
                "stats": {
                    "examples": stats.examples,
                    "tokens_removed": stats.tokens_removed,
                    "emptied_contents": stats.emptied_contents,
                },
            },
            "split": {
                "fractions": [
                    config.split.train_fraction,
                    config.split.dev_fraction,
                    config.split.test_fraction,
                ],
                "seed": config.split.seed,
                "sizes": dict(zip(("train", "dev", "test"), split_sizes(len(cleaned), config.split))),
            },
            "training": {
                "examples": len(train_corpus),
                "label_space": list(train_corpus.label_space),
                "extra_corpora": [str(path) for path, _ in config.extra_training],
            },
            "ensemble": {
                "strategy": config.ensemble_strategy,
                "tie_break": config.tie_break,
                "model_priority": list(config.model_priority),
            },
            "evaluation": {
                "splits": list(eval_splits),
                "average": config.evaluation.average,
                "digits": config.evaluation.digits,
            },
            "learning_rate_profile": lr_profile,
            "backends": [m.to_dict() for m in backend_manifests],
            "outputs": {rel: _sha256(path) for rel, path in sorted(outputs.items())},
        }
        manifest_path = out / "run_manifest.json"
        with atomic_write(manifest_path) as f:
            json.dump(manifest, f, ensure_ascii=False, indent=2)
            f.write("\n")

    return RunResult(output_dir=out, tables=tables, manifest_path=manifest_path)
