"""Declarative run configuration.

A run is described by one YAML (or JSON) file rather than a pile of flags, so
experiments are reproducible artifacts. The file names the corpus, cleaning
rules, split spec, the participating backends (native baselines to train
and/or external prediction files), the vote policy, and evaluation options.
Validation checks referenced paths, unique model ids, and policy coverage
up front.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from .baseline.optimizer import AdamWParams
from .baseline.training import TrainConfig
from .corpus import SplitSpec
from .errors import ValidationError
from .preprocess import CleaningConfig

SPLIT_NAMES = ("train", "dev", "test")

# The shared-task recipe's lr (1e-5) is a transformer fine-tuning rate; it
# barely moves a zero-initialized linear model, so native baselines default
# to 1e-2 unless the config says otherwise. Both values land in run metadata.
BASELINE_PROFILE_LEARNING_RATE = 1e-2
SCHEMA_LEARNING_RATE = TrainConfig().learning_rate


@dataclass(frozen=True)
class FeatureParams:
    n_min: int = 2
    n_max: int = 4
    max_features: int = 50_000


@dataclass(frozen=True)
class NativeBackendSpec:
    model_id: str
    features: FeatureParams
    train: TrainConfig


@dataclass(frozen=True)
class ExternalBackendSpec:
    model_id: str
    predictions: dict[str, Path]  # split name -> prediction file


@dataclass(frozen=True)
class EvaluationOptions:
    splits: tuple[str, ...] = ("dev", "test")
    average: str = "macro"
    digits: int = 2


@dataclass(frozen=True)
class RunConfig:
    corpus_path: Path
    corpus_format: str | None
    extra_training: tuple[tuple[Path, str | None], ...]
    cleaning: CleaningConfig
    split: SplitSpec
    backends: tuple[NativeBackendSpec | ExternalBackendSpec, ...]
    ensemble_strategy: str
    tie_break: str
    model_priority: tuple[str, ...]
    evaluation: EvaluationOptions
    output_dir: Path


def _require(section: dict, key: str, context: str) -> Any:
    if key not in section:
        raise ValidationError(f"run config: missing {key!r} in {context}")
    return section[key]


def _as_section(value: Any, context: str) -> dict:
    if not isinstance(value, dict):
        raise ValidationError(f"run config: {context} must be a mapping")
    return value


def _parse_train(section: dict, default_lr: float) -> TrainConfig:
    opt = AdamWParams(
        beta1=float(section.get("beta1", 0.9)),
        beta2=float(section.get("beta2", 0.999)),
        epsilon=float(section.get("epsilon", 1e-8)),
        weight_decay=float(section.get("weight_decay", 0.01)),
    )
    return TrainConfig(
        epochs=int(section.get("epochs", 10)),
        learning_rate=float(section.get("learning_rate", default_lr)),
        batch_size=int(section.get("batch_size", 32)),
        optimizer=opt,
        seed=int(section.get("seed", 0)),
    )


def _parse_backend(entry: Any, base_dir: Path) -> NativeBackendSpec | ExternalBackendSpec:
    entry = _as_section(entry, "backends[] entry")
    model_id = str(_require(entry, "model_id", "backend"))
    kind = str(entry.get("kind", "native-baseline"))
    if kind == "native-baseline":
        feats = _as_section(entry.get("features", {}), f"features of {model_id}")
        features = FeatureParams(
            n_min=int(feats.get("n_min", 2)),
            n_max=int(feats.get("n_max", 4)),
            max_features=int(feats.get("max_features", 50_000)),
        )
        train = _parse_train(
            _as_section(entry.get("train", {}), f"train of {model_id}"),
            default_lr=BASELINE_PROFILE_LEARNING_RATE,
        )
        return NativeBackendSpec(model_id=model_id, features=features, train=train)
    if kind == "external":
        preds = _as_section(_require(entry, "predictions", f"backend {model_id}"), "predictions")
        resolved: dict[str, Path] = {}
        for split, raw_path in preds.items():
            if split not in SPLIT_NAMES:
                raise ValidationError(
                    f"run config: backend {model_id}: unknown split {split!r} in predictions"
                )
            resolved[split] = (base_dir / str(raw_path)).resolve()
        return ExternalBackendSpec(model_id=model_id, predictions=resolved)
    raise ValidationError(f"run config: backend {model_id}: unknown kind {kind!r}")


def load_run_config(path: str | Path, output_dir_default: Path | None = None) -> RunConfig:
    """Parse and validate a run config file (YAML or JSON)."""
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ValidationError(f"run config {path}: not valid YAML/JSON: {exc}") from exc
    raw = _as_section(raw, "top level")
    base_dir = path.parent

    corpus_section = _as_section(_require(raw, "corpus", "top level"), "corpus")
    corpus_path = (base_dir / str(_require(corpus_section, "path", "corpus"))).resolve()
    corpus_format = corpus_section.get("format")
    extra = []
    for item in corpus_section.get("extra_training", []) or []:
        item = _as_section(item, "corpus.extra_training[]")
        extra.append(
            ((base_dir / str(_require(item, "path", "extra_training"))).resolve(), item.get("format"))
        )

    cleaning_section = _as_section(raw.get("cleaning", {}), "cleaning")
    cleaning = CleaningConfig(
        noise_tokens=tuple(str(t) for t in cleaning_section.get("noise_tokens", ("USER", "NUM", "URL"))),
        collapse_whitespace=bool(cleaning_section.get("collapse_whitespace", True)),
        trim=bool(cleaning_section.get("trim", True)),
    )

    split_section = _as_section(_require(raw, "split", "top level"), "split")
    split = SplitSpec(
        train_fraction=float(_require(split_section, "train_fraction", "split")),
        dev_fraction=float(_require(split_section, "dev_fraction", "split")),
        test_fraction=float(_require(split_section, "test_fraction", "split")),
        seed=int(split_section.get("seed", 0)),
    )

    backends_raw = _require(raw, "backends", "top level")
    if not isinstance(backends_raw, list) or not backends_raw:
        raise ValidationError("run config: backends must be a non-empty list")
    backends = tuple(_parse_backend(entry, base_dir) for entry in backends_raw)
    model_ids = [b.model_id for b in backends]
    if len(set(model_ids)) != len(model_ids):
        raise ValidationError(f"run config: duplicate model_id in backends: {model_ids}")
    if len(backends) < 2:
        raise ValidationError(
            f"run config: ensembling requires >= 2 backends, got {len(backends)}"
        )

    ensemble_section = _as_section(raw.get("ensemble", {}), "ensemble")
    strategy = str(ensemble_section.get("strategy", "hard"))
    tie_break = str(ensemble_section.get("tie_break", "model-priority"))
    priority = tuple(str(m) for m in ensemble_section.get("model_priority", model_ids))
    if sorted(priority) != sorted(model_ids):
        raise ValidationError(
            f"run config: model_priority {list(priority)} must list every backend exactly once"
        )

    eval_section = _as_section(raw.get("evaluation", {}), "evaluation")
    splits_raw = eval_section.get("splits", ["dev", "test"])
    if isinstance(splits_raw, str):
        splits_raw = [splits_raw]
    splits = tuple(str(s) for s in splits_raw)
    for name in splits:
        if name not in SPLIT_NAMES:
            raise ValidationError(f"run config: unknown evaluation split {name!r}")
    if not splits:
        raise ValidationError("run config: evaluation.splits must not be empty")
    evaluation = EvaluationOptions(
        splits=splits,
        average=str(eval_section.get("average", "macro")),
        digits=int(eval_section.get("digits", 2)),
    )
    if evaluation.average not in ("macro", "weighted"):
        raise ValidationError(f"run config: unknown average {evaluation.average!r}")

    if "output_dir" in raw:
        output_dir = (base_dir / str(raw["output_dir"])).resolve()
    elif output_dir_default is not None:
        output_dir = output_dir_default.resolve()
    else:
        raise ValidationError(
            "run config: output_dir missing (set it in the config, pass --out-dir, "
            "or set DIALECTID_OUT_DIR)"
        )

    config = RunConfig(
        corpus_path=corpus_path,
        corpus_format=corpus_format,
        extra_training=tuple(extra),
        cleaning=cleaning,
        split=split,
        backends=backends,
        ensemble_strategy=strategy,
        tie_break=tie_break,
        model_priority=priority,
        evaluation=evaluation,
        output_dir=output_dir,
    )
    validate_paths(config)
    return config


def validate_paths(config: RunConfig) -> None:
    missing = []
    if not config.corpus_path.is_file():
        missing.append(str(config.corpus_path))
    for extra_path, _ in config.extra_training:
        if not extra_path.is_file():
            missing.append(str(extra_path))
    for backend in config.backends:
        if isinstance(backend, ExternalBackendSpec):
            for pred_path in backend.predictions.values():
                if not pred_path.is_file():
                    missing.append(str(pred_path))
    if missing:
        raise ValidationError("run config references missing files: " + ", ".join(missing))


def with_seed_override(config: RunConfig, seed: int) -> RunConfig:
    """Apply a --seed override: the split gets `seed`, the k-th backend (in
    listed order) gets `seed + k + 1` so sibling baselines stay distinct."""
    from dataclasses import replace

    backends = []
    for k, backend in enumerate(config.backends):
        if isinstance(backend, NativeBackendSpec):
            backends.append(replace(backend, train=replace(backend.train, seed=seed + k + 1)))
        else:
            backends.append(backend)
    return replace(
        config, split=replace(config.split, seed=seed), backends=tuple(backends)
    )
