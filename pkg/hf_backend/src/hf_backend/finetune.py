"""Fine-tune a pretrained transformer and emit protocol-conformant predictions.

The training schema mirrors the shared-task recipe: AdamW, 10 epochs,
learning rate 1e-5, batch size 32. Output files follow the prediction-file
protocol of the primary pipeline (header comment with the model id, then
`example_id<TAB>label<TAB>p:<class>...` rows, floats via repr), so they are
consumed by its ensembler and evaluator without any code dependency.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import torch


class AdapterError(Exception):
    """Base class for adapter failures."""


class FetchError(AdapterError):
    """The pretrained checkpoint could not be loaded."""


class LabelSpaceError(AdapterError):
    """Eval corpus labels fall outside the training label space."""


class CorpusFormatError(AdapterError):
    """A corpus file does not match the expected TSV layout."""


@dataclass(frozen=True)
class FinetuneSpec:
    """Checkpoint plus the shared training schema."""

    model_name: str
    epochs: int = 10
    learning_rate: float = 1e-5
    batch_size: int = 32
    max_sequence_length: int = 128  # tweets are short; recipe leaves this unstated
    seed: int = 0
    device: str = "cpu"

    def __post_init__(self):
        if self.epochs < 1:
            raise AdapterError(f"epochs must be >= 1, got {self.epochs}")
        if self.max_sequence_length < 8:
            raise AdapterError(f"max_sequence_length must be >= 8, got {self.max_sequence_length}")
        if self.learning_rate <= 0:
            raise AdapterError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1:
            raise AdapterError(f"batch_size must be >= 1, got {self.batch_size}")


def read_corpus_tsv(path: str | Path) -> list[tuple[str, str, str | None]]:
    """Read the primary pipeline's TSV corpus format: header row naming id,
    content, and optionally label columns."""
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CorpusFormatError(f"{path}: empty file, expected a header row")
    header = lines[0].split("\t")
    if "id" not in header or "content" not in header:
        raise CorpusFormatError(f"{path}: header must name 'id' and 'content', got {header}")
    col = {name: header.index(name) for name in header}
    rows = []
    for line_no, line in enumerate(lines[1:], start=2):
        cells = line.split("\t")
        if len(cells) != len(header):
            raise CorpusFormatError(
                f"{path}: line {line_no}: expected {len(header)} columns, found {len(cells)}"
            )
        label = cells[col["label"]] if "label" in col else ""
        rows.append((cells[col["id"]], cells[col["content"]], label or None))
    return rows


def write_prediction_file(
    path: str | Path,
    model_id: str,
    entries: list[tuple[str, str]],
    probabilities: list[tuple[float, ...]],
    label_space: list[str],
) -> None:
    header = ["example_id", "label"] + [f"p:{label}" for label in label_space]
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# model_id={model_id}\n")
        f.write("\t".join(header) + "\n")
        for (ex_id, label), row in zip(entries, probabilities):
            f.write("\t".join([ex_id, label] + [repr(p) for p in row]) + "\n")


def _load_model_and_tokenizer(spec: FinetuneSpec, num_labels: int):
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(spec.model_name)
        model = AutoModelForSequenceClassification.from_pretrained(
            spec.model_name, num_labels=num_labels
        )
    except (OSError, EnvironmentError, ValueError) as exc:
        raise FetchError(f"cannot load checkpoint {spec.model_name!r}: {exc}") from exc
    return model, tokenizer


def _batches(n: int, batch_size: int, order: list[int] | None = None):
    indices = order if order is not None else list(range(n))
    for start in range(0, n, batch_size):
        yield indices[start : start + batch_size]


def finetune_and_predict(
    spec: FinetuneSpec,
    train_path: str | Path,
    eval_paths: dict[str, str | Path],
    out_dir: str | Path,
    model_id: str | None = None,
    log=print,
) -> dict:
    """Fine-tune on `train_path`, predict each eval corpus, write prediction
    files plus a JSON manifest into `out_dir`. Returns the manifest dict.

    Corpora are expected in the primary pipeline's TSV format and already
    cleaned. Eval corpora may be unlabeled; labeled ones must stay inside the
    training label space.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model_id = model_id or spec.model_name.rsplit("/", 1)[-1]

    train_rows = read_corpus_tsv(train_path)
    unlabeled = [ex_id for ex_id, _, label in train_rows if label is None]
    if unlabeled:
        raise LabelSpaceError(f"training example {unlabeled[0]!r} has no label")
    if not train_rows:
        raise AdapterError(f"{train_path}: training corpus is empty")
    label_space = sorted({label for _, _, label in train_rows})
    if len(label_space) < 2:
        raise AdapterError(f"need >= 2 training classes, got {label_space}")
    label_index = {label: i for i, label in enumerate(label_space)}

    eval_rows = {}
    for split_name, path in eval_paths.items():
        rows = read_corpus_tsv(path)
        foreign = [label for _, _, label in rows if label is not None and label not in label_index]
        if foreign:
            raise LabelSpaceError(
                f"{path}: eval label {foreign[0]!r} not in training label space {label_space}"
            )
        eval_rows[split_name] = rows

    torch.manual_seed(spec.seed)
    model, tokenizer = _load_model_and_tokenizer(spec, num_labels=len(label_space))
    device = torch.device(spec.device)
    model.to(device)

    def encode(texts: list[str]):
        enc = tokenizer(
            texts,
            truncation=True,
            max_length=spec.max_sequence_length,
            padding=True,
            return_tensors="pt",
        )
        return {k: v.to(device) for k, v in enc.items()}

    optimizer = torch.optim.AdamW(model.parameters(), lr=spec.learning_rate)
    rng = random.Random(spec.seed)
    texts = [content for _, content, _ in train_rows]
    targets = [label_index[label] for _, _, label in train_rows]

    model.train()
    loss_history = []
    for epoch in range(spec.epochs):
        order = list(range(len(train_rows)))
        rng.shuffle(order)
        epoch_loss = 0.0
        for batch in _batches(len(train_rows), spec.batch_size, order):
            inputs = encode([texts[i] for i in batch])
            labels = torch.tensor([targets[i] for i in batch], device=device)
            loss = model(**inputs, labels=labels).loss
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            epoch_loss += loss.item() * len(batch)
        loss_history.append(epoch_loss / len(train_rows))
        log(f"epoch {epoch + 1}/{spec.epochs}: mean loss {loss_history[-1]:.6f}")

    model.eval()
    prediction_files = {}
    for split_name, rows in eval_rows.items():
        entries: list[tuple[str, str]] = []
        probabilities: list[tuple[float, ...]] = []
        with torch.no_grad():
            for batch in _batches(len(rows), spec.batch_size):
                if not batch:
                    continue
                inputs = encode([rows[i][1] for i in batch])
                logits = model(**inputs).logits.double().cpu().numpy()
                for i, row_logits in zip(batch, logits):
                    shifted = np.exp(row_logits - row_logits.max())
                    probs = shifted / shifted.sum()
                    entries.append((rows[i][0], label_space[int(np.argmax(probs))]))
                    probabilities.append(tuple(float(p) for p in probs))
        path = out_dir / f"{model_id}.{split_name}.tsv"
        write_prediction_file(path, model_id, entries, probabilities, label_space)
        prediction_files[split_name] = str(path)
        log(f"{split_name}: {len(entries)} predictions -> {path}")

    manifest = {
        "model_id": model_id,
        "backend_kind": "external",
        "config_fingerprint": {
            "model_name": spec.model_name,
            "epochs": spec.epochs,
            "learning_rate": spec.learning_rate,
            "batch_size": spec.batch_size,
            "max_sequence_length": spec.max_sequence_length,
            "seed": spec.seed,
            "optimizer": {"name": "AdamW", "betas": [0.9, 0.999], "eps": 1e-8, "weight_decay": 0.01},
            "label_space": label_space,
        },
        "assumptions": [
            "max_sequence_length=128 default: the recipe does not state one",
            "no learning-rate warmup or scheduler",
            "AdamW weight decay left at the library default (0.01)",
        ],
        "final_train_loss": loss_history[-1],
        "loss_history": loss_history,
        "predictions": prediction_files,
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    manifest_path = out_dir / f"{model_id}.manifest.json"
    manifest_path.write_text(json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    log(f"manifest -> {manifest_path}")
    return manifest
