"""Prediction-file protocol.

Backends (native baseline or external transformer adapters) talk to the
ensembler and evaluator exclusively through these files, so misaligned or
malformed predictions fail loudly instead of silently shifting labels.

Canonical layout (UTF-8, LF line endings):

    # model_id=<model id>
    example_id<TAB>label[<TAB>p:<class_1>...<TAB>p:<class_K>]
    <id><TAB><label>[<TAB><p_1>...<TAB><p_K>]

Probability columns are optional; when present the header's `p:` suffixes
declare the label space and every row must sum to 1 within 1e-6. Floats are
serialized with repr() so a read/write cycle is bit-exact. Files written by
other tools may omit the `# model_id=` line, in which case the file stem is
used; such files gain the line on re-serialization.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import AlignmentError, ParseError, ValidationError
from .fileio import atomic_write

PROB_PREFIX = "p:"
_MODEL_ID_LINE = re.compile(r"#\s*model_id=(.*)")


@dataclass(frozen=True)
class PredictionSet:
    """One model's predictions: (example_id, label) pairs in test order, with
    optional per-entry probability rows over a declared label space."""

    model_id: str
    entries: tuple[tuple[str, str], ...]
    probabilities: tuple[tuple[float, ...], ...] | None = None
    label_space: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(e) for e in self.entries))
        if self.probabilities is not None:
            object.__setattr__(
                self, "probabilities", tuple(tuple(row) for row in self.probabilities)
            )
        if self.label_space is not None:
            object.__setattr__(self, "label_space", tuple(self.label_space))
        self.validate()

    def validate(self) -> None:
        if not self.model_id:
            raise ValidationError("model_id must be non-empty")
        seen: set[str] = set()
        for ex_id, label in self.entries:
            if not ex_id:
                raise ValidationError("prediction has an empty example id")
            if ex_id in seen:
                raise ValidationError(f"duplicate example id {ex_id!r} in predictions")
            seen.add(ex_id)
            if not label:
                raise ValidationError(f"empty predicted label for example {ex_id!r}")
        if (self.probabilities is None) != (self.label_space is None):
            raise ValidationError("probabilities and label_space must be provided together")
        if self.probabilities is not None:
            k = len(self.label_space)
            if len(self.probabilities) != len(self.entries):
                raise ValidationError("one probability row per entry required")
            for (ex_id, _), row in zip(self.entries, self.probabilities):
                if len(row) != k:
                    raise ValidationError(
                        f"probability row for {ex_id!r} has {len(row)} values, expected {k}"
                    )
                total = sum(row)
                if not abs(total - 1.0) <= 1e-6:
                    raise ValidationError(
                        f"probability row for {ex_id!r} sums to {total!r}, expected 1 +/- 1e-6"
                    )

    def ids(self) -> list[str]:
        return [ex_id for ex_id, _ in self.entries]

    def labels(self) -> list[str]:
        return [label for _, label in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def write_predictions(pset: PredictionSet, path: str | Path) -> None:
    """Serialize a prediction set (atomically); refuses invalid sets."""
    pset.validate()
    header = ["example_id", "label"]
    if pset.label_space is not None:
        header += [PROB_PREFIX + label for label in pset.label_space]
    with atomic_write(path) as f:
        f.write(f"# model_id={pset.model_id}\n")
        f.write("\t".join(header) + "\n")
        for i, (ex_id, label) in enumerate(pset.entries):
            cells = [ex_id, label]
            if pset.probabilities is not None:
                cells += [repr(p) for p in pset.probabilities[i]]
            f.write("\t".join(cells) + "\n")


def read_predictions(
    path: str | Path, expected_ids: Sequence[str] | None = None
) -> PredictionSet:
    """Parse a prediction file, enforcing the alignment contract.

    When expected_ids is given, the file's example ids must match it exactly,
    in order; any missing, extra, swapped, or duplicate id is an error naming
    the first offending row.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8-sig")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [line[:-1] if line.endswith("\r") else line for line in lines]
    line_no = 0

    model_id = path.stem
    if lines and lines[0].startswith("#"):
        match = _MODEL_ID_LINE.fullmatch(lines[0])
        if match and match.group(1):
            model_id = match.group(1)
        lines = lines[1:]
        line_no = 1

    if not lines:
        raise ParseError(f"{path}: missing header row", line=line_no + 1)
    header = lines[0].split("\t")
    line_no += 1
    if header[:2] != ["example_id", "label"]:
        raise ParseError(
            f"{path}: header must start with example_id<TAB>label, got {header[:2]}", line=line_no
        )
    label_space: tuple[str, ...] | None = None
    if len(header) > 2:
        for cell in header[2:]:
            if not cell.startswith(PROB_PREFIX):
                raise ParseError(f"{path}: malformed probability column {cell!r}", line=line_no)
        label_space = tuple(cell[len(PROB_PREFIX) :] for cell in header[2:])

    entries: list[tuple[str, str]] = []
    probabilities: list[tuple[float, ...]] = []
    seen: set[str] = set()
    for row_idx, line in enumerate(lines[1:]):
        line_no += 1
        cells = line.split("\t")
        if len(cells) != len(header):
            raise ParseError(
                f"{path}: expected {len(header)} columns, found {len(cells)}", line=line_no
            )
        ex_id, label = cells[0], cells[1]
        if ex_id in seen:
            raise ValidationError(f"{path}: duplicate example id {ex_id!r} (line {line_no})")
        seen.add(ex_id)
        if expected_ids is not None:
            if row_idx >= len(expected_ids):
                raise AlignmentError(
                    f"{path}: unexpected extra row for id {ex_id!r} (line {line_no}); "
                    f"expected exactly {len(expected_ids)} predictions"
                )
            if ex_id != expected_ids[row_idx]:
                raise AlignmentError(
                    f"{path}: line {line_no}: expected id {expected_ids[row_idx]!r}, "
                    f"found {ex_id!r}"
                )
        entries.append((ex_id, label))
        if label_space is not None:
            try:
                probabilities.append(tuple(float(cell) for cell in cells[2:]))
            except ValueError as exc:
                raise ParseError(f"{path}: bad probability value: {exc}", line=line_no) from None

    if expected_ids is not None and len(entries) < len(expected_ids):
        raise AlignmentError(
            f"{path}: file ended after {len(entries)} rows; "
            f"missing prediction for id {expected_ids[len(entries)]!r}"
        )
    return PredictionSet(
        model_id=model_id,
        entries=tuple(entries),
        probabilities=tuple(probabilities) if label_space is not None else None,
        label_space=label_space,
    )


def export_submission(pset: PredictionSet, path: str | Path) -> None:
    """Leaderboard-style export: one label per line, LF, no header, entry order.

    The shared task's exact submission layout is not documented; this bare
    format is a conventional assumption."""
    with atomic_write(path) as f:
        for _, label in pset.entries:
            f.write(label + "\n")


@dataclass(frozen=True)
class BackendManifest:
    """Provenance for one backend's predictions within a run."""

    model_id: str
    backend_kind: str  # "native-baseline" or "external"
    config_fingerprint: dict
    created_at: str

    def __post_init__(self):
        if not self.model_id:
            raise ValidationError("manifest model_id must be non-empty")
        if self.backend_kind not in ("native-baseline", "external"):
            raise ValidationError(f"unknown backend_kind {self.backend_kind!r}")

    def to_dict(self) -> dict:
        return {
            "model_id": self.model_id,
            "backend_kind": self.backend_kind,
            "config_fingerprint": self.config_fingerprint,
            "created_at": self.created_at,
        }
