"""Tweet corpus ingestion, validation, splitting, and serialization.

The on-disk format follows the shared-task layout: a UTF-8 table with a
header row naming `id`, `content`, and optionally `label` columns. TSV files
are tab-separated with LF line endings and no quoting (fields therefore must
not contain tabs or newlines); CSV files use RFC-4180 quoting, so embedded
tabs/newlines/quotes survive a round-trip.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import EncodingError, ParseError, ValidationError
from .fileio import atomic_write

KNOWN_COLUMNS = ("id", "content", "label")
FORMATS = ("tsv", "csv")


@dataclass(frozen=True)
class LabeledExample:
    """One tweet record: opaque id, text content, optional dialect label."""

    id: str
    content: str
    label: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValidationError("example id must be non-empty")


@dataclass(frozen=True)
class Corpus:
    """An ordered collection of examples plus the label space they live in.

    label_space is sorted lexicographically (by Unicode code point) and may be
    a superset of the labels actually observed — splits inherit the parent
    space so class indices stay stable even when a split misses a class.
    Instances are immutable and safe to share across threads.
    """

    examples: tuple[LabeledExample, ...]
    label_space: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "examples", tuple(self.examples))
        object.__setattr__(self, "label_space", tuple(self.label_space))
        if list(self.label_space) != sorted(set(self.label_space)):
            raise ValidationError("label_space must be sorted and duplicate-free")
        space = set(self.label_space)
        seen: set[str] = set()
        for ex in self.examples:
            if ex.id in seen:
                raise ValidationError(f"duplicate example id: {ex.id!r}")
            seen.add(ex.id)
            if ex.label is not None and ex.label not in space:
                raise ValidationError(f"label {ex.label!r} of example {ex.id!r} not in label space")

    @classmethod
    def from_examples(cls, examples: Iterable[LabeledExample]) -> "Corpus":
        """Build a corpus with the label space derived from observed labels."""
        examples = tuple(examples)
        space = sorted({ex.label for ex in examples if ex.label is not None})
        return cls(examples=examples, label_space=tuple(space))

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def ids(self) -> list[str]:
        return [ex.id for ex in self.examples]

    def labels(self) -> list[str | None]:
        return [ex.label for ex in self.examples]

    def contents(self) -> list[str]:
        return [ex.content for ex in self.examples]

    def fully_labeled(self) -> bool:
        return all(ex.label is not None for ex in self.examples)


@dataclass(frozen=True)
class SplitSpec:
    """Train/dev/test fractions plus the shuffle seed."""

    train_fraction: float
    dev_fraction: float
    test_fraction: float
    seed: int = 0

    def __post_init__(self):
        fracs = (self.train_fraction, self.dev_fraction, self.test_fraction)
        for f in fracs:
            if not 0.0 <= f <= 1.0:
                raise ValidationError(f"split fraction {f} outside [0, 1]")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise ValidationError(f"split fractions must sum to 1, got {sum(fracs)}")


def _infer_format(path: str | Path, fmt: str | None) -> str:
    if fmt is None:
        fmt = Path(path).suffix.lstrip(".").lower() or "tsv"
    if fmt not in FORMATS:
        raise ValidationError(f"unknown corpus format {fmt!r}; expected one of {FORMATS}")
    return fmt


def _column_layout(header: Sequence[str]) -> dict[str, int]:
    cols = list(header)
    for name in cols:
        if name not in KNOWN_COLUMNS:
            raise ParseError(f"unknown column {name!r}; expected columns from {KNOWN_COLUMNS}", line=1)
    if len(set(cols)) != len(cols):
        raise ParseError(f"duplicate column in header: {cols}", line=1)
    if "id" not in cols or "content" not in cols:
        raise ParseError(f"header must name 'id' and 'content' columns, got {cols}", line=1)
    return {name: cols.index(name) for name in cols}


def _rows_to_corpus(rows: Iterable[tuple[int, list[str]]], layout: dict[str, int]) -> Corpus:
    width = len(layout)
    has_label = "label" in layout
    examples: list[LabeledExample] = []
    seen: set[str] = set()
    for line_no, fields in rows:
        if len(fields) != width:
            raise ParseError(f"expected {width} columns, found {len(fields)}", line=line_no)
        ex_id = fields[layout["id"]]
        if not ex_id:
            raise ParseError("empty id", line=line_no)
        if ex_id in seen:
            raise ValidationError(f"duplicate example id {ex_id!r} (line {line_no})")
        seen.add(ex_id)
        label = fields[layout["label"]] if has_label else ""
        examples.append(
            LabeledExample(id=ex_id, content=fields[layout["content"]], label=label or None)
        )
    return Corpus.from_examples(examples)


def load_corpus(path: str | Path, format: str | None = None) -> Corpus:
    """Load a corpus file; rows keep file order, label space is the sorted
    set of observed labels (empty when no label column / no labels)."""
    path = Path(path)
    fmt = _infer_format(path, format)
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8-sig")  # tolerate a BOM; otherwise plain UTF-8
    except UnicodeDecodeError as exc:
        raise EncodingError(f"{path}: not valid UTF-8 at byte {exc.start}") from exc

    if fmt == "tsv":
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        lines = [line[:-1] if line.endswith("\r") else line for line in lines]
        if not lines:
            raise ParseError(f"{path}: empty file, expected a header row", line=1)
        layout = _column_layout(lines[0].split("\t"))
        rows = ((i + 2, line.split("\t")) for i, line in enumerate(lines[1:]))
        return _rows_to_corpus(rows, layout)

    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{path}: empty file, expected a header row", line=1) from None
    layout = _column_layout(header)
    rows = ((reader.line_num, fields) for fields in reader)
    return _rows_to_corpus(rows, layout)


def _check_tsv_safe(value: str, what: str) -> None:
    if any(ch in value for ch in ("\t", "\n", "\r")):
        raise ValidationError(f"{what} contains a tab or newline; not representable in TSV (use csv)")


def save_corpus(corpus: Corpus, path: str | Path, format: str | None = None) -> None:
    """Write a corpus so that load_corpus(path) round-trips it.

    The label column is emitted when the corpus carries any label information;
    unlabeled examples then get an empty label cell.
    """
    path = Path(path)
    fmt = _infer_format(path, format)
    with_label = bool(corpus.label_space) or any(ex.label is not None for ex in corpus)
    header = ["id", "content", "label"] if with_label else ["id", "content"]

    def row_of(ex: LabeledExample) -> list[str]:
        row = [ex.id, ex.content]
        if with_label:
            row.append(ex.label or "")
        return row

    if fmt == "tsv":
        for ex in corpus:
            _check_tsv_safe(ex.id, f"id {ex.id!r}")
            _check_tsv_safe(ex.content, f"content of example {ex.id!r}")
            if ex.label:
                _check_tsv_safe(ex.label, f"label of example {ex.id!r}")
        with atomic_write(path) as f:
            f.write("\t".join(header) + "\n")
            for ex in corpus:
                f.write("\t".join(row_of(ex)) + "\n")
        return

    with atomic_write(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for ex in corpus:
            writer.writerow(row_of(ex))


def split_sizes(n: int, spec: SplitSpec) -> tuple[int, int, int]:
    """Sizes for the three splits: round(N*fraction) for train and dev, the
    test split absorbs the rounding remainder."""
    n_train = round(n * spec.train_fraction)
    n_dev = round(n * spec.dev_fraction)
    n_test = n - n_train - n_dev
    return n_train, n_dev, n_test


def split_corpus(corpus: Corpus, spec: SplitSpec) -> tuple[Corpus, Corpus, Corpus]:
    """Partition a corpus into (train, dev, test) by a seeded shuffle.

    Deterministic in (corpus, spec): the same seed always selects the same
    examples. Within each split, examples keep their original corpus order.
    All three splits inherit the parent label_space.
    """
    n = len(corpus)
    if n == 0:
        raise ValidationError("cannot split an empty corpus")
    sizes = split_sizes(n, spec)
    names = ("train", "dev", "test")
    for name, size in zip(names, sizes):
        if size <= 0:
            raise ValidationError(
                f"degenerate split: {name} would get {size} of {n} examples "
                f"with fractions ({spec.train_fraction}, {spec.dev_fraction}, {spec.test_fraction})"
            )
    order = list(range(n))
    random.Random(spec.seed).shuffle(order)
    bounds = (0, sizes[0], sizes[0] + sizes[1], n)
    parts = []
    for lo, hi in zip(bounds, bounds[1:]):
        picked = sorted(order[lo:hi])
        parts.append(
            Corpus(
                examples=tuple(corpus.examples[i] for i in picked),
                label_space=corpus.label_space,
            )
        )
    return parts[0], parts[1], parts[2]
