"""Scoring: confusion matrices, per-class precision/recall/F1, macro-F1.

The headline metric is macro-averaged F1 over the full label space: per class
P = diag/column sum and R = diag/row sum with 0/0 defined as 0, F1 = 2PR/(P+R)
(again 0/0 -> 0), and the macro mean runs over ALL classes including
zero-support ones, so never predicting a class costs score. A weighted
(support-proportional) average is available as an alternative. Scores are
computed at full precision and rounded only in formatted output (default two
decimals, like the shared-task tables).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """K x K counts; rows are gold labels, columns are predicted labels."""

    label_space: tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "label_space", tuple(self.label_space))
        object.__setattr__(self, "counts", np.asarray(self.counts, dtype=np.int64))
        k = len(self.label_space)
        if self.counts.shape != (k, k):
            raise ValidationError(f"counts shape {self.counts.shape} != ({k}, {k})")
        if np.any(self.counts < 0):
            raise ValidationError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class PerClassMetrics:
    label: str
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    """macro_f1 and accuracy are percentages in [0, 100]; per-class values
    are fractions in [0, 1], ordered by label space."""

    macro_f1: float
    accuracy: float
    per_class: tuple[PerClassMetrics, ...]


def confusion_matrix(
    gold: Sequence[str], pred: Sequence[str], label_space: Sequence[str]
) -> ConfusionMatrix:
    if len(gold) != len(pred):
        raise ValidationError(f"gold has {len(gold)} labels but predictions have {len(pred)}")
    if len(gold) == 0:
        raise ValidationError("cannot score zero examples")
    label_space = tuple(label_space)
    index = {label: i for i, label in enumerate(label_space)}
    counts = np.zeros((len(label_space), len(label_space)), dtype=np.int64)
    for g, p in zip(gold, pred):
        if g not in index:
            raise ValidationError(f"gold label {g!r} not in label space")
        if p not in index:
            raise ValidationError(f"predicted label {p!r} not in label space")
        counts[index[g], index[p]] += 1
    return ConfusionMatrix(label_space=label_space, counts=counts)


def _per_class(matrix: ConfusionMatrix) -> tuple[PerClassMetrics, ...]:
    diag = np.diag(matrix.counts).astype(np.float64)
    gold_totals = matrix.counts.sum(axis=1).astype(np.float64)
    pred_totals = matrix.counts.sum(axis=0).astype(np.float64)
    out = []
    for k, label in enumerate(matrix.label_space):
        precision = diag[k] / pred_totals[k] if pred_totals[k] > 0 else 0.0
        recall = diag[k] / gold_totals[k] if gold_totals[k] > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        out.append(
            PerClassMetrics(
                label=label,
                precision=float(precision),
                recall=float(recall),
                f1=float(f1),
                support=int(gold_totals[k]),
            )
        )
    return tuple(out)


def macro_f1(matrix: ConfusionMatrix) -> float:
    """Macro-F1 in [0, 100]: unweighted mean of per-class F1 over every class
    in the label space, zero-support classes included."""
    if matrix.total == 0:
        raise ValidationError("cannot score an empty confusion matrix")
    per_class = _per_class(matrix)
    return 100.0 * sum(m.f1 for m in per_class) / len(per_class)


def weighted_f1(matrix: ConfusionMatrix) -> float:
    """Support-weighted mean of per-class F1, in [0, 100]."""
    if matrix.total == 0:
        raise ValidationError("cannot score an empty confusion matrix")
    per_class = _per_class(matrix)
    return 100.0 * sum(m.f1 * m.support for m in per_class) / matrix.total


def accuracy(matrix: ConfusionMatrix) -> float:
    if matrix.total == 0:
        raise ValidationError("cannot score an empty confusion matrix")
    return 100.0 * float(np.trace(matrix.counts)) / matrix.total


def metrics_report(matrix: ConfusionMatrix) -> MetricsReport:
    if matrix.total == 0:
        raise ValidationError("cannot score an empty confusion matrix")
    per_class = _per_class(matrix)
    return MetricsReport(
        macro_f1=100.0 * sum(m.f1 for m in per_class) / len(per_class),
        accuracy=100.0 * float(np.trace(matrix.counts)) / matrix.total,
        per_class=per_class,
    )


def report_f1(report: MetricsReport, average: str = "macro") -> float:
    """Headline F1 for a report under the chosen averaging scheme."""
    if average == "macro":
        return report.macro_f1
    if average == "weighted":
        total = sum(m.support for m in report.per_class)
        if total == 0:
            raise ValidationError("weighted F1 undefined with zero total support")
        return 100.0 * sum(m.f1 * m.support for m in report.per_class) / total
    raise ValidationError(f"unknown average {average!r}; expected 'macro' or 'weighted'")


# --- results table (per-model scores with the ensemble row flagged) ---------


@dataclass(frozen=True)
class CompareRow:
    model_id: str
    f1: float
    accuracy: float
    is_ensemble: bool


@dataclass(frozen=True)
class ResultsTable:
    average: str
    rows: tuple[CompareRow, ...]


def compare_models(
    reports: Sequence[tuple[str, MetricsReport]],
    average: str = "macro",
    ensemble_ids: Sequence[str] = ("ensemble",),
) -> ResultsTable:
    """Build the per-model results table, rows in the given order, ensemble
    rows flagged."""
    if not reports:
        raise ValidationError("compare_models needs at least one report")
    rows = tuple(
        CompareRow(
            model_id=model_id,
            f1=report_f1(report, average),
            accuracy=report.accuracy,
            is_ensemble=model_id in ensemble_ids,
        )
        for model_id, report in reports
    )
    return ResultsTable(average=average, rows=rows)


# --- formatting --------------------------------------------------------------


def _f1_name(average: str) -> str:
    return "macro-F1" if average == "macro" else "weighted-F1"


def format_report_text(report: MetricsReport, digits: int = 2, average: str = "macro") -> str:
    width = max([len(m.label) for m in report.per_class] + [len("class")])
    lines = [
        f"{_f1_name(average)}: {report_f1(report, average):.{digits}f}",
        f"accuracy: {report.accuracy:.{digits}f}",
        "",
        f"{'class':<{width}}  {'precision':>9}  {'recall':>9}  {'f1':>9}  {'support':>7}",
    ]
    for m in report.per_class:
        lines.append(
            f"{m.label:<{width}}  {m.precision:>9.{digits + 2}f}  {m.recall:>9.{digits + 2}f}  "
            f"{m.f1:>9.{digits + 2}f}  {m.support:>7}"
        )
    return "\n".join(lines)


def report_to_dict(report: MetricsReport, digits: int = 2) -> dict:
    return {
        "macro_f1": round(report.macro_f1, digits),
        "weighted_f1": round(report_f1(report, "weighted"), digits),
        "accuracy": round(report.accuracy, digits),
        "per_class": [
            {
                "label": m.label,
                "precision": round(m.precision, digits + 2),
                "recall": round(m.recall, digits + 2),
                "f1": round(m.f1, digits + 2),
                "support": m.support,
            }
            for m in report.per_class
        ],
    }


def format_report_json(report: MetricsReport, digits: int = 2) -> str:
    return json.dumps(report_to_dict(report, digits), ensure_ascii=False, indent=2) + "\n"


def format_report_tsv(report: MetricsReport, digits: int = 2) -> str:
    lines = [
        "metric\tlabel\tvalue",
        f"macro_f1\t\t{report.macro_f1:.{digits}f}",
        f"weighted_f1\t\t{report_f1(report, 'weighted'):.{digits}f}",
        f"accuracy\t\t{report.accuracy:.{digits}f}",
    ]
    for m in report.per_class:
        lines.append(f"precision\t{m.label}\t{m.precision:.{digits + 2}f}")
        lines.append(f"recall\t{m.label}\t{m.recall:.{digits + 2}f}")
        lines.append(f"f1\t{m.label}\t{m.f1:.{digits + 2}f}")
        lines.append(f"support\t{m.label}\t{m.support}")
    return "\n".join(lines) + "\n"


def format_compare_text(table: ResultsTable, digits: int = 2) -> str:
    f1_name = _f1_name(table.average)
    width = max([len(row.model_id) for row in table.rows] + [len("model")])
    lines = [
        f"{'model':<{width}}  {f1_name:>12}  {'accuracy':>9}",
        "-" * (width + 25),
    ]
    for row in table.rows:
        marker = " *" if row.is_ensemble else ""
        lines.append(
            f"{row.model_id:<{width}}  {row.f1:>12.{digits}f}  {row.accuracy:>9.{digits}f}{marker}"
        )
    if any(row.is_ensemble for row in table.rows):
        lines.append("* ensemble row")
    return "\n".join(lines)


def format_compare_tsv(table: ResultsTable, digits: int = 2) -> str:
    lines = [f"model\t{_f1_name(table.average).replace('-', '_').lower()}\taccuracy\tensemble"]
    for row in table.rows:
        lines.append(
            f"{row.model_id}\t{row.f1:.{digits}f}\t{row.accuracy:.{digits}f}"
            f"\t{'yes' if row.is_ensemble else 'no'}"
        )
    return "\n".join(lines) + "\n"


def format_compare_json(table: ResultsTable, digits: int = 2) -> str:
    payload = {
        "average": table.average,
        "rows": [
            {
                "model_id": row.model_id,
                "f1": round(row.f1, digits),
                "accuracy": round(row.accuracy, digits),
                "ensemble": row.is_ensemble,
            }
            for row in table.rows
        ],
    }
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
