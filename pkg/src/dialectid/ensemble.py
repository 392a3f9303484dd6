"""Combine aligned prediction sets into final labels by voting.

Hard voting picks the modal label per example; ties resolve by an explicit
policy (earliest model in a priority list, or the lexicographically smallest
tied label). Soft voting averages probability vectors and takes the argmax.
The agreement report quantifies how much the constituent models differ.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import AlignmentError, ValidationError
from .fileio import atomic_write
from .predfile import PredictionSet

ENSEMBLE_MODEL_ID = "ensemble"

STRATEGIES = ("hard", "soft")
TIE_BREAKS = ("model-priority", "lexicographic")


@dataclass(frozen=True)
class VotePolicy:
    strategy: str = "hard"
    tie_break: str = "model-priority"
    model_priority: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValidationError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")
        if self.tie_break not in TIE_BREAKS:
            raise ValidationError(
                f"unknown tie_break {self.tie_break!r}; expected one of {TIE_BREAKS}"
            )
        if self.model_priority is not None:
            object.__setattr__(self, "model_priority", tuple(self.model_priority))


def _ensure_aligned(sets: Sequence[PredictionSet]) -> None:
    if not sets:
        raise ValidationError("no prediction sets given")
    reference = sets[0].ids()
    for pset in sets[1:]:
        ids = pset.ids()
        if ids != reference:
            for i, (a, b) in enumerate(zip(reference, ids)):
                if a != b:
                    raise AlignmentError(
                        f"prediction sets misaligned: {sets[0].model_id!r} has id {a!r} "
                        f"at row {i + 1} but {pset.model_id!r} has {b!r}"
                    )
            raise AlignmentError(
                f"prediction sets misaligned: {sets[0].model_id!r} has {len(reference)} rows "
                f"but {pset.model_id!r} has {len(ids)}"
            )


def _checked_priority(sets: Sequence[PredictionSet], policy: VotePolicy) -> list[str]:
    if policy.model_priority is None:
        raise ValidationError("tie_break 'model-priority' requires a model_priority list")
    participating = [pset.model_id for pset in sets]
    if sorted(policy.model_priority) != sorted(participating):
        raise ValidationError(
            f"model_priority {list(policy.model_priority)} must name every participating "
            f"model exactly once ({participating})"
        )
    return list(policy.model_priority)


def hard_vote(sets: Sequence[PredictionSet], policy: VotePolicy) -> PredictionSet:
    """Majority vote over aligned prediction sets (the mode per example).

    Ties: with 'model-priority', the tied label predicted by the earliest
    model in policy.model_priority wins; with 'lexicographic', the smallest
    tied label string wins. Needs at least two sets.
    """
    if len(sets) < 2:
        raise ValidationError(f"hard voting needs >= 2 prediction sets, got {len(sets)}")
    _ensure_aligned(sets)
    priority: list[str] | None = None
    if policy.tie_break == "model-priority":
        priority = _checked_priority(sets, policy)
        by_model = {pset.model_id: pset for pset in sets}

    entries: list[tuple[str, str]] = []
    for row, ex_id in enumerate(sets[0].ids()):
        votes = Counter(pset.entries[row][1] for pset in sets)
        top = max(votes.values())
        tied = sorted(label for label, count in votes.items() if count == top)
        if len(tied) == 1:
            winner = tied[0]
        elif priority is not None:
            winner = next(
                by_model[model_id].entries[row][1]
                for model_id in priority
                if by_model[model_id].entries[row][1] in tied
            )
        else:
            winner = tied[0]
        entries.append((ex_id, winner))
    return PredictionSet(model_id=ENSEMBLE_MODEL_ID, entries=tuple(entries))


def soft_vote(sets: Sequence[PredictionSet], policy: VotePolicy) -> PredictionSet:
    """Argmax of the mean probability vector per example; argmax ties go to
    the lowest class index. Every set must carry probabilities over the same
    label space."""
    if len(sets) < 2:
        raise ValidationError(f"soft voting needs >= 2 prediction sets, got {len(sets)}")
    _ensure_aligned(sets)
    for pset in sets:
        if pset.probabilities is None:
            raise ValidationError(f"soft voting requires probabilities; {pset.model_id!r} has none")
    spaces = {pset.label_space for pset in sets}
    if len(spaces) != 1:
        raise ValidationError(f"soft voting requires one shared label space, got {len(spaces)}")
    label_space = sets[0].label_space

    entries: list[tuple[str, str]] = []
    means: list[tuple[float, ...]] = []
    m = len(sets)
    for row, ex_id in enumerate(sets[0].ids()):
        mean = [
            sum(pset.probabilities[row][k] for pset in sets) / m for k in range(len(label_space))
        ]
        best = max(range(len(label_space)), key=lambda k: (mean[k], -k))
        entries.append((ex_id, label_space[best]))
        means.append(tuple(mean))
    return PredictionSet(
        model_id=ENSEMBLE_MODEL_ID,
        entries=tuple(entries),
        probabilities=tuple(means),
        label_space=label_space,
    )


@dataclass(frozen=True)
class AgreementReport:
    """Diagnostics for an ensemble: how often models agree pairwise, how split
    each example's votes are, and the distribution of vote-split patterns
    (e.g. '3' unanimous, '2+1', '1+1+1')."""

    model_ids: tuple[str, ...]
    pairwise: tuple[tuple[str, str, float], ...]
    example_ids: tuple[str, ...]
    vote_entropy: tuple[float, ...]
    split_histogram: dict[str, int]


def agreement_report(sets: Sequence[PredictionSet]) -> AgreementReport:
    if len(sets) < 2:
        raise ValidationError(f"agreement report needs >= 2 prediction sets, got {len(sets)}")
    _ensure_aligned(sets)
    n = len(sets[0])
    labels = [pset.labels() for pset in sets]

    pairwise = []
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            same = sum(1 for a, b in zip(labels[i], labels[j]) if a == b)
            pairwise.append((sets[i].model_id, sets[j].model_id, same / n if n else 1.0))

    entropies: list[float] = []
    histogram: Counter[str] = Counter()
    m = len(sets)
    for row in range(n):
        votes = Counter(column[row] for column in labels)
        counts = sorted(votes.values(), reverse=True)
        histogram["+".join(str(c) for c in counts)] += 1
        entropies.append(-sum((c / m) * math.log(c / m) for c in counts))

    return AgreementReport(
        model_ids=tuple(pset.model_id for pset in sets),
        pairwise=tuple(pairwise),
        example_ids=tuple(sets[0].ids()),
        vote_entropy=tuple(entropies),
        split_histogram=dict(sorted(histogram.items())),
    )


def write_agreement_tsv(report: AgreementReport, path: str | Path) -> None:
    """Machine-readable agreement report: pairwise block, then per-example entropy."""
    with atomic_write(path) as f:
        f.write("section\tkey\tvalue\n")
        for a, b, rate in report.pairwise:
            f.write(f"pairwise\t{a}|{b}\t{rate!r}\n")
        for pattern, count in report.split_histogram.items():
            f.write(f"split\t{pattern}\t{count}\n")
        for ex_id, entropy in zip(report.example_ids, report.vote_entropy):
            f.write(f"entropy\t{ex_id}\t{entropy!r}\n")


def format_agreement_text(report: AgreementReport) -> str:
    lines = [f"Agreement across {len(report.model_ids)} models: {', '.join(report.model_ids)}"]
    lines.append("Pairwise agreement:")
    for a, b, rate in report.pairwise:
        lines.append(f"  {a} vs {b}: {100 * rate:.2f}%")
    lines.append("Vote splits:")
    total = len(report.example_ids)
    for pattern, count in report.split_histogram.items():
        share = 100 * count / total if total else 0.0
        lines.append(f"  {pattern}: {count} examples ({share:.2f}%)")
    mean_entropy = sum(report.vote_entropy) / total if total else 0.0
    lines.append(f"Mean vote entropy: {mean_entropy:.4f} nats")
    return "\n".join(lines)
