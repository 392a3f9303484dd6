"""Character n-gram vocabulary fitting and TF-IDF vectorization.

Character n-grams (default lengths 2..4) are robust to dialectal spelling
variation. Weights are term frequency times smoothed idf,
idf(i) = ln((1 + N) / (1 + df_i)) + 1, then L2-normalized, so even a
single-document vocabulary yields finite nonzero weights.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from ..errors import ValidationError


@dataclass(frozen=True)
class NgramVocabulary:
    n_min: int
    n_max: int
    token_to_index: dict[str, int]
    document_frequency: tuple[int, ...]
    num_documents: int

    def __post_init__(self):
        if not 1 <= self.n_min <= self.n_max:
            raise ValidationError(f"need 1 <= n_min <= n_max, got {self.n_min}..{self.n_max}")
        if sorted(self.token_to_index.values()) != list(range(len(self.token_to_index))):
            raise ValidationError("vocabulary indices must be contiguous 0..V-1")
        if len(self.document_frequency) != len(self.token_to_index):
            raise ValidationError("document_frequency length must match vocabulary size")
        if any(df < 1 for df in self.document_frequency):
            raise ValidationError("document frequencies must be >= 1")

    def __len__(self) -> int:
        return len(self.token_to_index)

    @cached_property
    def idf(self) -> np.ndarray:
        """Smoothed idf per index; computed once, the dataclass is frozen."""
        df = np.asarray(self.document_frequency, dtype=np.float64)
        return np.log((1.0 + self.num_documents) / (1.0 + df)) + 1.0


@dataclass(frozen=True, eq=False)
class FeatureVector:
    """Sparse vector: parallel (indices, values) arrays, strictly increasing
    by index. Nonzero TF-IDF vectors carry unit L2 norm."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.int64))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.indices.shape != self.values.shape or self.indices.ndim != 1:
            raise ValidationError("indices and values must be parallel 1-d arrays")
        if len(self.indices) > 1 and not np.all(np.diff(self.indices) > 0):
            raise ValidationError("feature indices must be strictly increasing")

    def __len__(self) -> int:
        return len(self.indices)

    def as_pairs(self) -> list[tuple[int, float]]:
        return [(int(i), float(v)) for i, v in zip(self.indices, self.values)]

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.values**2)))


def iter_ngrams(text: str, n_min: int, n_max: int) -> Iterable[str]:
    """All character n-grams of lengths n_min..n_max, in position order."""
    for n in range(n_min, n_max + 1):
        for i in range(len(text) - n + 1):
            yield text[i : i + n]


def fit_vocabulary(
    texts: Sequence[str], n_min: int = 2, n_max: int = 4, max_features: int = 50_000
) -> NgramVocabulary:
    """Fit a vocabulary on `texts`, keeping the max_features n-grams with the
    highest document frequency (ties broken lexicographically). Indices are
    assigned in lexicographic order of the retained n-grams."""
    if not texts:
        raise ValidationError("cannot fit a vocabulary on an empty text list")
    if max_features < 1:
        raise ValidationError(f"max_features must be >= 1, got {max_features}")
    if not 1 <= n_min <= n_max:
        raise ValidationError(f"need 1 <= n_min <= n_max, got {n_min}..{n_max}")

    df: Counter[str] = Counter()
    for text in texts:
        df.update(set(iter_ngrams(text, n_min, n_max)))

    retained = sorted(df.items(), key=lambda item: (-item[1], item[0]))[:max_features]
    vocab = sorted(token for token, _ in retained)
    return NgramVocabulary(
        n_min=n_min,
        n_max=n_max,
        token_to_index={token: i for i, token in enumerate(vocab)},
        document_frequency=tuple(df[token] for token in vocab),
        num_documents=len(texts),
    )


def vectorize(text: str, vocab: NgramVocabulary) -> FeatureVector:
    """TF-IDF vector for `text`: counts of in-vocabulary n-grams times idf,
    L2-normalized. Out-of-vocabulary n-grams are ignored; a text with no
    in-vocabulary n-grams maps to the zero vector."""
    counts: Counter[int] = Counter()
    lookup = vocab.token_to_index
    for gram in iter_ngrams(text, vocab.n_min, vocab.n_max):
        idx = lookup.get(gram)
        if idx is not None:
            counts[idx] += 1
    if not counts:
        empty = np.empty(0)
        return FeatureVector(indices=empty, values=empty)
    indices = np.array(sorted(counts), dtype=np.int64)
    tf = np.array([counts[int(i)] for i in indices], dtype=np.float64)
    weights = tf * vocab.idf[indices]
    weights /= np.sqrt(np.sum(weights**2))
    return FeatureVector(indices=indices, values=weights)
