"""Multinomial softmax classifier: forward pass, cross-entropy loss, and
exact analytic gradients over sparse feature vectors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ValidationError
from .features import FeatureVector

Batch = Sequence[tuple[FeatureVector, int]]


@dataclass(frozen=True, eq=False)
class SoftmaxClassifier:
    """Linear classifier with K x D weights, K biases, and the label space
    giving each row its dialect name. Read-only after construction."""

    weights: np.ndarray
    bias: np.ndarray
    label_space: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))
        object.__setattr__(self, "bias", np.asarray(self.bias, dtype=np.float64))
        object.__setattr__(self, "label_space", tuple(self.label_space))
        k = len(self.label_space)
        if self.weights.ndim != 2 or self.weights.shape[0] != k or self.bias.shape != (k,):
            raise ValidationError(
                f"inconsistent dimensions: weights {self.weights.shape}, "
                f"bias {self.bias.shape}, {k} labels"
            )
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValidationError("model parameters must be finite")

    @property
    def num_classes(self) -> int:
        return len(self.label_space)

    @property
    def num_features(self) -> int:
        return self.weights.shape[1]

    @classmethod
    def zeros(cls, label_space: Sequence[str], num_features: int) -> "SoftmaxClassifier":
        k = len(label_space)
        return cls(
            weights=np.zeros((k, num_features)),
            bias=np.zeros(k),
            label_space=tuple(label_space),
        )


def softmax(logits: np.ndarray) -> np.ndarray:
    """Numerically stable softmax (shift by the max logit)."""
    shifted = logits - np.max(logits)
    exp = np.exp(shifted)
    return exp / np.sum(exp)


def _logits(model: SoftmaxClassifier, vector: FeatureVector) -> np.ndarray:
    if len(vector) == 0:
        return model.bias.copy()
    return model.bias + model.weights[:, vector.indices] @ vector.values


def loss_and_gradient(
    model: SoftmaxClassifier, batch: Batch
) -> tuple[float, tuple[np.ndarray, np.ndarray]]:
    """Mean cross-entropy over the batch and its exact gradients.

    Returns (loss, (grad_weights, grad_bias)) where loss is the mean over the
    batch of -ln softmax(Wx + b)[y].
    """
    if len(batch) == 0:
        raise ValidationError("loss_and_gradient needs a non-empty batch")
    k = model.num_classes
    grad_w = np.zeros_like(model.weights)
    grad_b = np.zeros_like(model.bias)
    total = 0.0
    for vector, target in batch:
        if not 0 <= target < k:
            raise ValidationError(f"class index {target} out of range for {k} classes")
        if len(vector) and not np.all(np.isfinite(vector.values)):
            raise ValidationError("non-finite feature values in batch")
        logits = _logits(model, vector)
        shifted = logits - np.max(logits)
        log_probs = shifted - np.log(np.sum(np.exp(shifted)))
        total += -log_probs[target]
        delta = np.exp(log_probs)  # softmax probabilities
        delta[target] -= 1.0
        grad_b += delta
        if len(vector):
            grad_w[:, vector.indices] += np.outer(delta, vector.values)
    n = len(batch)
    return total / n, (grad_w / n, grad_b / n)


def predict(model: SoftmaxClassifier, vector: FeatureVector) -> tuple[str, np.ndarray]:
    """Predicted label and the full softmax probability vector.

    Argmax ties resolve to the lowest class index, i.e. the lexicographically
    first label since label_space is sorted.
    """
    if len(vector) and int(vector.indices[-1]) >= model.num_features:
        raise ValidationError(
            f"feature index {int(vector.indices[-1])} out of range for "
            f"{model.num_features}-feature model"
        )
    probabilities = softmax(_logits(model, vector))
    return model.label_space[int(np.argmax(probabilities))], probabilities
