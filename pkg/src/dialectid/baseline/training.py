"""Mini-batch training loop for the softmax baseline.

The schedule mirrors the shared-task recipe: a fixed number of epochs over
seeded-shuffled mini-batches, optimized with AdamW. Defaults keep that recipe
verbatim (10 epochs, lr 1e-5, batch 32); note that 1e-5 is a fine-tuning rate
that barely moves a zero-initialized linear model, so the CLI's baseline
profile overrides it to 1e-2 (recorded in run metadata).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..corpus import Corpus
from ..errors import ValidationError
from .features import NgramVocabulary, vectorize
from .model import SoftmaxClassifier, loss_and_gradient
from .optimizer import AdamWParams, AdamWState, adamw_step

BIAS_PARAM = 1  # index of the bias array in the [weights, bias] parameter list


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 10
    learning_rate: float = 1e-5
    batch_size: int = 32
    optimizer: AdamWParams = field(default_factory=AdamWParams)
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ValidationError(f"epochs must be >= 1, got {self.epochs}")
        if self.learning_rate <= 0.0:
            raise ValidationError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ValidationError(f"batch_size must be >= 1, got {self.batch_size}")


def train(
    corpus: Corpus, vocab: NgramVocabulary, config: TrainConfig
) -> tuple[SoftmaxClassifier, list[float]]:
    """Train a zero-initialized softmax classifier on a fully labeled corpus.

    Returns the trained model and the per-epoch mean loss. Deterministic in
    (corpus, vocab, config): the same seed yields identical parameters.
    """
    unlabeled = [ex.id for ex in corpus if ex.label is None]
    if unlabeled:
        raise ValidationError(f"cannot train on unlabeled examples (first: {unlabeled[0]!r})")
    if len(corpus.label_space) < 2:
        raise ValidationError(f"training needs >= 2 classes, got {len(corpus.label_space)}")
    if len(corpus) == 0:
        raise ValidationError("cannot train on an empty corpus")

    class_index = {label: i for i, label in enumerate(corpus.label_space)}
    data = [(vectorize(ex.content, vocab), class_index[ex.label]) for ex in corpus]

    model = SoftmaxClassifier.zeros(corpus.label_space, len(vocab))
    state = AdamWState.initial([model.weights, model.bias])
    rng = random.Random(config.seed)
    n = len(data)

    history: list[float] = []
    for _ in range(config.epochs):
        order = list(range(n))
        rng.shuffle(order)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            batch = [data[i] for i in order[start : start + config.batch_size]]
            loss, grads = loss_and_gradient(model, batch)
            (weights, bias), state = adamw_step(
                [model.weights, model.bias], grads, state, config, skip_decay={BIAS_PARAM}
            )
            model = SoftmaxClassifier(weights=weights, bias=bias, label_space=model.label_space)
            epoch_loss += loss * len(batch)
        history.append(epoch_loss / n)
    return model, history
