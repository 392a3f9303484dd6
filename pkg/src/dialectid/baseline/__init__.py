"""Native classifier backend: character n-gram TF-IDF features feeding a
multinomial softmax classifier trained with a from-scratch AdamW optimizer.

This backend exists so the whole pipeline (train -> predict -> ensemble ->
evaluate) runs at desk scale with no external model dependencies.
"""

from .features import FeatureVector, NgramVocabulary, fit_vocabulary, vectorize
from .model import SoftmaxClassifier, loss_and_gradient, predict, softmax
from .modelio import load_model, save_model
from .optimizer import AdamWParams, AdamWState, adamw_step
from .training import TrainConfig, train

__all__ = [
    "AdamWParams",
    "AdamWState",
    "FeatureVector",
    "NgramVocabulary",
    "SoftmaxClassifier",
    "TrainConfig",
    "adamw_step",
    "fit_vocabulary",
    "load_model",
    "loss_and_gradient",
    "predict",
    "save_model",
    "softmax",
    "train",
    "vectorize",
]
