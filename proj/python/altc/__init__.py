"""Active-learning text classification: preprocessing, TF-IDF, one-vs-rest
logistic regression, entropy sampling and evaluation."""

from ._core import (
    AltcError,
    TextClassifier,
    class_weights,
    evaluate,
    normalize,
    preprocess,
    simulate,
    uncertainty,
    weighted_bce_loss,
)

__all__ = [
    "AltcError",
    "TextClassifier",
    "class_weights",
    "evaluate",
    "normalize",
    "preprocess",
    "simulate",
    "uncertainty",
    "weighted_bce_loss",
]
