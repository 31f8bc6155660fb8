"""Multi-sense compositional sentence models."""

from ._sams import (
    DataError,
    Model,
    UsageError,
    accuracy_f1,
    evaluate_paraphrase,
    evaluate_similarity,
    global_sim,
    grad_check,
    neighbors,
    predict,
    spearman,
    train_generic,
    train_paraphrase,
)

__all__ = [
    "DataError",
    "Model",
    "UsageError",
    "accuracy_f1",
    "evaluate_paraphrase",
    "evaluate_similarity",
    "global_sim",
    "grad_check",
    "neighbors",
    "predict",
    "spearman",
    "train_generic",
    "train_paraphrase",
]
