"""Log-variance features and a two-class LDA."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ClassLabel, LdaModel
from .errors import ComputationError, ValidationError

__all__ = ["FeatureVector", "LdaModel", "log_variance_features", "train_lda", "lda_score",
           "classify", "label_for_score"]

VAR_FLOOR = 1e-30
SHRINKAGE = 1e-6
SCALE_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    label: ClassLabel | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise ValidationError("INVALID_ARG", "non-finite feature")
        object.__setattr__(self, "values", v)


def log_variance_features(projected, label=None):
    """``log(var_j / sum_k var_k)`` for each row of a CSP-projected epoch.

    Zero-variance rows are floored at ``VAR_FLOOR`` before the log.
    """
    x = np.asarray(projected, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ValidationError("DIM_MISMATCH", f"need a 2-D block with >= 2 samples, got {x.shape}")
    var = np.var(x, axis=1, ddof=1)
    total = var.sum()
    if not total > 0:
        raise ComputationError("DEGENERATE_EPOCH", "projected epoch has zero variance")
    return FeatureVector(np.log(np.maximum(var, VAR_FLOOR) / total), label)


def _as_matrix(features):
    x = np.array([f.values for f in features])
    y = np.array([int(f.label) for f in features])
    return x, y


def train_lda(features):
    """Fit the hyperplane from labeled feature vectors.

    The pooled within-class covariance gets a ``SHRINKAGE * mean-diagonal``
    ridge; ``score_scale`` is the (population) std of the training scores.
    """
    if any(f.label is None for f in features):
        raise ValidationError("INVALID_ARG", "all training features need a label")
    if len({f.values.size for f in features}) > 1:
        raise ValidationError("DIM_MISMATCH", "features differ in length")
    x, y = _as_matrix(features)
    neg, pos = x[y == ClassLabel.LEFT], x[y == ClassLabel.RIGHT]
    if len(neg) < 2 or len(pos) < 2:
        raise ComputationError(
            "TOO_FEW_SAMPLES", f"{len(neg)} LEFT / {len(pos)} RIGHT samples, need 2 of each")
    d = x.shape[1]
    mu_neg, mu_pos = neg.mean(axis=0), pos.mean(axis=0)
    pooled = ((len(neg) - 1) * np.cov(neg, rowvar=False).reshape(d, d)
              + (len(pos) - 1) * np.cov(pos, rowvar=False).reshape(d, d)) / (len(neg) + len(pos) - 2)
    pooled = pooled + SHRINKAGE * np.trace(pooled) / d * np.eye(d)
    try:
        weights = np.linalg.solve(pooled, mu_pos - mu_neg)
    except np.linalg.LinAlgError:
        raise ComputationError("SINGULAR", "pooled covariance is singular") from None
    if not np.all(np.isfinite(weights)) or not np.any(weights):
        raise ComputationError("SINGULAR", "degenerate discriminant direction")
    bias = -weights @ (mu_pos + mu_neg) / 2
    scores = x @ weights + bias
    return LdaModel(weights, bias, max(float(np.std(scores)), SCALE_FLOOR))


def _values(model, f):
    v = getattr(f, "values", f)
    v = np.asarray(v, dtype=float).ravel()
    if v.size != model.weights.size:
        raise ValidationError("DIM_MISMATCH", f"model has {model.weights.size} weights, feature has {v.size}")
    return v


def lda_score(model, f):
    return float(model.weights @ _values(model, f) + model.bias)


def label_for_score(score):
    """RIGHT for positive scores, LEFT otherwise (zero ties to LEFT)."""
    return ClassLabel.RIGHT if score > 0 else ClassLabel.LEFT


def classify(model, f):
    return label_for_score(lda_score(model, f))
