"""CSP + log-variance + LDA glue shared by offline evaluation and replay."""
from __future__ import annotations

import math

import numpy as np

from .classify import label_for_score, lda_score, log_variance_features, train_lda
from .core import seconds_to_samples
from .csp import apply_csp, train_csp

__all__ = ["train_models", "score_block", "feedback_strength", "sliding_blocks"]


def feedback_strength(model, score):
    """Bounded feedback bar value, ``tanh(score / score_scale)``; negative = LEFT."""
    return math.tanh(score / model.score_scale)


def train_models(epochs, n_pairs=2, channel_names=None):
    csp = train_csp(epochs, n_pairs, channel_names)
    feats = [log_variance_features(apply_csp(csp, e.data), e.label) for e in epochs]
    return csp, train_lda(feats)


def score_block(csp, lda, block):
    """Classify one N x W block; returns ``(label, score, feedback)``."""
    score = lda_score(lda, log_variance_features(apply_csp(csp, block)))
    return label_for_score(score), score, feedback_strength(lda, score)


def sliding_blocks(data, fs, window_s, step_s):
    """Yield ``(offset_s, block)`` for every full window of a N x S array."""
    w = seconds_to_samples(window_s, fs)
    step = seconds_to_samples(step_s, fs)
    if w < 2 or step < 1:
        raise ValueError(f"window ({window_s} s) or step ({step_s} s) too short at {fs} Hz")
    n = np.shape(data)[1]
    for i0 in range(0, n - w + 1, step):
        yield i0 / fs, data[:, i0:i0 + w]
