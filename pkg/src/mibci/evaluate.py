"""Confusion matrices, accuracy, stratified cross-validation and reports."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .core import ClassLabel
from .errors import ComputationError, ValidationError
from .pipeline import feedback_strength, score_block, sliding_blocks, train_models

__all__ = ["ConfusionMatrix", "WindowRecord", "OfflineEvaluation", "confusion", "accuracy",
           "format_percent", "feedback_strength", "stratified_folds", "evaluate_offline",
           "write_report", "write_window_csv"]

_ROW = {ClassLabel.LEFT: 0, ClassLabel.RIGHT: 1}


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Rows are true classes (LEFT, RIGHT), columns predicted classes."""

    counts: np.ndarray

    @property
    def total(self):
        return int(self.counts.sum())

    def class_accuracy(self, label):
        row = self.counts[_ROW[ClassLabel(label)]]
        return 100.0 * row[_ROW[ClassLabel(label)]] / row.sum() if row.sum() else float("nan")

    def __add__(self, other):
        return ConfusionMatrix(self.counts + other.counts)

    def __eq__(self, other):
        return isinstance(other, ConfusionMatrix) and np.array_equal(self.counts, other.counts)

    def tolist(self):
        return self.counts.tolist()


def confusion(targets, predictions):
    targets, predictions = list(targets), list(predictions)
    if len(targets) != len(predictions):
        raise ValidationError("LENGTH_MISMATCH", f"{len(targets)} targets vs {len(predictions)} predictions")
    if not targets:
        raise ValidationError("EMPTY", "nothing to tally")
    counts = np.zeros((2, 2), dtype=np.int64)
    for t, p in zip(targets, predictions):
        counts[_ROW[ClassLabel(t)], _ROW[ClassLabel(p)]] += 1
    return ConfusionMatrix(counts)


def accuracy(cm):
    """Percentage of correct decisions, ``100 * trace / total``."""
    if cm.total == 0:
        raise ValidationError("EMPTY", "empty confusion matrix")
    return 100.0 * int(np.trace(cm.counts)) / cm.total


def format_percent(value):
    return f"{value:.2f}"


@dataclass(frozen=True)
class WindowRecord:
    time_s: float
    target: ClassLabel
    prediction: ClassLabel
    score: float
    feedback: float


@dataclass
class OfflineEvaluation:
    """Held-out results of :func:`evaluate_offline`.

    ``confusion``/``accuracy`` score whole epochs (one decision per cue);
    ``window_confusion``/``window_accuracy`` score the sliding windows inside
    each held-out epoch.  ``folds`` lists ``(train_idx, test_idx)`` pairs.
    """

    confusion: ConfusionMatrix
    accuracy: float
    window_confusion: ConfusionMatrix
    window_accuracy: float
    windows: list = field(default_factory=list)
    folds: list = field(default_factory=list)

    def __iter__(self):
        # allows ``cm, acc = evaluate_offline(...)``
        return iter((self.confusion, self.accuracy))


def stratified_folds(labels, k, seed=None):
    """Assign each index to one of ``k`` folds, round-robin within each class.

    With ``seed`` the within-class order is shuffled first (NumPy PCG64).
    Returns a list of ``(train_idx, test_idx)`` arrays.
    """
    labels = np.asarray([int(x) for x in labels])
    fold_of = np.empty(len(labels), dtype=int)
    rng = np.random.default_rng(seed) if seed is not None else None
    for cls in (ClassLabel.LEFT, ClassLabel.RIGHT):
        idx = np.flatnonzero(labels == cls)
        if rng is not None:
            idx = rng.permutation(idx)
        fold_of[idx] = np.arange(len(idx)) % k
    all_idx = np.arange(len(labels))
    return [(all_idx[fold_of != f], all_idx[fold_of == f]) for f in range(k)]


def evaluate_offline(epochs, n_pairs=2, folds=5, channel_names=None, fs=None,
                     window_s=1.0, step_s=0.25, seed=None):
    """Stratified k-fold CSP+LDA evaluation.

    Each fold trains on its training split only and scores the held-out
    epochs, both whole and (when ``fs`` is given) as sliding windows.
    """
    if folds < 2:
        raise ValidationError("INVALID_ARG", f"need at least 2 folds, got {folds}")
    per_class = {c: sum(e.label == c for e in epochs) for c in ClassLabel}
    if min(per_class.values()) < folds:
        raise ComputationError(
            "TOO_FEW_TRIALS", f"{per_class[ClassLabel.LEFT]} LEFT / {per_class[ClassLabel.RIGHT]} RIGHT "
                              f"epochs for {folds} folds")
    splits = stratified_folds([e.label for e in epochs], folds, seed)
    targets, preds, windows = [], [], []
    for train_idx, test_idx in splits:
        csp, lda = train_models([epochs[i] for i in train_idx], n_pairs, channel_names)
        for i in test_idx:
            ep = epochs[i]
            label, _, _ = score_block(csp, lda, ep.data)
            targets.append(ep.label)
            preds.append(label)
            if fs is None:
                continue
            for dt, block in sliding_blocks(ep.data, fs, window_s, step_s):
                label, score, fb = score_block(csp, lda, block)
                windows.append(WindowRecord(ep.onset_s + dt, ep.label, label, score, fb))
    cm = confusion(targets, preds)
    if windows:
        wcm = confusion([w.target for w in windows], [w.prediction for w in windows])
    else:
        wcm = cm
    windows.sort(key=lambda w: w.time_s)
    return OfflineEvaluation(cm, accuracy(cm), wcm, accuracy(wcm), windows, splits)


def _matrix_lines(cm):
    return [
        "               pred LEFT  pred RIGHT",
        f"  true LEFT    {cm.counts[0, 0]:9d}  {cm.counts[0, 1]:10d}",
        f"  true RIGHT   {cm.counts[1, 0]:9d}  {cm.counts[1, 1]:10d}",
    ]


def confusion_block(title, cm):
    lines = [f"{title} (n={cm.total})"] + _matrix_lines(cm)
    for c in ClassLabel:
        lines.append(f"  {c.name} accuracy: {format_percent(cm.class_accuracy(c))}%")
    lines.append(f"  overall accuracy: {format_percent(accuracy(cm))}%")
    return lines


def write_report(path, title, config, sections, extra=()):
    """Plain-text report: title, configuration header, confusion blocks.

    ``sections`` is a list of ``(heading, ConfusionMatrix)``.
    """
    lines = [title, "", "[configuration]"]
    lines += [f"{k} = {v}" for k, v in config.items()]
    for heading, cm in sections:
        lines += [""] + confusion_block(heading, cm)
    if extra:
        lines += [""] + list(extra)
    text = "\n".join(lines) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def write_window_csv(path, records):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["time", "target", "prediction", "score", "feedback"])
        for r in records:
            target = r.target.name if r.target is not None else ""
            out.writerow([format(r.time_s, ".6f"), target, r.prediction.name,
                          format(r.score, ".17g"), format(r.feedback, ".17g")])
