"""Common spatial patterns for two-class motor imagery."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ClassLabel, CspModel
from .errors import ComputationError, ValidationError
from .linalg import jacobi_eigh, normalize_signs

__all__ = ["SpatialCovariance", "CspModel", "normalized_covariance", "average_covariance",
           "composite_eigendecomposition", "train_csp", "apply_csp"]

RIDGE = 1e-9
# whitening drops composite eigenvalues below this fraction of the largest
RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SpatialCovariance:
    matrix: np.ndarray
    trial_count: int = 1


def normalized_covariance(trial):
    """Trace-normalized spatial covariance ``X X^T / trace(X X^T)``."""
    x = np.asarray(trial, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise ValidationError("DIM_MISMATCH", f"trial must be N x S with S >= 2, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("INVALID_ARG", "trial has non-finite samples")
    c = x @ x.T
    c = 0.5 * (c + c.T)
    tr = np.trace(c)
    if tr <= 1e-30:
        raise ComputationError("ZERO_SIGNAL", "trial has no energy")
    return SpatialCovariance(c / tr, 1)


def average_covariance(epochs, label):
    """Mean of the normalized covariances of all epochs carrying ``label``."""
    label = ClassLabel(label)
    trials = [e.data for e in epochs if e.label == label]
    if len(trials) < 2:
        raise ComputationError("TOO_FEW_TRIALS", f"{len(trials)} {label.name} epochs, need at least 2")
    covs = np.stack([normalized_covariance(t).matrix for t in trials])
    return SpatialCovariance(covs.mean(axis=0), len(trials))


def composite_eigendecomposition(anc_l, anc_r):
    """Eigendecompose the composite covariance ``anc_l + anc_r``.

    Returns ``(m0, sigma)`` with orthonormal eigenvector columns ``m0`` and
    descending eigenvalues ``sigma``.
    """
    a = getattr(anc_l, "matrix", anc_l)
    b = getattr(anc_r, "matrix", anc_r)
    if np.shape(a) != np.shape(b):
        raise ValidationError("DIM_MISMATCH", f"covariance shapes differ: {np.shape(a)} vs {np.shape(b)}")
    sigma, m0 = jacobi_eigh(np.asarray(a) + np.asarray(b))
    return m0, sigma


def _check_epochs(epochs):
    if not epochs:
        raise ComputationError("TOO_FEW_TRIALS", "no epochs")
    shapes = {np.shape(e.data) for e in epochs}
    if len(shapes) != 1:
        raise ValidationError("DIM_MISMATCH", f"epochs differ in shape: {sorted(shapes)}")
    return shapes.pop()


def train_csp(epochs, n_pairs=2, channel_names=None, ridge=RIDGE):
    """Fit ``2 * n_pairs`` spatial filters.

    The class-averaged covariances are ridged, the composite covariance is
    whitened, and the whitened LEFT covariance is diagonalized; filters with
    the ``n_pairs`` largest and ``n_pairs`` smallest LEFT variance are kept.
    """
    n_channels, _ = _check_epochs(epochs)
    if n_pairs < 1 or 2 * n_pairs > n_channels:
        raise ValidationError("DIM_MISMATCH", f"2 x {n_pairs} filters requested from {n_channels} channels")
    if channel_names is None:
        channel_names = tuple(f"ch{i + 1}" for i in range(n_channels))
    if len(channel_names) != n_channels:
        raise ValidationError("DIM_MISMATCH", "channel name count does not match epochs")

    eye = np.eye(n_channels)
    anc_l = average_covariance(epochs, ClassLabel.LEFT).matrix
    anc_r = average_covariance(epochs, ClassLabel.RIGHT).matrix
    anc_l = anc_l + ridge * np.trace(anc_l) / n_channels * eye
    anc_r = anc_r + ridge * np.trace(anc_r) / n_channels * eye

    m0, sigma = composite_eigendecomposition(anc_l, anc_r)
    keep = sigma >= RANK_TOL * sigma[0]
    if keep.sum() < 2 * n_pairs:
        raise ComputationError(
            "RANK_DEFICIENT", f"{keep.sum()} usable dimensions, need {2 * n_pairs}")
    whiten = (m0[:, keep] / np.sqrt(sigma[keep])).T

    s_left = whiten @ anc_l @ whiten.T
    lam, u = jacobi_eigh(s_left)
    filters = u.T @ whiten
    # lam is descending: head = most LEFT variance, tail reversed = most RIGHT
    pick = np.r_[np.arange(n_pairs), np.arange(len(lam) - 1, len(lam) - 1 - n_pairs, -1)]
    projection = normalize_signs(filters[pick], axis=1)
    eigenvalues = np.clip(lam[pick], 0.0, 1.0)
    return CspModel(projection, eigenvalues, tuple(channel_names), ridge)


def apply_csp(model, epoch_data):
    x = np.asarray(epoch_data, dtype=float)
    if x.ndim != 2 or x.shape[0] != model.n_channels:
        raise ValidationError(
            "DIM_MISMATCH", f"model expects {model.n_channels} channels, got shape {x.shape}")
    return model.projection @ x
