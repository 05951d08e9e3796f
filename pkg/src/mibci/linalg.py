"""Cyclic Jacobi eigensolver for symmetric matrices.

Fixed row-by-row sweep order and a fixed sign/tie rule make the output a
deterministic function of the input bits.
"""
from __future__ import annotations

import numpy as np

from .errors import ComputationError, ValidationError

__all__ = ["jacobi_eigh", "normalize_signs"]

MAX_SWEEPS = 100
REL_TOL = 1e-12


def normalize_signs(vectors, axis=0):
    """Flip each vector so that its largest-magnitude entry is positive.

    ``axis=0`` treats columns as vectors, ``axis=1`` rows.  Ties in magnitude
    go to the lowest index.
    """
    v = np.array(vectors, dtype=float)
    vt = v if axis == 1 else v.T
    idx = np.argmax(np.abs(vt), axis=1)
    signs = np.sign(vt[np.arange(vt.shape[0]), idx])
    signs[signs == 0] = 1.0
    vt *= signs[:, None]
    return v


def _rotate(a, v, p, q):
    apq = a[p, q]
    if apq == 0.0:
        return
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    ap = a[:, p].copy()
    aq = a[:, q].copy()
    a[:, p] = c * ap - s * aq
    a[:, q] = s * ap + c * aq
    rp = a[p, :].copy()
    rq = a[q, :].copy()
    a[p, :] = c * rp - s * rq
    a[q, :] = s * rp + c * rq
    a[p, q] = a[q, p] = 0.0
    vp = v[:, p].copy()
    vq = v[:, q].copy()
    v[:, p] = c * vp - s * vq
    v[:, q] = s * vp + c * vq


def jacobi_eigh(matrix, max_sweeps=MAX_SWEEPS, rel_tol=REL_TOL):
    """Eigen-decomposition of a real symmetric matrix.

    Parameters
    ----------
    matrix : (n, n) array_like
        Symmetric input; only exact symmetry up to rounding is assumed.
    max_sweeps : int
        Iteration budget, in full cyclic sweeps over the upper triangle.
    rel_tol : float
        Converged once the off-diagonal Frobenius norm is below
        ``rel_tol * ||matrix||_F``.

    Returns
    -------
    eigenvalues : (n,) ndarray
        Descending.  Equal eigenvalues are ordered by their eigenvectors,
        lexicographically descending.
    eigenvectors : (n, n) ndarray
        Orthonormal columns; each column's largest-magnitude entry is positive.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError("DIM_MISMATCH", f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("INVALID_ARG", "matrix has non-finite entries")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    threshold = rel_tol * scale
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = np.sqrt(2.0) * np.linalg.norm(a[iu])
        if off <= threshold:
            break
        if sweep == max_sweeps:
            raise ComputationError(
                "NUMERIC_FAILURE", f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off:.3g})")
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q)
    return _sorted_eigenpairs(np.diag(a).copy(), normalize_signs(v), scale)


def _sorted_eigenpairs(values, vectors, scale):
    tie = 1e-12 * max(scale, np.finfo(float).tiny)
    order = list(np.argsort(-values, kind="stable"))
    # within clusters of equal eigenvalues, order by eigenvector (lexicographic, descending)
    out, i = [], 0
    while i < len(order):
        j = i + 1
        while j < len(order) and values[order[i]] - values[order[j]] <= tie:
            j += 1
        cluster = sorted(order[i:j], key=lambda k: tuple(vectors[:, k]), reverse=True)
        out.extend(cluster)
        i = j
    out = np.array(out, dtype=int)
    return values[out], vectors[:, out]
