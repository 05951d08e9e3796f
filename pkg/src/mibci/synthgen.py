"""Synthetic cue-paced sessions with known class covariances.

During each cue period the channels are ``chol(C_class) z(t) + noise * w(t)``
with ``z, w`` white Gaussian (SplitMix64 + Box-Muller, see :mod:`mibci.prng`);
outside cue periods the average of the two class covariances is used.  The
result is band-passed with the same causal filter used for training.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .core import (DEFAULT_CHANNELS, Marker, MarkerLabel, MarkerStream, SignalBuffer,
                   read_matrix_rows, seconds_to_samples)
from .errors import BCIError, ValidationError
from .preprocess import apply_filter, design_bandpass
from .prng import SplitMix64

__all__ = ["SessionSpec", "generate_session", "parse_session_spec", "load_session_spec",
           "diag_spec", "CROSS_LEAD_S"]

CROSS_LEAD_S = 1.0
# label shuffling draws from a separate stream so the signal bits don't depend on it
_LABEL_STREAM = 0x5851F42D4C957F2D


def _invalid(msg):
    return ValidationError("INVALID_SPEC", msg)


@dataclass(frozen=True, eq=False)
class SessionSpec:
    cov_left: np.ndarray
    cov_right: np.ndarray
    n_channels: int = 14
    fs: float = 128.0
    n_cues: int = 40
    cue_period_s: float = 4.0
    band: tuple = (8.0, 30.0)
    noise_floor: float = 0.1
    seed: int = 0
    shuffle: bool = False
    epoch_window_s: float = 3.5
    channel_names: tuple | None = None

    def validate(self):
        n = self.n_channels
        for name in ("cov_left", "cov_right"):
            c = np.asarray(getattr(self, name), dtype=float)
            if c.shape != (n, n):
                raise _invalid(f"{name} must be {n} x {n}, got {c.shape}")
            if not np.allclose(c, c.T, rtol=0, atol=1e-12 * max(1.0, np.abs(c).max())):
                raise _invalid(f"{name} is not symmetric")
            try:
                np.linalg.cholesky(c)
            except np.linalg.LinAlgError:
                raise _invalid(f"{name} is not positive definite") from None
        if self.n_cues < 2 or self.n_cues % 2:
            raise _invalid(f"n_cues must be even and >= 2, got {self.n_cues}")
        if not self.fs > 0:
            raise _invalid(f"fs must be positive, got {self.fs}")
        if not self.cue_period_s > max(self.epoch_window_s, CROSS_LEAD_S):
            raise _invalid(f"cue period {self.cue_period_s} s too short for a "
                           f"{self.epoch_window_s} s epoch window")
        if self.noise_floor < 0:
            raise _invalid("noise_floor must be >= 0")
        if self.channel_names is not None and len(self.channel_names) != n:
            raise _invalid("channel_names length does not match n_channels")
        try:
            design_bandpass(self.band[0], self.band[1], 4, self.fs)
        except BCIError as exc:
            raise _invalid(f"band {self.band}: {exc.message}") from None

    def names(self):
        if self.channel_names is not None:
            return tuple(self.channel_names)
        if self.n_channels == len(DEFAULT_CHANNELS):
            return DEFAULT_CHANNELS
        return tuple(f"ch{i + 1}" for i in range(self.n_channels))


def diag_spec(left_diag, right_diag, **kwargs):
    """SessionSpec with diagonal class covariances."""
    left = np.diag(np.asarray(left_diag, dtype=float))
    right = np.diag(np.asarray(right_diag, dtype=float))
    return SessionSpec(left, right, n_channels=len(left), **kwargs)


def _cue_labels(spec):
    labels = [MarkerLabel.LEFT_CUE if i % 2 == 0 else MarkerLabel.RIGHT_CUE for i in range(spec.n_cues)]
    if spec.shuffle:
        labels = SplitMix64(spec.seed ^ _LABEL_STREAM).shuffle(labels)
    return labels


def generate_session(spec):
    """Return ``(SignalBuffer, MarkerStream)`` for ``spec``.

    Markers: SESSION_START at 0; cue ``i`` at ``(i + 1) * cue_period_s``,
    preceded by a CROSS one second earlier.  The recording lasts
    ``(n_cues + 1) * cue_period_s``.
    """
    spec.validate()
    n, fs = spec.n_channels, float(spec.fs)
    n_samples = seconds_to_samples((spec.n_cues + 1) * spec.cue_period_s, fs)
    labels = _cue_labels(spec)

    markers = [Marker.of(0.0, MarkerLabel.SESSION_START)]
    cov_l = np.asarray(spec.cov_left, dtype=float)
    cov_r = np.asarray(spec.cov_right, dtype=float)
    chol = {
        None: np.linalg.cholesky(0.5 * (cov_l + cov_r)),
        MarkerLabel.LEFT_CUE: np.linalg.cholesky(cov_l),
        MarkerLabel.RIGHT_CUE: np.linalg.cholesky(cov_r),
    }
    segments = []
    for i, label in enumerate(labels):
        t = (i + 1) * spec.cue_period_s
        markers.append(Marker.of(t - CROSS_LEAD_S, MarkerLabel.CROSS))
        markers.append(Marker.of(t, label))
        segments.append((seconds_to_samples(t, fs),
                         min(seconds_to_samples(t + spec.cue_period_s, fs), n_samples), label))

    rng = SplitMix64(spec.seed)
    z = rng.normal(n * n_samples).reshape(n_samples, n).T
    w = rng.normal(n * n_samples).reshape(n_samples, n).T
    x = chol[None] @ z
    for i0, i1, label in segments:
        x[:, i0:i1] = chol[label] @ z[:, i0:i1]
    x += spec.noise_floor * w

    raw = SignalBuffer(fs, spec.names(), x)
    filtered = apply_filter(design_bandpass(spec.band[0], spec.band[1], 4, fs), raw)
    return filtered, MarkerStream(markers)


# --------------------------------------------------------------------------
# key=value spec files

def _parse_cov(value, n, base):
    kind, _, body = value.partition(":")
    kind = kind.strip()
    if kind == "diag":
        try:
            d = [float(v) for v in body.split(",") if v.strip()]
        except ValueError:
            raise _invalid(f"bad diagonal {body!r}") from None
        if len(d) != n:
            raise _invalid(f"diagonal has {len(d)} entries, n_channels={n}")
        return np.diag(d)
    if kind == "file":
        path = Path(body.strip())
        if not path.is_absolute():
            path = base / path
        try:
            return read_matrix_rows(path)
        except OSError as exc:
            raise _invalid(f"cannot read covariance file {path}: {exc}") from None
        except BCIError as exc:
            raise _invalid(exc.message) from None
    raise _invalid(f"covariance must be 'diag:...' or 'file:<path>', got {value!r}")


_CASTS = {
    "n_channels": int, "n_cues": int, "seed": int,
    "fs": float, "cue_period_s": float, "noise_floor": float, "epoch_window_s": float,
}


def parse_session_spec(text, base_dir=".", seed=None):
    """Parse ``key=value`` lines (``#`` comments allowed) into a SessionSpec."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise _invalid(f"line {lineno}: expected key=value")
        raw[key.strip()] = value.strip()
    known = set(_CASTS) | {"cov_left", "cov_right", "band", "shuffle", "channel_names"}
    unknown = set(raw) - known
    if unknown:
        raise _invalid(f"unknown keys: {', '.join(sorted(unknown))}")
    kwargs = {}
    try:
        for key, cast in _CASTS.items():
            if key in raw:
                kwargs[key] = cast(raw[key])
        if "band" in raw:
            lo, hi = (float(v) for v in raw["band"].split(","))
            kwargs["band"] = (lo, hi)
    except ValueError as exc:
        raise _invalid(str(exc)) from None
    if "shuffle" in raw:
        kwargs["shuffle"] = raw["shuffle"].lower() in ("1", "true", "yes", "on")
    if "channel_names" in raw:
        kwargs["channel_names"] = tuple(c.strip() for c in raw["channel_names"].split(","))
    for key in ("cov_left", "cov_right"):
        if key not in raw:
            raise _invalid(f"missing {key}")
    n = kwargs.get("n_channels", 14)
    base = Path(base_dir)
    spec = SessionSpec(_parse_cov(raw["cov_left"], n, base), _parse_cov(raw["cov_right"], n, base), **kwargs)
    if seed is not None:
        spec = replace(spec, seed=int(seed))
    spec.validate()
    return spec


def load_session_spec(path, seed=None):
    path = Path(path)
    return parse_session_spec(path.read_text(), path.parent, seed)
