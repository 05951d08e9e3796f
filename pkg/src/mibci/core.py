"""Shared domain types and the text file formats.

Signals, markers and trained models are all stored as plain text.  Floats are
written with 17 significant digits so that every write/read pair round-trips
exactly.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError

__all__ = [
    "DEFAULT_CHANNELS", "DEFAULT_FS", "ClassLabel", "MarkerLabel", "MARKER_CODES",
    "Marker", "MarkerStream", "SignalBuffer", "Epoch", "CspModel", "LdaModel",
    "seconds_to_samples", "slice_window",
    "read_signal_csv", "write_signal_csv", "read_markers_csv", "write_markers_csv",
    "save_model", "load_model", "read_matrix_rows",
]

DEFAULT_FS = 128.0
# 14-electrode consumer headset montage
DEFAULT_CHANNELS = (
    "AF3", "F7", "F3", "FC5", "T7", "P7", "O1",
    "O2", "P8", "T8", "FC6", "F4", "F8", "AF4",
)

_TIME_TOL = 1e-6


def _fmt(x):
    return format(float(x), ".17g")


class ClassLabel(enum.IntEnum):
    """Two-class motor imagery label with the signed encoding used by the LDA."""

    LEFT = -1
    RIGHT = 1

    @property
    def short(self):
        return "L" if self is ClassLabel.LEFT else "R"


class MarkerLabel(enum.Enum):
    SESSION_START = "SESSION_START"
    LEFT_CUE = "LEFT_CUE"
    RIGHT_CUE = "RIGHT_CUE"
    CROSS = "CROSS"


# GDF-style stimulation codes
MARKER_CODES = {
    MarkerLabel.SESSION_START: 768,
    MarkerLabel.LEFT_CUE: 769,
    MarkerLabel.RIGHT_CUE: 770,
    MarkerLabel.CROSS: 786,
}
_LABEL_BY_CODE = {code: label for label, code in MARKER_CODES.items()}

CUE_CLASSES = {
    MarkerLabel.LEFT_CUE: ClassLabel.LEFT,
    MarkerLabel.RIGHT_CUE: ClassLabel.RIGHT,
}


@dataclass(frozen=True, order=True)
class Marker:
    time_s: float
    code: int
    label: MarkerLabel = field(compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.time_s) and self.time_s >= 0):
            raise ValidationError("INVALID_ARG", f"marker time must be finite and >= 0, got {self.time_s}")
        if MARKER_CODES.get(self.label) != self.code:
            raise ValidationError("PARSE_ERROR", f"code {self.code} does not match label {self.label.value}")

    @classmethod
    def of(cls, time_s, label):
        label = MarkerLabel(label)
        return cls(float(time_s), MARKER_CODES[label], label)


class MarkerStream(tuple):
    """Immutable sequence of markers, sorted by time then code."""

    def __new__(cls, markers=()):
        return super().__new__(cls, sorted(markers))

    def cues(self):
        return [m for m in self if m.label in CUE_CLASSES]

    def __repr__(self):
        return f"MarkerStream({len(self)} markers)"


@dataclass(frozen=True, eq=False)
class SignalBuffer:
    """Channels x samples block of microvolt readings."""

    sample_rate_hz: float
    channel_names: tuple
    samples: np.ndarray

    def __post_init__(self):
        fs = float(self.sample_rate_hz)
        if not (math.isfinite(fs) and fs > 0):
            raise ValidationError("INVALID_ARG", f"sample rate must be positive and finite, got {fs}")
        names = tuple(str(c) for c in self.channel_names)
        data = np.array(self.samples, dtype=float, copy=True)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ValidationError("DIM_MISMATCH", f"samples must be a non-empty 2-D array, got shape {data.shape}")
        if len(names) != data.shape[0]:
            raise ValidationError("DIM_MISMATCH", f"{len(names)} channel names for {data.shape[0]} rows")
        if len(set(names)) != len(names):
            raise ValidationError("INVALID_ARG", "duplicate channel names")
        if not np.all(np.isfinite(data)):
            raise ValidationError("INVALID_ARG", "non-finite samples")
        data.flags.writeable = False
        object.__setattr__(self, "sample_rate_hz", fs)
        object.__setattr__(self, "channel_names", names)
        object.__setattr__(self, "samples", data)

    @property
    def n_channels(self):
        return self.samples.shape[0]

    @property
    def n_samples(self):
        return self.samples.shape[1]

    @property
    def duration_s(self):
        return self.n_samples / self.sample_rate_hz

    def with_samples(self, samples):
        return SignalBuffer(self.sample_rate_hz, self.channel_names, samples)


@dataclass(frozen=True, eq=False)
class Epoch:
    label: ClassLabel
    data: np.ndarray
    onset_s: float


def seconds_to_samples(t, fs):
    """Round-to-nearest sample index for time ``t`` (seconds)."""
    return int(round(t * fs))


def slice_window(buffer, start_s, length_s):
    """Copy of the ``length_s`` second block starting at ``start_s``."""
    if not length_s > 0:
        raise ValidationError("INVALID_ARG", f"window length must be positive, got {length_s}")
    if start_s < 0:
        raise ValidationError("OUT_OF_RANGE", f"negative window start {start_s}")
    fs = buffer.sample_rate_hz
    i0 = seconds_to_samples(start_s, fs)
    w = seconds_to_samples(length_s, fs)
    if w < 1:
        raise ValidationError("INVALID_ARG", f"window of {length_s} s is shorter than one sample")
    if i0 + w > buffer.n_samples:
        raise ValidationError(
            "OUT_OF_RANGE", f"window [{i0}, {i0 + w}) exceeds buffer of {buffer.n_samples} samples")
    return buffer.samples[:, i0:i0 + w].copy()


# --------------------------------------------------------------------------
# signal / marker CSV

def write_signal_csv(buffer, path):
    fs = buffer.sample_rate_hz
    with open(path, "w", newline="") as fh:
        fh.write(",".join(("time",) + buffer.channel_names) + "\n")
        for i, column in enumerate(buffer.samples.T):
            fh.write(_fmt(i / fs) + "," + ",".join(_fmt(v) for v in column) + "\n")


def read_signal_csv(path, sample_rate_hz=None):
    """Read a signal CSV.

    The sample rate is recovered from the time column unless
    ``sample_rate_hz`` is given (required for single-row files).  The first
    time stamp must be 0.
    """
    times, rows = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError("PARSE_ERROR", f"{path}: line 1: empty file") from None
        header = [h.strip() for h in header]
        if len(header) < 2 or header[0] != "time":
            raise ValidationError("PARSE_ERROR", f"{path}: line 1: header must be 'time,<ch1>,...'")
        for lineno, fields in enumerate(reader, start=2):
            if not fields:
                continue
            if len(fields) != len(header):
                raise ValidationError(
                    "NONUNIFORM_ROW",
                    f"{path}: line {lineno}: {len(fields)} fields, header has {len(header)}")
            try:
                values = [float(v) for v in fields]
            except ValueError as exc:
                raise ValidationError("PARSE_ERROR", f"{path}: line {lineno}: {exc}") from None
            if not all(math.isfinite(v) for v in values):
                raise ValidationError("PARSE_ERROR", f"{path}: line {lineno}: non-finite value")
            times.append(values[0])
            rows.append(values[1:])
    if not rows:
        raise ValidationError("PARSE_ERROR", f"{path}: no samples")
    t = np.asarray(times)
    if abs(t[0]) > _TIME_TOL:
        raise ValidationError("PARSE_ERROR", f"{path}: line 2: first time stamp must be 0, got {t[0]}")
    if sample_rate_hz is None:
        if len(t) < 2:
            raise ValidationError("PARSE_ERROR", f"{path}: sample rate cannot be inferred from one row")
        fs = (len(t) - 1) / (t[-1] - t[0]) if t[-1] > t[0] else float("nan")
        if not (math.isfinite(fs) and fs > 0):
            raise ValidationError("PARSE_ERROR", f"{path}: time column is not increasing")
        if abs(fs - round(fs)) < 1e-6 * fs:
            fs = float(round(fs))
    else:
        fs = float(sample_rate_hz)
    expected = np.arange(len(t)) / fs
    bad = np.flatnonzero(np.abs(t - expected) > _TIME_TOL)
    if bad.size:
        raise ValidationError(
            "PARSE_ERROR", f"{path}: line {bad[0] + 2}: time {t[bad[0]]} off the uniform 1/{fs} s grid")
    return SignalBuffer(fs, header[1:], np.asarray(rows).T)


def write_markers_csv(stream, path):
    with open(path, "w", newline="") as fh:
        fh.write("time,code,label\n")
        for m in MarkerStream(stream):
            fh.write(f"{_fmt(m.time_s)},{m.code},{m.label.value}\n")


def read_markers_csv(path):
    markers = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValidationError("PARSE_ERROR", f"{path}: line 1: empty file") from None
        if header != ["time", "code", "label"]:
            raise ValidationError("PARSE_ERROR", f"{path}: line 1: header must be 'time,code,label'")
        for lineno, fields in enumerate(reader, start=2):
            if not fields:
                continue
            if len(fields) != 3:
                raise ValidationError("NONUNIFORM_ROW", f"{path}: line {lineno}: expected 3 fields")
            try:
                t, code, label = float(fields[0]), int(fields[1]), MarkerLabel(fields[2].strip())
            except ValueError as exc:
                raise ValidationError("PARSE_ERROR", f"{path}: line {lineno}: {exc}") from None
            try:
                markers.append(Marker(t, code, label))
            except ValidationError as exc:
                raise ValidationError("PARSE_ERROR", f"{path}: line {lineno}: {exc.message}") from None
    return MarkerStream(markers)


# --------------------------------------------------------------------------
# trained models

@dataclass(frozen=True, eq=False)
class CspModel:
    """Spatial filters, one per row: ``n_pairs`` LEFT-variance maximizing rows
    followed by ``n_pairs`` RIGHT-variance maximizing rows."""

    projection: np.ndarray
    eigenvalues: np.ndarray
    channel_names: tuple
    ridge: float = 1e-9

    def __post_init__(self):
        p = np.array(self.projection, dtype=float)
        lam = np.array(self.eigenvalues, dtype=float).ravel()
        names = tuple(self.channel_names)
        if p.ndim != 2 or p.shape[0] % 2 or p.shape[0] < 2 or p.shape[0] > p.shape[1]:
            raise ValidationError("DIM_MISMATCH", f"projection must be 2J x N with 2J <= N, got {p.shape}")
        if lam.shape != (p.shape[0],) or len(names) != p.shape[1]:
            raise ValidationError("DIM_MISMATCH", "eigenvalue / channel count does not match projection")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(lam))):
            raise ValidationError("INVALID_ARG", "non-finite model entries")
        if np.any(lam < -1e-9) or np.any(lam > 1 + 1e-9):
            raise ValidationError("INVALID_ARG", "eigenvalues must lie in [0, 1]")
        p.flags.writeable = False
        lam.flags.writeable = False
        object.__setattr__(self, "projection", p)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "channel_names", names)
        object.__setattr__(self, "ridge", float(self.ridge))

    @property
    def n_pairs(self):
        return self.projection.shape[0] // 2

    @property
    def n_channels(self):
        return self.projection.shape[1]


@dataclass(frozen=True, eq=False)
class LdaModel:
    """Hyperplane ``weights . f + bias``; positive scores mean RIGHT."""

    weights: np.ndarray
    bias: float
    score_scale: float

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        if w.size == 0 or not np.all(np.isfinite(w)) or not np.any(w):
            raise ValidationError("INVALID_ARG", "weights must be finite and not all zero")
        if not math.isfinite(self.bias):
            raise ValidationError("INVALID_ARG", "bias must be finite")
        if not (math.isfinite(self.score_scale) and self.score_scale > 0):
            raise ValidationError("INVALID_ARG", "score_scale must be positive")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))
        object.__setattr__(self, "score_scale", float(self.score_scale))


def _row(values):
    return " ".join(_fmt(v) for v in values)


def save_model(model, path):
    if isinstance(model, CspModel):
        lines = ["CSPMODEL v1", f"{model.projection.shape[0]} {model.projection.shape[1]}"]
        lines += [_row(r) for r in model.projection]
        lines += [
            "eigenvalues " + _row(model.eigenvalues),
            "channels " + " ".join(model.channel_names),
            "ridge " + _fmt(model.ridge),
        ]
    elif isinstance(model, LdaModel):
        lines = ["LDAMODEL v1", f"1 {model.weights.size}", _row(model.weights),
                 "bias " + _fmt(model.bias), "scale " + _fmt(model.score_scale)]
    else:
        raise TypeError(f"cannot save {type(model).__name__}")
    Path(path).write_text("\n".join(lines) + "\n")


def _floats(tokens, path, lineno):
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise ValidationError("PARSE_ERROR", f"{path}: line {lineno}: {exc}") from None


def _keyed(lines, i, key, path):
    if i >= len(lines):
        raise ValidationError("PARSE_ERROR", f"{path}: truncated, missing '{key}' line")
    tokens = lines[i].split()
    if not tokens or tokens[0] != key:
        raise ValidationError("PARSE_ERROR", f"{path}: line {i + 1}: expected '{key}'")
    return tokens[1:]


def load_model(path):
    """Load a ``CSPMODEL v1`` or ``LDAMODEL v1`` file."""
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValidationError("PARSE_ERROR", f"{path}: empty model file")
    header = lines[0].strip()
    if header not in ("CSPMODEL v1", "LDAMODEL v1"):
        raise ValidationError("VERSION_MISMATCH", f"{path}: unknown header {header!r}")
    if len(lines) < 2:
        raise ValidationError("PARSE_ERROR", f"{path}: truncated, missing dimensions")
    try:
        rows, cols = (int(t) for t in lines[1].split())
    except ValueError:
        raise ValidationError("PARSE_ERROR", f"{path}: line 2: expected '<rows> <cols>'") from None
    if rows < 1 or cols < 1:
        raise ValidationError("DIM_MISMATCH", f"{path}: line 2: bad dimensions {rows} {cols}")
    if len(lines) < 2 + rows:
        raise ValidationError("PARSE_ERROR", f"{path}: truncated matrix")
    matrix = []
    for i in range(2, 2 + rows):
        vals = _floats(lines[i].split(), path, i + 1)
        if len(vals) != cols:
            raise ValidationError("DIM_MISMATCH", f"{path}: line {i + 1}: {len(vals)} values, declared {cols}")
        matrix.append(vals)
    i = 2 + rows
    if header == "CSPMODEL v1":
        lam = _floats(_keyed(lines, i, "eigenvalues", path), path, i + 1)
        names = _keyed(lines, i + 1, "channels", path)
        ridge = _floats(_keyed(lines, i + 2, "ridge", path), path, i + 3)
        if len(lam) != rows or len(names) != cols or len(ridge) != 1:
            raise ValidationError("DIM_MISMATCH", f"{path}: trailer does not match declared dimensions")
        return CspModel(np.array(matrix), np.array(lam), tuple(names), ridge[0])
    if rows != 1:
        raise ValidationError("DIM_MISMATCH", f"{path}: LDA weights must be a single row")
    bias = _floats(_keyed(lines, i, "bias", path), path, i + 1)
    scale = _floats(_keyed(lines, i + 1, "scale", path), path, i + 2)
    if len(bias) != 1 or len(scale) != 1:
        raise ValidationError("PARSE_ERROR", f"{path}: malformed bias/scale lines")
    return LdaModel(np.array(matrix[0]), bias[0], scale[0])


def read_matrix_rows(path):
    """Whitespace-separated numeric rows (the model-file row format)."""
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if line.strip():
            rows.append(_floats(line.split(), path, lineno))
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValidationError("PARSE_ERROR", f"{path}: expected a non-empty rectangular matrix")
    return np.array(rows)
