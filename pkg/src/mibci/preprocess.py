"""Band-pass filtering and cue-locked epoch extraction."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .core import CUE_CLASSES, Epoch, seconds_to_samples
from .errors import ComputationError, ValidationError

__all__ = ["FilterCoefficients", "design_bandpass", "apply_filter", "extract_epochs",
           "frequency_response"]

LEGAL_ORDERS = (2, 4, 6, 8)


@dataclass(frozen=True, eq=False)
class FilterCoefficients:
    feedforward: np.ndarray
    feedback: np.ndarray
    low_hz: float
    high_hz: float
    order: int
    fs: float

    def poles(self):
        return np.roots(self.feedback)


def frequency_response(coeffs, freqs_hz):
    """Complex response H(e^{jw}) at the given frequencies."""
    z = np.exp(-2j * np.pi * np.asarray(freqs_hz, dtype=float) / coeffs.fs)
    num = np.polyval(coeffs.feedforward[::-1], z)
    den = np.polyval(coeffs.feedback[::-1], z)
    return num / den


def design_bandpass(low_hz, high_hz, order=4, fs=128.0):
    """Butterworth band-pass via the pre-warped bilinear transform.

    Parameters
    ----------
    low_hz, high_hz : float
        Pass-band edges (-3 dB), ``0 < low_hz < high_hz < fs / 2``.
    order : int
        Order of the band-pass filter, i.e. the number of poles; the
        low-pass prototype has ``order // 2`` poles.
    fs : float
        Sample rate in Hz.

    Returns
    -------
    FilterCoefficients
        ``feedback[0] == 1``; all poles strictly inside the unit circle.
    """
    if order not in LEGAL_ORDERS:
        raise ValidationError("INVALID_ARG", f"order must be one of {LEGAL_ORDERS}, got {order}")
    if not (fs > 0 and 0 < low_hz < high_hz < fs / 2):
        raise ValidationError("INVALID_BAND", f"need 0 < low < high < fs/2, got {low_hz}, {high_hz}, fs={fs}")
    b, a = signal.butter(order // 2, [low_hz, high_hz], btype="bandpass", fs=fs)
    b = b / a[0]
    a = a / a[0]
    a[0] = 1.0
    coeffs = FilterCoefficients(b, a, float(low_hz), float(high_hz), int(order), float(fs))
    # companion-matrix eigenvalues are the poles
    if not np.all(np.isfinite(a)) or np.max(np.abs(coeffs.poles())) >= 1 - 1e-9:
        raise ComputationError("UNSTABLE", f"band-pass {low_hz}-{high_hz} Hz order {order} is unstable")
    return coeffs


def apply_filter(coeffs, buffer):
    """Causal IIR filtering of every channel, zero initial state."""
    out = signal.lfilter(coeffs.feedforward, coeffs.feedback, buffer.samples, axis=1)
    return buffer.with_samples(out)


def extract_epochs(buffer, markers, offset_s=0.5, length_s=3.0):
    """Cut one labeled epoch per LEFT/RIGHT cue.

    Returns ``(epochs, skipped)`` where ``skipped`` counts cues whose window
    ran past the end of the recording.
    """
    if not length_s > 0:
        raise ValidationError("INVALID_ARG", f"epoch length must be positive, got {length_s}")
    fs = buffer.sample_rate_hz
    w = seconds_to_samples(length_s, fs)
    epochs, skipped = [], 0
    for m in markers:
        label = CUE_CLASSES.get(m.label)
        if label is None:
            continue
        i0 = seconds_to_samples(m.time_s + offset_s, fs)
        if i0 < 0 or i0 + w > buffer.n_samples:
            skipped += 1
            continue
        epochs.append(Epoch(label, buffer.samples[:, i0:i0 + w].copy(), m.time_s + offset_s))
    if not epochs:
        raise ComputationError("EMPTY_RESULT", f"no epochs extracted ({skipped} cues skipped)")
    return epochs, skipped
