"""
Designing the 8-30 Hz band-pass
===============================

An order-4 Butterworth band-pass (4 poles) covers the mu and beta rhythms.
"""

import numpy as np

from mibci.core import SignalBuffer
from mibci.preprocess import apply_filter, design_bandpass, frequency_response

coeffs = design_bandpass(8, 30, order=4, fs=128)
print("b =", np.round(coeffs.feedforward, 6))
print("a =", np.round(coeffs.feedback, 6))
print("max |pole| =", np.abs(coeffs.poles()).max())

# magnitude response at a few frequencies
freqs = np.array([1, 4, 8, np.sqrt(8 * 30), 30, 45, 60])
db = 20 * np.log10(np.abs(frequency_response(coeffs, freqs)))
for f, g in zip(freqs, db):
    print(f"{f:6.2f} Hz  {g:7.2f} dB")

# a 2 Hz drift plus a 15 Hz rhythm: the filter keeps the rhythm
fs = 128
t = np.arange(10 * fs) / fs
x = np.sin(2 * np.pi * 2 * t) + 0.5 * np.sin(2 * np.pi * 15 * t)
y = apply_filter(coeffs, SignalBuffer(fs, ["x"], x[None, :])).samples

# amplitudes after the start-up transient, by least squares
tail = slice(2 * fs, None)
basis = np.column_stack([np.sin(2 * np.pi * f * t[tail]) for f in (2, 15)] +
                        [np.cos(2 * np.pi * f * t[tail]) for f in (2, 15)])
coef, *_ = np.linalg.lstsq(basis, y[0, tail], rcond=None)
amp = np.hypot(coef[:2], coef[2:])
print(f"2 Hz amplitude 1.0 -> {amp[0]:.3f}, 15 Hz amplitude 0.5 -> {amp[1]:.3f}")
