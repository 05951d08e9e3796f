"""
Cross-validated accuracy
========================

Stratified 5-fold evaluation on a separable session and on a session where
both classes share one covariance (the chance-level control).
"""

from mibci.evaluate import evaluate_offline, format_percent
from mibci.preprocess import extract_epochs
from mibci.synthgen import diag_spec, generate_session

sessions = {
    "separated": diag_spec([4.0, 1.0] + [1.0] * 12, [1.0, 4.0] + [1.0] * 12, seed=7),
    "identical": diag_spec([1.0] * 14, [1.0] * 14, seed=7),
}

for name, spec in sessions.items():
    signal, markers = generate_session(spec)
    epochs, _ = extract_epochs(signal, markers)
    res = evaluate_offline(epochs, n_pairs=2, folds=5, fs=signal.sample_rate_hz)
    print(f"{name}: per-cue {format_percent(res.accuracy)}%, "
          f"per-window {format_percent(res.window_accuracy)}% over {res.window_confusion.total} windows")
    print(res.window_confusion.tolist())
