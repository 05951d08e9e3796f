"""Two-class motor-imagery BCI: CSP + LDA training, evaluation, replay and a
simulated servo hand."""

__version__ = "0.1.0"

from .core import (ClassLabel, CspModel, Epoch, LdaModel, Marker, MarkerLabel, MarkerStream,
                   SignalBuffer, load_model, read_markers_csv, read_signal_csv, save_model,
                   slice_window, write_markers_csv, write_signal_csv)
from .errors import BCIError, ComputationError, SinkDisconnected, ValidationError

__all__ = [
    "ClassLabel", "CspModel", "Epoch", "LdaModel", "Marker", "MarkerLabel", "MarkerStream",
    "SignalBuffer", "load_model", "read_markers_csv", "read_signal_csv", "save_model",
    "slice_window", "write_markers_csv", "write_signal_csv",
    "BCIError", "ComputationError", "SinkDisconnected", "ValidationError",
]
