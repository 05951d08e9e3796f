"""Session replay: sliding-window classification, debouncing, command output.

A producer thread releases windows (paced to wall-clock time or as fast as
possible) into a queue; the consumer classifies them in order and writes
one command byte per debounced decision to a sink.  Decision and command
content never depends on pacing.
"""
from __future__ import annotations

import logging
import queue
import socket
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from .core import CUE_CLASSES, ClassLabel, seconds_to_samples
from .errors import ComputationError, SinkDisconnected, ValidationError
from .evaluate import WindowRecord, accuracy, confusion, confusion_block
from .pipeline import score_block

__all__ = ["DecisionEvent", "CommandEvent", "Debouncer", "stream_windows", "online_classify",
           "decide_command", "CaptureSink", "TcpSink", "TeeSink", "ReplaySummary", "run_replay",
           "OPEN", "CLOSE"]

log = logging.getLogger(__name__)

OPEN, CLOSE = "a", "q"


@dataclass(frozen=True)
class DecisionEvent:
    time_s: float
    label: ClassLabel
    score: float
    feedback: float


@dataclass(frozen=True)
class CommandEvent:
    time_s: float
    byte: str


def stream_windows(buffer, window_s=1.0, step_s=0.25):
    """Windows at ``t = 0, step, 2 step, ...`` while ``t + window <= duration``.

    Returns an iterator of ``(t, N x W array)``; arguments are checked eagerly.
    """
    if not (window_s > 0 and step_s > 0):
        raise ValidationError("INVALID_ARG", "window and step must be positive")
    fs = buffer.sample_rate_hz
    w = seconds_to_samples(window_s, fs)
    step = seconds_to_samples(step_s, fs)
    if w < 2 or step < 1:
        raise ValidationError("INVALID_ARG", f"window/step too short at {fs} Hz")
    if w > buffer.n_samples:
        raise ValidationError(
            "WINDOW_TOO_LONG", f"{window_s} s window longer than the {buffer.duration_s} s recording")
    data = buffer.samples

    def windows():
        for i0 in range(0, buffer.n_samples - w + 1, step):
            yield i0 / fs, data[:, i0:i0 + w]

    return windows()


def online_classify(windows, csp, lda):
    """Classify each ``(t, block)``; returns ``(events, degenerate_count)``."""
    events, degenerate = [], 0
    for t, block in windows:
        try:
            label, score, fb = score_block(csp, lda, block)
        except ComputationError as exc:
            if exc.code != "DEGENERATE_EPOCH":
                raise
            degenerate += 1
            continue
        events.append(DecisionEvent(t, label, score, fb))
    return events, degenerate


class Debouncer:
    """Emit a command once ``k`` consecutive decisions agree, unless it would
    repeat the previously emitted command."""

    def __init__(self, k=3, left_command=OPEN, right_command=CLOSE):
        if k < 1:
            raise ValidationError("INVALID_ARG", f"debounce k must be >= 1, got {k}")
        self.k = k
        self.commands = {ClassLabel.LEFT: left_command, ClassLabel.RIGHT: right_command}
        self.last_label = None
        self.run = 0
        self.last_command = None

    def push(self, event):
        if event.label == self.last_label:
            self.run += 1
        else:
            self.last_label, self.run = event.label, 1
        if self.run >= self.k:
            cmd = self.commands[event.label]
            if cmd != self.last_command:
                self.last_command = cmd
                return CommandEvent(event.time_s, cmd)
        return None


def decide_command(events, debounce_k=3, left_command=OPEN, right_command=CLOSE):
    deb = Debouncer(debounce_k, left_command, right_command)
    return [c for c in (deb.push(e) for e in events) if c is not None]


# --------------------------------------------------------------------------
# sinks: anything with write(bytes) and close()

class CaptureSink:
    """Appends command bytes to a file."""

    def __init__(self, path):
        self.path = path
        self._fh = open(path, "ab")

    def write(self, data):
        try:
            self._fh.write(data)
            self._fh.flush()
        except (OSError, ValueError) as exc:
            raise SinkDisconnected(f"capture file {self.path}: {exc}") from None

    def close(self):
        self._fh.close()


class TcpSink:
    """Raw byte stream to the hand simulator."""

    def __init__(self, host, port, timeout=5.0):
        self.endpoint = f"{host}:{port}"
        try:
            self._sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise SinkDisconnected(f"cannot connect to {self.endpoint}: {exc}") from None

    def write(self, data):
        try:
            self._sock.sendall(data)
        except OSError as exc:
            raise SinkDisconnected(f"{self.endpoint}: {exc}") from None

    def close(self):
        try:
            self._sock.shutdown(socket.SHUT_WR)
        except OSError:
            pass
        self._sock.close()


class TeeSink:
    def __init__(self, *sinks):
        self.sinks = sinks

    def write(self, data):
        for s in self.sinks:
            s.write(data)

    def close(self):
        for s in self.sinks:
            s.close()


# --------------------------------------------------------------------------

@dataclass
class ReplaySummary:
    events: list = field(default_factory=list)
    commands: list = field(default_factory=list)
    windows: list = field(default_factory=list)
    window_confusion: object = None
    cue_confusion: object = None
    degenerate: int = 0
    partial: bool = False
    release_lag_s: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def window_accuracy(self):
        return accuracy(self.window_confusion) if self.window_confusion else float("nan")

    def report_text(self):
        title = "replay report" + (" (PARTIAL: sink disconnected)" if self.partial else "")
        lines = [title, "", "[configuration]"] + [f"{k} = {v}" for k, v in self.config.items()]
        lines += ["", f"windows classified: {len(self.events)}", f"degenerate windows: {self.degenerate}"]
        if self.window_confusion is not None:
            lines += [""] + confusion_block("per-window confusion", self.window_confusion)
        if self.cue_confusion is not None:
            lines += [""] + confusion_block("per-cue confusion (mean window score)", self.cue_confusion)
        lines += ["", f"commands ({len(self.commands)}):"]
        lines += [f"  {c.time_s:.3f} {c.byte}" for c in self.commands]
        return "\n".join(lines) + "\n"


def _scoring_regions(markers, offset_s, length_s):
    return [(m.time_s + offset_s, m.time_s + offset_s + length_s, CUE_CLASSES[m.label])
            for m in markers if m.label in CUE_CLASSES]


def _target_for(t0, t1, regions):
    for i, (r0, r1, label) in enumerate(regions):
        if r0 - 1e-9 <= t0 and t1 <= r1 + 1e-9:
            return i, label
    return None, None


def run_replay(signal, markers, csp, lda, sink, timing="fast", window_s=1.0, step_s=0.25,
               debounce_k=3, score_offset_s=0.5, score_length_s=3.0,
               left_command=OPEN, right_command=CLOSE, queue_size=64):
    """Replay ``signal`` (already band-passed) through the trained models.

    Parameters
    ----------
    timing : {"fast", "realtime"}
        ``realtime`` releases each window once its last sample would have been
        recorded, measured from the start of the replay.
    sink
        Receives one command byte per :class:`CommandEvent`.

    Windows lying wholly inside ``[cue + score_offset_s, cue + score_offset_s
    + score_length_s)`` are scored against that cue's label.

    Raises
    ------
    SinkDisconnected
        With ``.summary`` set to the partial report.
    """
    if timing not in ("fast", "realtime"):
        raise ValidationError("INVALID_ARG", f"timing must be 'fast' or 'realtime', got {timing!r}")
    if signal.n_channels != csp.n_channels or lda.weights.size != csp.projection.shape[0]:
        raise ValidationError("DIM_MISMATCH", "models do not match the signal dimensions")
    windows = stream_windows(signal, window_s, step_s)
    debouncer = Debouncer(debounce_k, left_command, right_command)
    summary = ReplaySummary(config={
        "timing": timing, "window_s": window_s, "step_s": step_s, "debounce_k": debounce_k,
        "score_offset_s": score_offset_s, "score_length_s": score_length_s,
        "left_command": left_command, "right_command": right_command,
        "channels": signal.n_channels, "sample_rate_hz": signal.sample_rate_hz,
        "n_filters": csp.projection.shape[0],
    })
    regions = _scoring_regions(markers, score_offset_s, score_length_s)
    cue_scores = {}

    q = queue.Queue(maxsize=queue_size if timing == "fast" else 0)
    stop = threading.Event()
    done = object()

    def produce():
        start = time.monotonic()
        try:
            for t, block in windows:
                if stop.is_set():
                    break
                if timing == "realtime":
                    due = start + t + window_s
                    delay = due - time.monotonic()
                    if delay > 0:
                        time.sleep(delay)
                    lag = time.monotonic() - due
                else:
                    lag = 0.0
                while not stop.is_set():
                    try:
                        q.put((t, block, lag), timeout=0.1)
                        break
                    except queue.Full:
                        continue
        finally:
            q.put(done)

    producer = threading.Thread(target=produce, name="replay-producer", daemon=True)
    producer.start()
    try:
        while True:
            item = q.get()
            if item is done:
                break
            t, block, lag = item
            summary.release_lag_s.append(lag)
            try:
                label, score, fb = score_block(csp, lda, block)
            except ComputationError as exc:
                if exc.code != "DEGENERATE_EPOCH":
                    raise
                summary.degenerate += 1
                continue
            event = DecisionEvent(t, label, score, fb)
            summary.events.append(event)
            idx, target = _target_for(t, t + window_s, regions)
            summary.windows.append(WindowRecord(t, target, label, score, fb))
            if idx is not None:
                cue_scores.setdefault(idx, []).append(score)
            cmd = debouncer.push(event)
            if cmd is not None:
                summary.commands.append(cmd)
                sink.write(cmd.byte.encode("ascii"))
                log.debug("command %s at %.3f s", cmd.byte, cmd.time_s)
    except SinkDisconnected as exc:
        summary.partial = True
        raise SinkDisconnected(exc.message, summary) from None
    finally:
        stop.set()
        # unblock a producer waiting on a full queue
        while producer.is_alive():
            try:
                q.get(timeout=0.05)
            except queue.Empty:
                pass
        producer.join()
        _finish(summary, regions, cue_scores)
    return summary


def _finish(summary, regions, cue_scores):
    scored = [w for w in summary.windows if w.target is not None]
    if scored:
        summary.window_confusion = confusion([w.target for w in scored], [w.prediction for w in scored])
    if cue_scores:
        idx = sorted(cue_scores)
        preds = [ClassLabel.RIGHT if np.mean(cue_scores[i]) > 0 else ClassLabel.LEFT for i in idx]
        summary.cue_confusion = confusion([regions[i][2] for i in idx], preds)
