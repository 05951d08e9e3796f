"""``mibci`` command line: synth, train, evaluate, replay, hand-sim.

Exit status: 0 success, 2 usage/validation, 3 numeric/training failure,
4 connection failure.  ``BCI_LOG`` (error|info|debug) sets stderr verbosity.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .core import (load_model, read_markers_csv, read_signal_csv, save_model, write_markers_csv,
                   write_signal_csv)
from .errors import BCIError, SinkDisconnected, ValidationError
from .evaluate import confusion, evaluate_offline, format_percent, write_report, write_window_csv
from .handsim import run_server
from .online import CaptureSink, TcpSink, TeeSink, run_replay
from .pipeline import score_block, train_models
from .preprocess import apply_filter, design_bandpass, extract_epochs
from .synthgen import generate_session, load_session_spec

log = logging.getLogger("mibci")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_CONNECT = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _endpoint(text):
    host, sep, port = text.rpartition(":")
    if not sep:
        host = "127.0.0.1"
    try:
        port = int(port)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad port in {text!r}") from None
    return host or "127.0.0.1", port


def _add_filter_flags(p):
    p.add_argument("--band", nargs=2, type=float, default=[8.0, 30.0], metavar=("LOW", "HIGH"),
                   help="band-pass edges in Hz")
    p.add_argument("--order", type=int, default=4, choices=(2, 4, 6, 8), help="band-pass filter order")


def _add_epoch_flags(p):
    p.add_argument("--pairs", type=int, default=2, help="CSP filter pairs J (2J filters)")
    p.add_argument("--window-offset", type=float, default=0.5, help="epoch start after cue onset (s)")
    p.add_argument("--window-length", type=float, default=3.0, help="epoch length (s)")


def build_parser():
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="mibci", description="Motor-imagery CSP+LDA toolkit.", formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic session", formatter_class=fmt)
    p.add_argument("spec", help="key=value session spec file")
    p.add_argument("--signal-out", default="signal.csv", help="signal CSV to write")
    p.add_argument("--markers-out", default="markers.csv", help="marker CSV to write")
    p.add_argument("--seed", type=int, default=None, help="override the seed in the session file")

    p = sub.add_parser("train", help="train CSP + LDA models", formatter_class=fmt)
    p.add_argument("--signal", required=True, help="signal CSV")
    p.add_argument("--markers", required=True, help="marker CSV")
    _add_filter_flags(p)
    _add_epoch_flags(p)
    p.add_argument("--csp-out", default="csp.model", help="CSP model file to write")
    p.add_argument("--lda-out", default="lda.model", help="LDA model file to write")

    p = sub.add_parser("evaluate", help="stratified k-fold offline evaluation", formatter_class=fmt)
    p.add_argument("--signal", required=True, help="signal CSV")
    p.add_argument("--markers", required=True, help="marker CSV")
    _add_filter_flags(p)
    _add_epoch_flags(p)
    p.add_argument("--folds", type=int, default=5, help="number of folds")
    p.add_argument("--window", type=float, default=1.0, help="scoring window length (s)")
    p.add_argument("--step", type=float, default=0.25, help="scoring window step (s)")
    p.add_argument("--fold-seed", type=int, default=None, help="shuffle fold assignment with this seed")
    p.add_argument("--report", default=None, help="text report path (stdout if omitted)")
    p.add_argument("--windows-csv", default=None, help="per-window CSV path")

    p = sub.add_parser("replay", help="replay a session through trained models", formatter_class=fmt)
    p.add_argument("--signal", required=True, help="signal CSV")
    p.add_argument("--markers", required=True, help="marker CSV")
    p.add_argument("--csp", required=True, help="CSP model file")
    p.add_argument("--lda", required=True, help="LDA model file")
    _add_filter_flags(p)
    p.add_argument("--window", type=float, default=1.0, help="window length (s)")
    p.add_argument("--step", type=float, default=0.25, help="window step (s)")
    p.add_argument("--debounce", type=int, default=3, help="agreeing windows required per command")
    p.add_argument("--window-offset", type=float, default=0.5, help="scored region start after cue (s)")
    p.add_argument("--window-length", type=float, default=3.0, help="scored region length (s)")
    p.add_argument("--swap-commands", action="store_true", help="LEFT closes ('q'), RIGHT opens ('a')")
    p.add_argument("--fast", action="store_true", help="no wall-clock pacing")
    p.add_argument("--connect", type=_endpoint, default=None, metavar="HOST:PORT",
                   help="send commands to a hand simulator")
    p.add_argument("--capture", default=None, help="append commands to this file")
    p.add_argument("--report", default=None, help="text report path (stdout if omitted)")
    p.add_argument("--windows-csv", default=None, help="per-window CSV path")

    p = sub.add_parser("hand-sim", help="run the simulated hand", formatter_class=fmt)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--listen", type=_endpoint, default=None, metavar="[HOST:]PORT",
                     help="TCP endpoint to listen on (port 0 picks a free one)")
    src.add_argument("--stdin", action="store_true", help="read command bytes from stdin")
    p.add_argument("--trace", default=None, help="trace file (one line per byte)")
    p.add_argument("--once", action="store_true", help="exit after the first client disconnects")
    return parser


def _config(args):
    return {k: v for k, v in vars(args).items() if k != "func"}


def _validate_common(args):
    if hasattr(args, "band") and not (0 < args.band[0] < args.band[1]):
        raise ValidationError("INVALID_BAND", f"need 0 < low < high, got {args.band}")
    if getattr(args, "pairs", 1) < 1:
        raise ValidationError("INVALID_ARG", "--pairs must be >= 1")
    if getattr(args, "window_length", 1) <= 0:
        raise ValidationError("INVALID_ARG", "--window-length must be positive")
    if getattr(args, "folds", 2) < 2:
        raise ValidationError("INVALID_ARG", "--folds must be >= 2")
    for flag in ("window", "step"):
        if getattr(args, flag, 1) <= 0:
            raise ValidationError("INVALID_ARG", f"--{flag} must be positive")
    if getattr(args, "debounce", 1) < 1:
        raise ValidationError("INVALID_ARG", "--debounce must be >= 1")


def _load_inputs(args):
    try:
        signal = read_signal_csv(args.signal)
        markers = read_markers_csv(args.markers)
    except OSError as exc:
        raise ValidationError("IO_ERROR", str(exc)) from None
    if hasattr(args, "pairs") and 2 * args.pairs > signal.n_channels:
        raise ValidationError("DIM_MISMATCH", f"--pairs {args.pairs} needs >= {2 * args.pairs} channels")
    if args.band[1] >= signal.sample_rate_hz / 2:
        raise ValidationError("INVALID_BAND", f"high edge {args.band[1]} Hz >= Nyquist")
    coeffs = design_bandpass(args.band[0], args.band[1], args.order, signal.sample_rate_hz)
    return apply_filter(coeffs, signal), markers


def cmd_synth(args):
    try:
        spec = load_session_spec(args.spec, seed=args.seed)
    except OSError as exc:
        raise ValidationError("IO_ERROR", str(exc)) from None
    signal, markers = generate_session(spec)
    write_signal_csv(signal, args.signal_out)
    write_markers_csv(markers, args.markers_out)
    log.info("wrote %d x %d samples to %s", signal.n_channels, signal.n_samples, args.signal_out)
    return EXIT_OK


def cmd_train(args):
    signal, markers = _load_inputs(args)
    epochs, skipped = extract_epochs(signal, markers, args.window_offset, args.window_length)
    outputs = [Path(args.csp_out), Path(args.lda_out)]
    try:
        csp, lda = train_models(epochs, args.pairs, signal.channel_names)
        save_model(csp, args.csp_out)
        save_model(lda, args.lda_out)
    except BaseException:
        for path in outputs:
            path.unlink(missing_ok=True)
        raise
    preds = [score_block(csp, lda, e.data)[0] for e in epochs]
    cm = confusion([e.label for e in epochs], preds)
    print(write_report(None, "training-set report", _config(args), [("training confusion", cm)],
                       [f"epochs: {len(epochs)} (skipped {skipped})"]), end="")
    return EXIT_OK


def cmd_evaluate(args):
    signal, markers = _load_inputs(args)
    epochs, skipped = extract_epochs(signal, markers, args.window_offset, args.window_length)
    res = evaluate_offline(epochs, args.pairs, args.folds, signal.channel_names,
                           fs=signal.sample_rate_hz, window_s=args.window, step_s=args.step,
                           seed=args.fold_seed)
    text = write_report(
        args.report, "offline evaluation report", _config(args),
        [("per-window confusion (held-out)", res.window_confusion),
         ("per-cue confusion (held-out epochs)", res.confusion)],
        [f"epochs: {len(epochs)} (skipped {skipped})",
         f"per-window accuracy: {format_percent(res.window_accuracy)}%",
         f"per-cue accuracy: {format_percent(res.accuracy)}%"])
    if args.report is None:
        print(text, end="")
    else:
        print(f"per-window accuracy: {format_percent(res.window_accuracy)}%")
        print(f"per-cue accuracy: {format_percent(res.accuracy)}%")
    if args.windows_csv:
        write_window_csv(args.windows_csv, res.windows)
    return EXIT_OK


def _write_replay_outputs(args, summary):
    summary.config.update({k: v for k, v in _config(args).items() if k not in summary.config})
    text = summary.report_text()
    if args.report:
        Path(args.report).write_text(text)
    else:
        print(text, end="")
    if args.windows_csv:
        write_window_csv(args.windows_csv, summary.windows)


def cmd_replay(args):
    if args.connect is None and args.capture is None:
        raise ValidationError("INVALID_ARG", "need --connect and/or --capture")
    signal, markers = _load_inputs(args)
    csp, lda = load_model(args.csp), load_model(args.lda)
    sinks = []
    try:
        if args.capture:
            sinks.append(CaptureSink(args.capture))
        if args.connect:
            sinks.append(TcpSink(*args.connect))
    except SinkDisconnected:
        for s in sinks:
            s.close()
        raise
    sink = TeeSink(*sinks)
    left, right = ("q", "a") if args.swap_commands else ("a", "q")
    try:
        summary = run_replay(signal, markers, csp, lda, sink, "fast" if args.fast else "realtime",
                             args.window, args.step, args.debounce, args.window_offset,
                             args.window_length, left, right)
    except SinkDisconnected as exc:
        if exc.summary is not None:
            _write_replay_outputs(args, exc.summary)
        raise
    finally:
        sink.close()
    _write_replay_outputs(args, summary)
    return EXIT_OK


def cmd_hand_sim(args):
    def announce(endpoint):
        print(f"listening on {endpoint[0]}:{endpoint[1]}", flush=True)

    state = run_server(args.listen, args.trace, stdin=args.stdin,
                       max_connections=1 if args.once else None, announce=announce)
    log.info("final state %s", state.servo_deg)
    return EXIT_OK


COMMANDS = {"synth": cmd_synth, "train": cmd_train, "evaluate": cmd_evaluate,
            "replay": cmd_replay, "hand-sim": cmd_hand_sim}


def _setup_logging():
    level = os.environ.get("BCI_LOG", "error").lower()
    logging.basicConfig(
        level={"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        _validate_common(args)
        return COMMANDS[args.command](args)
    except BCIError as exc:
        print(f"mibci {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
