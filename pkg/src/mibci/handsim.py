"""Simulated microcontroller driving a five-servo hand.

Each received byte is one command, exactly as a ``Serial.read()`` loop sees
it: 'q' closes the whole hand, 'a' opens it, 'w'/'s' close/open finger one
(the thumb).  Anything else is ignored.
"""
from __future__ import annotations

import logging
import socket
import sys
import time
from dataclasses import dataclass

from .errors import BindFailed

__all__ = ["HandState", "apply_command", "format_trace_line", "HandServer", "run_server",
           "OPEN_POS", "CLOSE_POS"]

log = logging.getLogger(__name__)

OPEN_POS = 0
CLOSE_POS = 180


@dataclass(frozen=True)
class HandState:
    servo_deg: tuple = (OPEN_POS,) * 5

    def __post_init__(self):
        if len(self.servo_deg) != 5 or not all(0 <= s <= 180 for s in self.servo_deg):
            raise ValueError(f"five set-points in [0, 180] required, got {self.servo_deg}")


def apply_command(state, byte):
    """Next hand state after one command byte (``str`` or ``int``)."""
    if isinstance(byte, int):
        byte = chr(byte)
    if byte == "q":
        return HandState((CLOSE_POS,) * 5)
    if byte == "a":
        return HandState((OPEN_POS,) * 5)
    if byte == "w":
        return HandState((CLOSE_POS,) + state.servo_deg[1:])
    if byte == "s":
        return HandState((OPEN_POS,) + state.servo_deg[1:])
    log.info("ignored byte %r", byte)
    return state


def _byte_repr(b):
    c = chr(b)
    return c if c.isprintable() and not c.isspace() else f"\\x{b:02x}"


def format_trace_line(epoch_ms, byte, state):
    return f"{epoch_ms} {_byte_repr(byte)} " + " ".join(str(s) for s in state.servo_deg)


class HandServer:
    """Applies incoming bytes to a persistent :class:`HandState` and traces them."""

    def __init__(self, trace_path=None, state=None):
        self.state = state or HandState()
        self.trace_path = trace_path
        self._trace = open(trace_path, "a") if trace_path else None
        self.received = 0

    def feed(self, data):
        for b in data:
            self.state = apply_command(self.state, b)
            self.received += 1
            if self._trace is not None:
                self._trace.write(format_trace_line(int(time.time() * 1000), b, self.state) + "\n")
        if self._trace is not None:
            self._trace.flush()

    def serve_stream(self, stream):
        """Read a binary file-like object until EOF."""
        while True:
            chunk = stream.read1(4096) if hasattr(stream, "read1") else stream.read(4096)
            if not chunk:
                break
            self.feed(chunk)

    def serve_socket(self, listener, max_connections=None):
        """Accept connections one at a time; state survives reconnects."""
        served = 0
        while max_connections is None or served < max_connections:
            conn, addr = listener.accept()
            log.info("client %s:%s connected", *addr[:2])
            with conn:
                while True:
                    try:
                        chunk = conn.recv(4096)
                    except OSError as exc:
                        log.warning("read error: %s", exc)
                        break
                    if not chunk:
                        break
                    self.feed(chunk)
            log.info("client disconnected, state %s", self.state.servo_deg)
            served += 1

    def close(self):
        if self._trace is not None:
            self._trace.close()


def bind(host="127.0.0.1", port=0):
    try:
        listener = socket.create_server((host, port))
    except OSError as exc:
        raise BindFailed(f"{host}:{port}: {exc}") from None
    return listener


def run_server(listen=None, trace_path=None, stdin=False, max_connections=None, announce=None):
    """Run the simulator on a TCP endpoint ``(host, port)`` or on stdin.

    ``announce`` is called with the bound ``(host, port)`` before accepting.
    Returns the final state once the input ends (stdin) or ``max_connections``
    clients have come and gone.
    """
    server = HandServer(trace_path)
    try:
        if stdin:
            server.serve_stream(sys.stdin.buffer)
        else:
            host, port = listen or ("127.0.0.1", 0)
            with bind(host, port) as listener:
                if announce is not None:
                    announce(listener.getsockname()[:2])
                server.serve_socket(listener, max_connections)
    finally:
        server.close()
    return server.state
