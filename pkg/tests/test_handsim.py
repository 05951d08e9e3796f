import io
import itertools
import socket
import threading

import pytest
from oracles import hand_reference

from mibci.errors import BindFailed
from mibci.handsim import HandServer, HandState, apply_command, bind, run_server

CLOSED = (180,) * 5
OPEN = (0,) * 5


def run(seq, state=None):
    state = state or HandState()
    for ch in seq:
        state = apply_command(state, ch)
    return state.servo_deg


class TestApplyCommand:
    def test_initial_open(self):
        assert HandState().servo_deg == OPEN

    @pytest.mark.parametrize("start", [OPEN, CLOSED, (180, 0, 180, 0, 180)])
    def test_close_all(self, start):
        assert apply_command(HandState(start), "q").servo_deg == CLOSED

    def test_open_all(self):
        assert apply_command(HandState(CLOSED), "a").servo_deg == OPEN

    def test_finger_one(self):
        assert apply_command(HandState(CLOSED), "s").servo_deg == (0, 180, 180, 180, 180)
        assert apply_command(HandState(OPEN), "w").servo_deg == (180, 0, 0, 0, 0)

    @pytest.mark.parametrize("byte", ["x", "Q", "\n", "\x00", 0xFF])
    def test_unknown_ignored(self, byte):
        s = HandState((180, 0, 180, 0, 180))
        assert apply_command(s, byte) is s

    def test_int_bytes(self):
        assert apply_command(HandState(), ord("q")).servo_deg == CLOSED

    @pytest.mark.parametrize("ch", "qaws")
    def test_idempotent(self, ch):
        for start in (OPEN, CLOSED, (0, 180, 0, 180, 0)):
            once = apply_command(HandState(start), ch)
            assert apply_command(once, ch) == once

    def test_brute_force_against_reference(self):
        checked = 0
        for n in range(5):
            for seq in itertools.product("qawsx", repeat=n):
                assert run(seq) == hand_reference(seq), seq
                checked += 1
        assert checked == 781


class TestServer:
    def test_stream_trace(self, tmp_path):
        trace = tmp_path / "trace.txt"
        srv = HandServer(trace)
        srv.serve_stream(io.BytesIO(b"qa"))
        srv.close()
        lines = trace.read_text().splitlines()
        assert len(lines) == 2
        assert lines[0].split()[1:] == ["q"] + ["180"] * 5
        assert lines[1].split()[1:] == ["a"] + ["0"] * 5
        assert lines[0].split()[0].isdigit()

    def test_empty_session(self, tmp_path):
        trace = tmp_path / "trace.txt"
        srv = HandServer(trace)
        srv.serve_stream(io.BytesIO(b""))
        srv.close()
        assert trace.read_text() == ""

    def test_unknown_bytes_traced(self, tmp_path):
        trace = tmp_path / "trace.txt"
        srv = HandServer(trace)
        srv.feed(b"x\n")
        srv.close()
        lines = trace.read_text().splitlines()
        assert [ln.split()[1] for ln in lines] == ["x", "\\x0a"]
        assert srv.received == 2

    def test_tcp_reconnect_preserves_state(self, tmp_path):
        trace = tmp_path / "trace.txt"
        ready = threading.Event()
        endpoint = {}
        result = {}

        def announce(ep):
            endpoint["ep"] = ep
            ready.set()

        def serve():
            result["state"] = run_server(("127.0.0.1", 0), trace, max_connections=2, announce=announce)

        t = threading.Thread(target=serve)
        t.start()
        assert ready.wait(5)
        with socket.create_connection(endpoint["ep"]) as c:
            c.sendall(b"q")
        with socket.create_connection(endpoint["ep"]) as c:
            c.sendall(b"s")
        t.join(5)
        assert result["state"].servo_deg == (0, 180, 180, 180, 180)
        lines = trace.read_text().splitlines()
        assert [ln.split()[1:] for ln in lines] == [["q"] + ["180"] * 5, ["s", "0"] + ["180"] * 4]

    def test_bind_failed(self):
        with bind("127.0.0.1", 0) as taken:
            port = taken.getsockname()[1]
            with pytest.raises(BindFailed):
                bind("127.0.0.1", port)
