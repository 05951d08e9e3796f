"""
Replaying a session into the simulated hand
===========================================

Models trained on one session drive the 5-servo hand while a second session
is replayed window by window.  LEFT opens the hand ('a'), RIGHT closes it ('q').
"""

import threading

from mibci.handsim import HandServer, bind
from mibci.online import TcpSink, run_replay
from mibci.pipeline import train_models
from mibci.preprocess import extract_epochs
from mibci.synthgen import diag_spec, generate_session

left, right = [4.0, 1.0] + [1.0] * 12, [1.0, 4.0] + [1.0] * 12
signal, markers = generate_session(diag_spec(left, right, seed=7))
epochs, _ = extract_epochs(signal, markers)
csp, lda = train_models(epochs, n_pairs=2)

# a fresh session from the same generator
test_signal, test_markers = generate_session(diag_spec(left, right, seed=99, n_cues=10))

# the hand listens on an ephemeral port and serves one connection
listener = bind("127.0.0.1", 0)
host, port = listener.getsockname()[:2]
hand = HandServer()
server = threading.Thread(target=hand.serve_socket, args=(listener, 1))
server.start()

sink = TcpSink(host, port)
summary = run_replay(test_signal, test_markers, csp, lda, sink, timing="fast")
sink.close()
server.join()
listener.close()

print("commands:", "".join(c.byte for c in summary.commands))
print(f"per-window accuracy {summary.window_accuracy:.2f}%")
print("hand received", hand.received, "bytes; final servo angles", hand.state.servo_deg)
