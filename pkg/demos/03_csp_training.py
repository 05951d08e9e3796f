"""
Training CSP filters and an LDA classifier
==========================================

CSP finds spatial filters whose output variance is large for one class
and small for the other; LDA separates the resulting log-variance features.
"""

import numpy as np

from mibci.classify import lda_score, log_variance_features, train_lda
from mibci.csp import apply_csp, train_csp
from mibci.preprocess import extract_epochs
from mibci.synthgen import diag_spec, generate_session

spec = diag_spec([4.0, 1.0] + [1.0] * 12, [1.0, 4.0] + [1.0] * 12, n_cues=40, seed=7)
signal, markers = generate_session(spec)

# epochs start 0.5 s after each cue and last 3 s
epochs, skipped = extract_epochs(signal, markers)
print(f"{len(epochs)} epochs of shape {epochs[0].data.shape}, {skipped} skipped")

csp = train_csp(epochs, n_pairs=2, channel_names=signal.channel_names)
print("CSP eigenvalues (kept rows):", np.round(csp.eigenvalues, 3))

# the two extreme filters should load on channels 0 and 1
np.set_printoptions(precision=2, suppress=True)
print(csp.projection[:, :4])

feats = [log_variance_features(apply_csp(csp, e.data), e.label) for e in epochs]
lda = train_lda(feats)
print("LDA weights", lda.weights, "bias", round(lda.bias, 4))

# training-set scores: LEFT negative, RIGHT positive
scores = np.array([lda_score(lda, f) for f in feats])
labels = np.array([int(e.label) for e in epochs])
print("mean score LEFT %.2f, RIGHT %.2f" % (scores[labels < 0].mean(), scores[labels > 0].mean()))
