import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import two_pass_variance

from mibci.classify import (FeatureVector, classify, label_for_score, lda_score,
                            log_variance_features, train_lda)
from mibci.core import ClassLabel, LdaModel
from mibci.errors import ComputationError, ValidationError

L, R = ClassLabel.LEFT, ClassLabel.RIGHT


def fv(values, label=None):
    return FeatureVector(np.atleast_1d(np.asarray(values, dtype=float)), label)


def one_d_fixture():
    return [fv(-2, L), fv(-1, L), fv(1, R), fv(2, R)]


class TestLogVariance:
    def test_equal_rows(self):
        x = np.array([[1.0, -1.0, 1.0, -1.0], [2.0, 0.0, 2.0, 0.0]])
        np.testing.assert_allclose(log_variance_features(x).values, [math.log(0.5)] * 2, atol=1e-15)

    def test_scale_free(self):
        x = np.random.default_rng(0).standard_normal((4, 100))
        for alpha in (1e-4, 3.3, 1e5):
            np.testing.assert_allclose(log_variance_features(alpha * x).values,
                                       log_variance_features(x).values, atol=1e-12)

    def test_two_pass_oracle(self):
        x = np.random.default_rng(1).standard_normal((4, 512)) * [[1], [3], [0.2], [10]]
        var = [two_pass_variance(list(r)) for r in x]
        expected = [math.log(v / sum(var)) for v in var]
        np.testing.assert_allclose(log_variance_features(x).values, expected, atol=1e-10)

    def test_degenerate(self):
        with pytest.raises(ComputationError) as exc:
            log_variance_features(np.ones((2, 10)))
        assert exc.value.code == "DEGENERATE_EPOCH"

    def test_zero_row_floor(self):
        x = np.vstack([np.zeros(8), np.arange(8.0)])
        f = log_variance_features(x).values
        assert f[0] == pytest.approx(math.log(1e-30 / np.var(np.arange(8.0), ddof=1)))
        assert f[1] == 0.0


class TestTrainLda:
    def test_one_d_boundary(self):
        m = train_lda(one_d_fixture())
        assert m.weights[0] > 0
        assert abs(m.bias) < 1e-9
        assert abs(lda_score(m, fv(0.0))) < 1e-9

    def test_two_d_direction(self):
        rng = np.random.default_rng(42)
        cov = np.diag([1.0, 4.0])
        feats = [fv(v, R) for v in rng.multivariate_normal([1, 0], cov, 500)]
        feats += [fv(v, L) for v in rng.multivariate_normal([-1, 0], cov, 500)]
        w = train_lda(feats).weights
        closed_form = np.linalg.solve(cov, [2.0, 0.0])
        cosang = w @ closed_form / np.linalg.norm(w) / np.linalg.norm(closed_form)
        assert math.degrees(math.acos(min(1.0, cosang))) < 5

    def test_translation(self):
        rng = np.random.default_rng(3)
        feats = [fv(rng.normal([2, 0], 1), R) for _ in range(30)] + [fv(rng.normal([-2, 0], 1), L) for _ in range(30)]
        t = np.array([17.0, -4.0])
        m1 = train_lda(feats)
        m2 = train_lda([fv(f.values + t, f.label) for f in feats])
        assert [classify(m1, f) for f in feats] == [classify(m2, fv(f.values + t)) for f in feats]

    def test_separable_training_accuracy(self):
        rng = np.random.default_rng(4)
        feats = [fv(rng.uniform(3, 5, 3), R) for _ in range(20)] + [fv(rng.uniform(-5, -3, 3), L) for _ in range(20)]
        m = train_lda(feats)
        assert all(classify(m, f) == f.label for f in feats)

    def test_score_scale(self):
        feats = one_d_fixture()
        m = train_lda(feats)
        scores = [lda_score(m, f) for f in feats]
        assert m.score_scale == pytest.approx(np.std(scores))

    def test_too_few(self):
        with pytest.raises(ComputationError) as exc:
            train_lda([fv(1, R), fv(2, R), fv(-1, L)])
        assert exc.value.code == "TOO_FEW_SAMPLES"

    def test_singular(self):
        feats = [fv([1, 0], R), fv([1, 0], R), fv([-1, 0], L), fv([-1, 0], L)]
        # zero within-class scatter: shrinkage of a zero matrix is still zero
        with pytest.raises(ComputationError) as exc:
            train_lda(feats)
        assert exc.value.code == "SINGULAR"

    def test_dim_mismatch(self):
        with pytest.raises(ValidationError):
            train_lda([fv([1, 2], R), fv([1], R), fv([-1, 0], L), fv([-2, 0], L)])


class TestScoreAndClassify:
    def test_midpoint_and_mean(self):
        m = train_lda(one_d_fixture())
        assert abs(lda_score(m, fv(0.0))) < 1e-9
        assert lda_score(m, fv(1.5)) > 0

    def test_dot_product_oracle(self):
        rng = np.random.default_rng(5)
        w, f, b = rng.standard_normal(4), rng.standard_normal(4), rng.standard_normal()
        m = LdaModel(w, b, 1.0)
        assert lda_score(m, fv(f)) == pytest.approx(sum(wi * fi for wi, fi in zip(w, f)) + b, abs=1e-12)

    @pytest.mark.parametrize("score,label", [(3.2, R), (0.0, L), (-0.001, L)])
    def test_label_rule(self, score, label):
        assert label_for_score(score) is label
        m = LdaModel([1.0], score, 1.0)
        assert classify(m, fv(0.0)) is label

    def test_dim_mismatch(self):
        with pytest.raises(ValidationError):
            lda_score(LdaModel([1.0, 2.0], 0, 1), fv([1.0]))

    @settings(max_examples=50, deadline=None)
    @given(st.floats(1e-3, 1e3), st.lists(st.floats(-10, 10), min_size=3, max_size=3),
           st.floats(-10, 10), st.lists(st.floats(-10, 10), min_size=3, max_size=3))
    def test_positive_rescaling(self, alpha, w, b, f):
        if not any(w):
            return
        m1, m2 = LdaModel(w, b, 1.0), LdaModel(np.multiply(w, alpha), b * alpha, 1.0)
        s = lda_score(m1, fv(f))
        if abs(s) < 1e-9:
            return
        assert classify(m1, fv(f)) == classify(m2, fv(f))
