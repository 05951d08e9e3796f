import numpy as np
import pytest

from mibci.core import MarkerLabel
from mibci.errors import ValidationError
from mibci.preprocess import extract_epochs
from mibci.prng import SplitMix64, splitmix64_reference
from mibci.synthgen import diag_spec, generate_session, load_session_spec, parse_session_spec


class TestPrng:
    def test_published_vector(self):
        # reference outputs for seed 1234567
        expected = [6457827717110365317, 3203168211198807973, 9817491932198370423,
                    4593380528125082431, 16408922859458223821]
        assert splitmix64_reference(1234567, 5) == expected
        assert SplitMix64(1234567).u64(5).tolist() == expected

    def test_blocks_equal_stream(self):
        a = SplitMix64(99)
        b = SplitMix64(99)
        assert np.concatenate([a.u64(3), a.u64(10)]).tolist() == b.u64(13).tolist()
        assert b.u64(4).tolist() == splitmix64_reference(99, 17)[13:]

    def test_uniform_range(self):
        u = SplitMix64(1).uniform(10000)
        assert u.min() >= 0 and u.max() < 1

    def test_normal_moments(self):
        z = SplitMix64(5).normal(200_001)
        assert abs(z.mean()) < 0.01 and abs(z.std() - 1) < 0.01

    def test_shuffle_is_permutation(self):
        items = list(range(40))
        out = SplitMix64(3).shuffle(items)
        assert sorted(out) == items and out != items


class TestGenerate:
    def test_forty_cues(self):
        signal, markers = generate_session(diag_spec([1, 1, 1], [1, 1, 1], n_cues=40))
        cues = markers.cues()
        assert len(cues) == 40
        assert sum(m.label is MarkerLabel.LEFT_CUE for m in cues) == 20
        assert signal.duration_s >= 164
        assert markers[0].label is MarkerLabel.SESSION_START and markers[0].time_s == 0
        crosses = [m.time_s for m in markers if m.label is MarkerLabel.CROSS]
        assert crosses == [c.time_s - 1 for c in cues]
        assert [(m.time_s, m.code) for m in markers] == sorted((m.time_s, m.code) for m in markers)

    def test_alternating_default(self):
        _, markers = generate_session(diag_spec([1, 1], [1, 1], n_cues=6))
        assert [m.label.value for m in markers.cues()] == ["LEFT_CUE", "RIGHT_CUE"] * 3

    def test_shuffled_balanced(self):
        _, markers = generate_session(diag_spec([1, 1], [1, 1], n_cues=20, shuffle=True, seed=4))
        labels = [m.label for m in markers.cues()]
        assert labels.count(MarkerLabel.LEFT_CUE) == 10
        assert labels != [MarkerLabel.LEFT_CUE, MarkerLabel.RIGHT_CUE] * 10

    def test_deterministic(self):
        spec = diag_spec([2, 1, 1], [1, 2, 1], n_cues=4, seed=11)
        s1, m1 = generate_session(spec)
        s2, m2 = generate_session(spec)
        assert s1.samples.tobytes() == s2.samples.tobytes()
        assert list(m1) == list(m2)
        s3, _ = generate_session(diag_spec([2, 1, 1], [1, 2, 1], n_cues=4, seed=12))
        assert s3.samples.tobytes() != s1.samples.tobytes()

    def test_class_variance_ratio(self):
        spec = diag_spec([0.8, 0.1, 0.1], [0.1, 0.8, 0.1], n_cues=20, seed=3)
        signal, markers = generate_session(spec)
        epochs, _ = extract_epochs(signal, markers, 0.0, 4.0)
        ch1 = {lab: np.mean([np.var(e.data[0]) for e in epochs if e.label == lab]) for lab in (-1, 1)}
        ch2 = {lab: np.mean([np.var(e.data[1]) for e in epochs if e.label == lab]) for lab in (-1, 1)}
        assert ch1[-1] / ch1[1] > 2
        assert ch2[1] / ch2[-1] > 2

    def test_empirical_diagonal_ordering(self):
        spec = diag_spec([3.0, 2.0, 1.0], [1.0, 2.0, 3.0], n_cues=10, seed=8, noise_floor=0.0)
        signal, markers = generate_session(spec)
        epochs, _ = extract_epochs(signal, markers, 0.5, 3.0)
        for lab, order in ((-1, [0, 1, 2]), (1, [2, 1, 0])):
            cov = np.mean([e.data @ e.data.T for e in epochs if e.label == lab], axis=0)
            assert list(np.argsort(-np.diag(cov))) == order

    def test_outside_cues_uses_average(self):
        spec = diag_spec([9.0, 1.0], [1.0, 9.0], n_cues=2, seed=2, noise_floor=0.0)
        signal, _ = generate_session(spec)
        pre = signal.samples[:, 64:int(3.5 * 128)]
        v = np.var(pre, axis=1)
        assert 0.5 < v[0] / v[1] < 2

    @pytest.mark.parametrize("kw", [
        dict(n_cues=3), dict(cue_period_s=2.0), dict(noise_floor=-1.0), dict(band=(30, 8)),
    ])
    def test_invalid(self, kw):
        with pytest.raises(ValidationError) as exc:
            generate_session(diag_spec([1, 1], [1, 1], **kw))
        assert exc.value.code == "INVALID_SPEC"

    def test_not_spd(self):
        with pytest.raises(ValidationError, match="INVALID_SPEC"):
            generate_session(diag_spec([1, -1], [1, 1]))


class TestSpecFile:
    def test_diag_and_file(self, tmp_path):
        (tmp_path / "right.txt").write_text("1 0 0\n0 4 0\n0 0 1\n")
        text = ("# three channels\nn_channels=3\nn_cues=4\nseed=9\nband=8,30\nnoise_floor=0.05\n"
                "cov_left=diag:4,1,1\ncov_right=file:right.txt\nchannel_names=C3,Cz,C4\n")
        (tmp_path / "s.spec").write_text(text)
        spec = load_session_spec(tmp_path / "s.spec")
        assert spec.n_channels == 3 and spec.n_cues == 4 and spec.seed == 9
        np.testing.assert_array_equal(spec.cov_right, np.diag([1, 4, 1]))
        assert spec.names() == ("C3", "Cz", "C4")
        assert load_session_spec(tmp_path / "s.spec", seed=5).seed == 5

    @pytest.mark.parametrize("text", [
        "n_channels=2\ncov_left=diag:1,1\n",
        "n_channels=2\ncov_left=diag:1\ncov_right=diag:1,1\n",
        "n_channels=2\ncov_left=diag:1,1\ncov_right=diag:1,1\nbogus=1\n",
        "n_channels=2\ncov_left=eye\ncov_right=diag:1,1\n",
        "n_channels=two\ncov_left=diag:1,1\ncov_right=diag:1,1\n",
        "just a line\n",
    ])
    def test_bad_specs(self, text):
        with pytest.raises(ValidationError, match="INVALID_SPEC"):
            parse_session_spec(text)
