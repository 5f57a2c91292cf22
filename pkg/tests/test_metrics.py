import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twinedit.metrics import (
    PSNR_CAP_DB,
    Cell,
    DimensionMismatch,
    FrameBuffer,
    InsufficientFrames,
    MetricReport,
    SsimParams,
    TooSmall,
    ZeroNormEmbedding,
    aggregate,
    clip_frame_consistency,
    clip_text_alignment,
    grounding_score,
    judge_score,
    psnr,
    ssim,
    ssim_plane,
)
from twinedit.rewards import JudgeVerdict


def _buf(arr):
    return FrameBuffer.from_array(np.asarray(arr, dtype=np.uint8))


def _rand_pair(rng, h=48, w=64, c=3):
    a = rng.integers(0, 256, size=(h, w, c), dtype=np.uint8)
    b = rng.integers(0, 256, size=(h, w, c), dtype=np.uint8)
    return _buf(a), _buf(b)


class TestPsnr:
    def test_identical_hits_cap(self):
        a = _buf(np.full((16, 16), 7))
        assert psnr(a, a) == PSNR_CAP_DB

    def test_uniform_offset_closed_form(self):
        # MSE = 16^2 -> 10*log10(255^2/256) = 24.048404...
        a = _buf(np.zeros((16, 16)))
        b = _buf(np.full((16, 16), 16))
        assert psnr(a, b) == pytest.approx(24.0484, abs=1e-4)

    def test_max_difference(self):
        # MSE = 255^2 -> 0 dB.
        a = _buf(np.zeros((8, 8)))
        b = _buf(np.full((8, 8), 255))
        assert psnr(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            a, b = _rand_pair(rng)
            assert psnr(a, b) == psnr(b, a)

    def test_monotone_in_noise(self):
        rng = np.random.default_rng(1)
        base = rng.integers(40, 216, size=(32, 32), dtype=np.uint8)
        vals = []
        for amp in (2, 8, 32):
            noisy = np.clip(base.astype(int) + rng.integers(-amp, amp + 1, base.shape), 0, 255)
            vals.append(psnr(_buf(base), _buf(noisy)))
        assert vals[0] > vals[1] > vals[2]

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            psnr(_buf(np.zeros((8, 8))), _buf(np.zeros((8, 9))))


class TestSsim:
    def test_self_is_exactly_one(self):
        rng = np.random.default_rng(2)
        a, _ = _rand_pair(rng)
        assert ssim(a, a) == 1.0

    def test_constant_planes_closed_form(self):
        # zero variance: s = (2*m1*m2 + c1) / (m1^2 + m2^2 + c1).
        p = SsimParams()
        c1 = (p.k1 * p.data_range) ** 2
        m1, m2 = 0.0, 255.0
        want = (2 * m1 * m2 + c1) / (m1 * m1 + m2 * m2 + c1)
        a = _buf(np.zeros((24, 24)))
        b = _buf(np.full((24, 24), 255))
        assert ssim(a, b) == pytest.approx(want, abs=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            a, b = _rand_pair(rng, h=24, w=24)
            assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)

    def test_bounded(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            a, b = _rand_pair(rng, h=16, w=16, c=1)
            assert -1.0 <= ssim(a, b) <= 1.0

    def test_too_small(self):
        with pytest.raises(TooSmall):
            ssim_plane(np.zeros((10, 10)), np.zeros((10, 10)))

    def test_matches_reference_implementation(self):
        skimage = pytest.importorskip("skimage.metrics")
        rng = np.random.default_rng(5)
        for trial in range(50):
            h = int(rng.integers(11, 40))
            w = int(rng.integers(11, 40))
            x = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
            if trial % 3 == 0:
                y = np.clip(x.astype(int) + rng.integers(-20, 21, x.shape), 0, 255).astype(np.uint8)
            else:
                y = rng.integers(0, 256, size=(h, w), dtype=np.uint8)
            mine = ssim_plane(x.astype(np.float64), y.astype(np.float64))
            ref = skimage.structural_similarity(
                x,
                y,
                gaussian_weights=True,
                sigma=1.5,
                win_size=11,
                use_sample_covariance=False,
                data_range=255,
            )
            assert abs(mine - ref) <= 1e-6, trial

    def test_backends_agree(self):
        from twinedit.metrics.kernels import _filter_valid_numpy, _gaussian_kernel

        rng = np.random.default_rng(6)
        img = rng.random((30, 30))
        k = _gaussian_kernel(11, 1.5)
        from twinedit.metrics.kernels import _filter_valid

        assert np.allclose(_filter_valid(img, k), _filter_valid_numpy(img, k), atol=1e-12)


class TestScorers:
    def test_frame_consistency_example(self):
        # cosines 1/sqrt(2) and 1/sqrt(2) -> mean 0.70711 -> 70.71.
        embs = [(1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        assert clip_frame_consistency(embs) == pytest.approx(100.0 / math.sqrt(2), abs=1e-9)

    def test_frame_consistency_identical(self):
        assert clip_frame_consistency([(0.0, 2.0)] * 4) == pytest.approx(100.0)

    def test_frame_consistency_needs_two(self):
        with pytest.raises(InsufficientFrames):
            clip_frame_consistency([(1.0, 0.0)])

    def test_zero_norm_rejected(self):
        with pytest.raises(ZeroNormEmbedding):
            clip_frame_consistency([(0.0, 0.0), (1.0, 0.0)])

    def test_text_alignment(self):
        embs = [(1.0, 0.0), (0.0, 1.0)]
        # cosines 1 and 0 -> 50.
        assert clip_text_alignment(embs, (1.0, 0.0)) == pytest.approx(50.0)

    def test_text_alignment_scale_invariant(self):
        a = clip_text_alignment([(3.0, 4.0)], (1.0, 2.0))
        b = clip_text_alignment([(0.3, 0.4)], (10.0, 20.0))
        assert a == pytest.approx(b, abs=1e-9)

    def test_grounding_all_found(self):
        dets = [[{"label": "dog", "confidence": 0.9}]] * 4
        assert grounding_score(dets, ["dog"]) == 100.0

    def test_grounding_threshold(self):
        dets = [
            [{"label": "dog", "confidence": 0.34}],
            [{"label": "dog", "confidence": 0.35}],
        ]
        assert grounding_score(dets, ["dog"]) == 50.0

    def test_grounding_missing_frame_fails(self):
        dets = [[{"label": "dog", "confidence": 0.9}], None]
        assert grounding_score(dets, ["dog"]) == 50.0

    def test_grounding_requires_all_labels(self):
        dets = [[{"label": "dog", "confidence": 0.9}]]
        assert grounding_score(dets, ["dog", "cat"]) == 0.0

    def test_grounding_empty_labels_vacuous(self):
        assert grounding_score([[], None], []) == 100.0

    def test_judge_score(self):
        vs = [JudgeVerdict(True), JudgeVerdict(False), JudgeVerdict(True), JudgeVerdict(True)]
        assert judge_score(vs) == 75.0
        assert judge_score([]) == 0.0


class TestAggregate:
    def test_mean_and_population_std(self):
        # mean of (10, 20) is 15, population std 5.
        reports = [
            (1, "semantic", MetricReport.from_dict({"psnr": 10.0})),
            (1, "spatial", MetricReport.from_dict({"psnr": 20.0})),
        ]
        table = aggregate(reports)
        cell = table.cell("psnr", "all", "all")
        assert cell == Cell(15.0, 5.0, 2)
        assert table.cell("psnr", "level", "1") == Cell(15.0, 5.0, 2)
        assert table.cell("psnr", "category", "semantic") == Cell(10.0, 0.0, 1)
        assert table.cell("psnr", "level", "2") is None

    def test_permutation_invariance(self):
        rng = np.random.default_rng(7)
        reports = [
            (int(rng.integers(1, 4)), "semantic", MetricReport.from_dict({"ssim": float(rng.random())}))
            for _ in range(12)
        ]
        a = aggregate(reports)
        b = aggregate(list(reversed(reports)))
        assert a == b

    def test_metric_ordering(self):
        reports = [(1, "semantic", MetricReport.from_dict({"judge": 1.0, "psnr": 2.0, "zeta": 3.0}))]
        assert aggregate(reports).metrics() == ["psnr", "judge", "zeta"]


@given(
    st.integers(0, 255),
    st.integers(0, 255),
    st.integers(8, 20),
)
@settings(max_examples=30, deadline=None)
def test_psnr_uniform_property(u, v, n):
    a = _buf(np.full((n, n), u))
    b = _buf(np.full((n, n), v))
    if u == v:
        assert psnr(a, b) == PSNR_CAP_DB
    else:
        want = min(PSNR_CAP_DB, 10 * math.log10(255.0**2 / (u - v) ** 2))
        assert psnr(a, b) == pytest.approx(want, abs=1e-9)
