import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from rrvision.profile import edges_profile, full_roi_profile, resample_profile


class TestFullRoiProfile:
    def test_constant_roi(self):
        assert np.array_equal(full_roi_profile(np.full((2, 2), 60.0)), [60.0, 60.0])

    def test_two_extreme_rows(self):
        roi = np.vstack([np.zeros((1, 10)), np.full((1, 10), 255.0)])
        assert np.array_equal(full_roi_profile(roi), [0.0, 255.0])

    def test_matches_row_mean_oracle_1000_instances(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            h, w = rng.integers(1, 9), rng.integers(1, 9)
            roi = rng.uniform(0, 255, size=(h, w))
            got = full_roi_profile(roi)
            for i in range(h):
                want = sum(float(v) for v in roi[i]) / w
                assert got[i] == pytest.approx(want, rel=1e-12)

    @settings(max_examples=50)
    @given(seed=st.integers(0, 10**6))
    def test_invariant_to_permuting_pixels_within_rows(self, seed):
        rng = np.random.default_rng(seed)
        roi = rng.uniform(0, 255, size=(5, 7))
        shuffled = roi.copy()
        for row in shuffled:
            rng.shuffle(row)
        assert full_roi_profile(shuffled) == pytest.approx(full_roi_profile(roi), rel=1e-12)

    def test_vertical_shift_moves_profile_by_one_row(self):
        # horizontal stripes: shifting content down by one row shifts the profile
        stripes = np.repeat(np.arange(8, dtype=np.float64) * 30, 2)[:, None].repeat(6, axis=1)
        shifted = np.roll(stripes, 1, axis=0)
        assert np.array_equal(full_roi_profile(shifted)[1:], full_roi_profile(stripes)[:-1])


class TestEdgesProfile:
    def test_full_mask_equals_full_roi_exactly(self):
        rng = np.random.default_rng(1)
        roi = rng.uniform(0, 255, size=(12, 9))
        prof, valid = edges_profile(roi, np.ones_like(roi, dtype=bool))
        assert np.array_equal(prof, full_roi_profile(roi))
        assert valid.all()

    def test_invalid_row_linear_fill(self):
        roi = np.array([[10.0, 99.0], [55.0, 77.0], [30.0, 99.0]])
        mask = np.array([[True, False], [False, False], [True, False]])
        prof, valid = edges_profile(roi, mask)
        assert np.array_equal(prof, [10.0, 20.0, 30.0])
        assert list(valid) == [True, False, True]

    def test_constant_extension_at_ends(self):
        roi = np.arange(12, dtype=np.float64).reshape(4, 3)
        mask = np.zeros_like(roi, dtype=bool)
        mask[1, 1] = True
        mask[2, 0] = True
        prof, valid = edges_profile(roi, mask)
        assert np.array_equal(prof, [4.0, 4.0, 6.0, 6.0])

    def test_single_pixel_per_row(self):
        rng = np.random.default_rng(2)
        roi = rng.uniform(0, 255, size=(6, 5))
        mask = np.zeros_like(roi, dtype=bool)
        picks = rng.integers(0, 5, size=6)
        mask[np.arange(6), picks] = True
        prof, _ = edges_profile(roi, mask)
        assert np.array_equal(prof, roi[np.arange(6), picks])

    def test_empty_mask_rejected(self):
        with pytest.raises(ValueError, match="no edge pixels"):
            edges_profile(np.ones((4, 4)), np.zeros((4, 4), dtype=bool))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="mask shape"):
            edges_profile(np.ones((4, 4)), np.ones((3, 4), dtype=bool))


class TestResample:
    def test_identity_when_lengths_match(self):
        raw = np.array([3.0, 1.0, 4.0, 1.0, 5.0])
        assert np.array_equal(resample_profile(raw, 5).values, raw)

    def test_two_to_three(self):
        assert np.array_equal(resample_profile(np.array([0.0, 1.0]), 3).values, [0.0, 0.5, 1.0])

    def test_matches_interpolation_oracle_1000_instances(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            h = int(rng.integers(2, 12))
            length = int(rng.integers(2, 12))
            raw = rng.uniform(-50, 300, size=h)
            got = resample_profile(raw, length).values
            for i in range(length):
                pos = i * (h - 1) / (length - 1)
                lo = int(np.floor(pos))
                hi = min(lo + 1, h - 1)
                frac = pos - lo
                want = raw[lo] * (1 - frac) + raw[hi] * frac
                assert got[i] == pytest.approx(want, rel=1e-9, abs=1e-9)

    @settings(max_examples=60)
    @given(
        raw=hnp.arrays(
            np.float64,
            st.integers(2, 30),
            elements=st.floats(-1e3, 1e3, allow_nan=False),
        ),
        length=st.integers(2, 40),
    )
    def test_preserves_bounds(self, raw, length):
        out = resample_profile(raw, length).values
        assert out.min() >= raw.min() - 1e-9
        assert out.max() <= raw.max() + 1e-9

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            resample_profile(np.array([1.0]), 5)
        with pytest.raises(ValueError):
            resample_profile(np.array([1.0, 2.0]), 1)
