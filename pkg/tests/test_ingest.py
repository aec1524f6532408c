import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rrvision.ingest import (
    FrameBuffer,
    VideoMeta,
    load_manifest,
    open_source,
    read_pnm,
    to_grayscale,
    write_manifest,
    write_pnm,
)

from conftest import make_recording


def _write_manifest(d, directory, **kw):
    payload = {
        "width": 32,
        "height": 24,
        "fps": 30.0,
        "frame_count": 3,
        "pixel_format": "RGB24",
    }
    payload.update(kw)
    with open(directory / "meta.json", "w") as fh:
        json.dump(payload, fh)
    return payload


class TestManifest:
    def test_round_trip(self, tmp_path):
        meta = VideoMeta(64, 48, 25.0, 10, "GRAY8")
        write_manifest(tmp_path / "meta.json", meta)
        assert load_manifest(tmp_path / "meta.json") == meta

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="missing manifest"):
            load_manifest(tmp_path / "meta.json")

    def test_extra_key_rejected(self, tmp_path):
        _write_manifest(None, tmp_path, codec="h264")
        with pytest.raises(ValueError, match="exactly"):
            load_manifest(tmp_path / "meta.json")

    def test_missing_key_rejected(self, tmp_path):
        payload = _write_manifest(None, tmp_path)
        del payload["fps"]
        (tmp_path / "meta.json").write_text(json.dumps(payload))
        with pytest.raises(ValueError, match="exactly"):
            load_manifest(tmp_path / "meta.json")

    @pytest.mark.parametrize("bad", [dict(width=8), dict(fps=0), dict(frame_count=-1),
                                     dict(pixel_format="YUV")])
    def test_invariants(self, tmp_path, bad):
        _write_manifest(None, tmp_path, **bad)
        with pytest.raises(ValueError):
            load_manifest(tmp_path / "meta.json")


class TestPnm:
    @pytest.mark.parametrize("shape", [(24, 32, 3), (24, 32)])
    def test_round_trip_bit_exact(self, tmp_path, shape):
        rng = np.random.default_rng(0)
        data = rng.integers(0, 256, size=shape, dtype=np.uint8)
        path = tmp_path / ("f.ppm" if len(shape) == 3 else "f.pgm")
        write_pnm(path, data)
        assert np.array_equal(read_pnm(path), data)

    def test_comment_in_header(self, tmp_path):
        path = tmp_path / "f.pgm"
        payload = bytes(range(16))
        path.write_bytes(b"P5\n# a comment\n4 4\n255\n" + payload)
        assert read_pnm(path).tobytes() == payload

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "f.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + b"\0" * 15)
        with pytest.raises(ValueError, match="size mismatch"):
            read_pnm(path)


class TestOpenSource:
    def _make_dir_source(self, tmp_path, n=3, w=32, h=24):
        rng = np.random.default_rng(1)
        frames = [rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8) for _ in range(n)]
        for i, f in enumerate(frames):
            write_pnm(tmp_path / f"frame_{i:06d}.ppm", f)
        _write_manifest(None, tmp_path, width=w, height=h, frame_count=n)
        return frames

    def test_image_dir(self, tmp_path):
        frames = self._make_dir_source(tmp_path)
        meta, stream = open_source(tmp_path)
        decoded = list(stream)
        assert meta.fps == 30.0
        assert [f.index for f in decoded] == [0, 1, 2]
        for got, want in zip(decoded, frames):
            assert np.array_equal(got.data, want)

    def test_non_contiguous_indices(self, tmp_path):
        self._make_dir_source(tmp_path)
        (tmp_path / "frame_000001.ppm").rename(tmp_path / "frame_000005.ppm")
        with pytest.raises(ValueError, match="non-contiguous"):
            open_source(tmp_path)

    def test_frame_size_mismatch(self, tmp_path):
        self._make_dir_source(tmp_path)
        write_pnm(tmp_path / "frame_000001.ppm", np.zeros((8, 8, 3), dtype=np.uint8))
        meta, stream = open_source(tmp_path)
        with pytest.raises(ValueError, match="size mismatch"):
            list(stream)

    def test_raw_size_mismatch(self, tmp_path):
        _write_manifest(None, tmp_path, pixel_format="RGB24", frame_count=3)
        (tmp_path / "v.rgb24").write_bytes(b"\0" * (32 * 24 * 3 * 3 - 1))
        with pytest.raises(ValueError, match="size mismatch"):
            open_source(tmp_path / "v.rgb24")

    def test_raw_format_mismatch(self, tmp_path):
        _write_manifest(None, tmp_path, pixel_format="RGB24", frame_count=1)
        (tmp_path / "v.gray8").write_bytes(b"\0" * (32 * 24))
        with pytest.raises(ValueError, match="does not match"):
            open_source(tmp_path / "v.gray8")

    def test_raw_round_trip(self, tmp_path):
        rng = np.random.default_rng(2)
        frames = rng.integers(0, 256, size=(4, 24, 32), dtype=np.uint8)
        _write_manifest(None, tmp_path, pixel_format="GRAY8", frame_count=4)
        (tmp_path / "v.gray8").write_bytes(frames.tobytes())
        meta, stream = open_source(tmp_path / "v.gray8")
        for i, f in enumerate(stream):
            assert f.index == i
            assert np.array_equal(f.data, frames[i])

    def test_sixty_seconds_at_thirty_fps_is_1800_frames(self, tmp_path):
        w, h, n = 16, 16, 1800
        _write_manifest(None, tmp_path, width=w, height=h, pixel_format="GRAY8", frame_count=n)
        (tmp_path / "v.gray8").write_bytes(b"\x7f" * (w * h * n))
        meta, stream = open_source(tmp_path / "v.gray8")
        assert meta.frame_count == 1800
        assert sum(1 for _ in stream) == 1800


class TestSynthRoundTrip:
    """Writing a synthetic stream and reading it back is bit-identical."""

    @pytest.mark.parametrize("container", ["raw", "images"])
    def test_round_trip(self, tmp_path, container):
        from rrvision.synth import SynthConfig, _Scene

        ds = make_recording(
            tmp_path / "rec", duration_s=1.0, container=container, texture_seed=5
        )
        scene = _Scene(
            SynthConfig(
                width=160, height=120, fps=30.0, duration_s=1.0,
                rr_segments=[(0.0, 15.0)], noise_sigma=2.0, pixel_format="GRAY8",
                container=container, texture_seed=5,
            )
        )
        _, stream = open_source(ds.video_path)
        for frame in stream:
            assert np.array_equal(frame.data, scene.render_quantized(frame.index))


def _meta(w=4, h=3, fmt="RGB24"):
    return VideoMeta(max(16, w), max(16, h), 30.0, 1, fmt)


class TestGrayscale:
    def test_channel_mean(self):
        data = np.zeros((16, 16, 3), dtype=np.uint8)
        data[0, 0] = (30, 60, 90)
        frame = FrameBuffer(0, data, _meta(16, 16))
        assert to_grayscale(frame).data[0, 0] == 60.0

    def test_gray_identity(self):
        data = np.arange(256, dtype=np.uint8).reshape(16, 16)
        frame = FrameBuffer(0, data, _meta(16, 16, "GRAY8"))
        assert np.array_equal(to_grayscale(frame).data, data.astype(np.float64))

    def test_matches_per_pixel_oracle(self):
        rng = np.random.default_rng(3)
        data = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
        got = to_grayscale(FrameBuffer(0, data, _meta(16, 16))).data
        # brute-force per-pixel mean
        for y in range(16):
            for x in range(16):
                want = (int(data[y, x, 0]) + int(data[y, x, 1]) + int(data[y, x, 2])) / 3.0
                assert got[y, x] == pytest.approx(want, abs=1e-12)

    @settings(max_examples=25)
    @given(st.integers(0, 2**31 - 1))
    def test_idempotent(self, seed):
        rng = np.random.default_rng(seed)
        data = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
        once = to_grayscale(FrameBuffer(0, data, _meta(16, 16)))
        twice = to_grayscale(once)
        assert np.array_equal(once.data, twice.data)
