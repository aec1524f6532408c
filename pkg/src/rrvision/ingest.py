"""Frame sources: image-sequence and raw-file readers with a JSON manifest.

Two on-disk layouts are supported, both bit-exact and codec-free:

* a directory of binary PPM (RGB24) or PGM (GRAY8) files named
  ``frame_%06d.ppm`` / ``frame_%06d.pgm`` together with a ``meta.json``
  manifest, or
* a single headerless raw file (``.rgb24`` / ``.gray8``, frame-major,
  row-major, channel-interleaved) with a sibling ``meta.json``.

The manifest is a UTF-8 JSON object with keys exactly
``{"width", "height", "fps", "frame_count", "pixel_format"}``.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

RGB24 = "RGB24"
GRAY8 = "GRAY8"

MANIFEST_NAME = "meta.json"
_MANIFEST_KEYS = {"width", "height", "fps", "frame_count", "pixel_format"}
_FRAME_RE = re.compile(r"^frame_(\d{6})\.(ppm|pgm)$")


@dataclass(frozen=True)
class VideoMeta:
    width: int
    height: int
    fps: float
    frame_count: int
    pixel_format: str

    def __post_init__(self):
        if self.width < 16 or self.height < 16:
            raise ValueError("frame dimensions must be at least 16x16")
        if not self.fps > 0:
            raise ValueError("fps must be positive")
        if self.frame_count < 0:
            raise ValueError("frame_count must be >= 0")
        if self.pixel_format not in (RGB24, GRAY8):
            raise ValueError(f"unknown pixel_format {self.pixel_format!r}")

    @property
    def channels(self) -> int:
        return 3 if self.pixel_format == RGB24 else 1

    @property
    def frame_bytes(self) -> int:
        return self.width * self.height * self.channels


@dataclass
class FrameBuffer:
    """One decoded frame; data is row-major, shape (h, w, 3) or (h, w)."""

    index: int
    data: np.ndarray
    meta: VideoMeta


def load_manifest(path: Path) -> VideoMeta:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"missing manifest {path}")
    with open(path, "r", encoding="utf-8") as fh:
        d = json.load(fh)
    if set(d) != _MANIFEST_KEYS:
        raise ValueError(
            f"manifest keys must be exactly {sorted(_MANIFEST_KEYS)}, got {sorted(d)}"
        )
    return VideoMeta(
        width=int(d["width"]),
        height=int(d["height"]),
        fps=float(d["fps"]),
        frame_count=int(d["frame_count"]),
        pixel_format=str(d["pixel_format"]),
    )


def write_manifest(path: Path, meta: VideoMeta) -> None:
    d = dataclasses.asdict(meta)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(d, fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- PPM / PGM (binary, maxval 255) ---------------------------------------


def _read_pnm_header(fh) -> tuple[str, int, int]:
    """Parse magic / width / height / maxval, tolerating comments."""
    magic = fh.read(2)
    if magic not in (b"P5", b"P6"):
        raise ValueError(f"not a binary PGM/PPM file (magic {magic!r})")

    def next_token() -> bytes:
        tok = b""
        while True:
            c = fh.read(1)
            if c == b"":
                raise ValueError("truncated PNM header")
            if c == b"#":  # comment runs to end of line
                while c not in (b"\n", b""):
                    c = fh.read(1)
                continue
            if c.isspace():
                if tok:
                    return tok
                continue
            tok += c

    width = int(next_token())
    height = int(next_token())
    maxval = int(next_token())
    if maxval != 255:
        raise ValueError(f"only maxval 255 is supported, got {maxval}")
    return magic.decode(), width, height


def read_pnm(path: Path) -> np.ndarray:
    """Read a binary PPM (P6) or PGM (P5); returns uint8 (h,w,3) or (h,w)."""
    with open(path, "rb") as fh:
        magic, width, height = _read_pnm_header(fh)
        channels = 3 if magic == "P6" else 1
        payload = fh.read(width * height * channels + 1)
    if len(payload) != width * height * channels:
        raise ValueError(f"size mismatch in {path.name}")
    arr = np.frombuffer(payload, dtype=np.uint8)
    if channels == 3:
        return arr.reshape(height, width, 3)
    return arr.reshape(height, width)


def write_pnm(path: Path, data: np.ndarray) -> None:
    """Write uint8 (h,w,3) as PPM or (h,w) as PGM."""
    if data.dtype != np.uint8:
        raise ValueError("PNM writer expects uint8 samples")
    if data.ndim == 3 and data.shape[2] == 3:
        magic = b"P6"
        h, w = data.shape[:2]
    elif data.ndim == 2:
        magic = b"P5"
        h, w = data.shape
    else:
        raise ValueError(f"unsupported sample shape {data.shape}")
    with open(path, "wb") as fh:
        fh.write(magic + b"\n%d %d\n255\n" % (w, h))
        fh.write(data.tobytes())


# --- sources ----------------------------------------------------------------


def open_source(path) -> tuple[VideoMeta, Iterator[FrameBuffer]]:
    """Open a frame source, returning its metadata and a frame iterator.

    ``path`` may be a directory of PPM/PGM frames plus a manifest, or a raw
    ``.rgb24`` / ``.gray8`` file with a sibling manifest. Frames are yielded
    in ascending index order and the stream ends exactly at ``frame_count``.
    The iterator is single-consumer.
    """
    path = Path(path)
    if path.is_dir():
        return _open_image_dir(path)
    if path.suffix in (".rgb24", ".gray8"):
        return _open_raw(path)
    raise ValueError(f"unsupported source {path} (expected directory or .rgb24/.gray8)")


def _open_image_dir(dirpath: Path) -> tuple[VideoMeta, Iterator[FrameBuffer]]:
    meta = load_manifest(dirpath / MANIFEST_NAME)
    ext = "ppm" if meta.pixel_format == RGB24 else "pgm"
    indices = sorted(
        int(m.group(1))
        for p in dirpath.iterdir()
        if (m := _FRAME_RE.match(p.name)) and m.group(2) == ext
    )
    if indices != list(range(meta.frame_count)):
        raise ValueError(
            f"non-contiguous frame indices in {dirpath}: "
            f"found {len(indices)} frames, manifest says {meta.frame_count}"
        )

    def frames() -> Iterator[FrameBuffer]:
        for i in range(meta.frame_count):
            data = read_pnm(dirpath / f"frame_{i:06d}.{ext}")
            if data.shape[0] != meta.height or data.shape[1] != meta.width:
                raise ValueError(f"manifest/frame size mismatch at frame {i}")
            yield FrameBuffer(index=i, data=data, meta=meta)

    return meta, frames()


def _open_raw(filepath: Path) -> tuple[VideoMeta, Iterator[FrameBuffer]]:
    meta = load_manifest(filepath.parent / MANIFEST_NAME)
    expected_fmt = RGB24 if filepath.suffix == ".rgb24" else GRAY8
    if meta.pixel_format != expected_fmt:
        raise ValueError(
            f"manifest pixel_format {meta.pixel_format} does not match {filepath.suffix}"
        )
    actual = filepath.stat().st_size
    expected = meta.frame_bytes * meta.frame_count
    if actual != expected:
        raise ValueError(f"size mismatch: {filepath.name} has {actual} bytes, expected {expected}")

    def frames() -> Iterator[FrameBuffer]:
        shape = (
            (meta.height, meta.width, 3)
            if meta.pixel_format == RGB24
            else (meta.height, meta.width)
        )
        with open(filepath, "rb") as fh:
            for i in range(meta.frame_count):
                chunk = fh.read(meta.frame_bytes)
                if len(chunk) != meta.frame_bytes:
                    raise ValueError(f"size mismatch reading frame {i}")
                yield FrameBuffer(
                    index=i, data=np.frombuffer(chunk, dtype=np.uint8).reshape(shape), meta=meta
                )

    return meta, frames()


def to_grayscale(frame: FrameBuffer) -> FrameBuffer:
    """Average the RGB channels into one real-valued plane.

    Equal channel weights; GRAY8 input passes through unchanged apart from
    the float conversion. No rounding happens here so downstream row
    averages see full precision.
    """
    data = frame.data
    if data.ndim == 3:
        gray = data.astype(np.float64).mean(axis=2)
    else:
        gray = data.astype(np.float64)
    meta = frame.meta
    if meta.pixel_format != GRAY8:
        meta = dataclasses.replace(meta, pixel_format=GRAY8)
    return FrameBuffer(index=frame.index, data=gray, meta=meta)
