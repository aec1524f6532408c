"""Deterministic synthetic breathing videos with exact ground truth.

The scene is a column-wise 1D world: a static random horizontal-band
texture fills the frame, and a "chest" occupies a horizontal span whose
content sits below a strong horizontal boundary edge. The boundary (and the
chest texture rigidly attached to it) moves vertically as
``amplitude_px * sin(phase(t))`` where the phase integrates the configured
breathing-rate segments, so the rate is phase-continuous across segment
switches. Rows near the boundary's travel range are kept textureless so the
moving edge is the only structure there.

Rendering is sub-pixel: the pixel the boundary crosses mixes background and
chest intensity by coverage, and chest rows are sampled with linear
interpolation at the fractional displacement. Integer-pixel motion at small
amplitudes would produce staircase signals that flatter the method.

Optional stressors map one-to-one onto pipeline stages: per-pixel Gaussian
noise (selection), linear illumination drift (detrending), an instantaneous
vertical content jump (ROI re-estimation and stitching), and random-walk
intensity rows (grouping).

Output is exactly what the ingest module reads (raw file or PPM/PGM
sequence plus ``meta.json``) together with ``ground_truth.csv``
(``t,rr_bpm``) and a landmark CSV consistent with the rendered geometry.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import RoiGeometryConfig
from .ingest import GRAY8, RGB24, VideoMeta, write_manifest, write_pnm
from .roi import LandmarkSet, RoiRect, roi_from_landmarks, write_landmark_track

RR_FLOOR, RR_CEIL = 6.0, 45.0

_BASE_LEVEL = 150.0
_TEMPLATE_PAD = 16  # head-room rows revealed by a downward content jump


@dataclass
class SynthConfig:
    width: int = 160
    height: int = 120
    fps: float = 30.0
    duration_s: float = 60.0
    rr_segments: list[tuple[float, float]] = field(default_factory=lambda: [(0.0, 15.0)])
    amplitude_px: float = 2.0
    noise_sigma: float = 2.0
    illum_drift: float = 0.0  # intensity units per second
    texture_seed: int = 0
    roi_jump_at_s: float | None = None
    # scene-shaping knobs
    pixel_format: str = RGB24
    container: str = "raw"  # "raw" | "images"
    chest_width_frac: float = 0.5  # chest span as a fraction of the ROI width
    band_px: int = 5
    band_contrast: float = 60.0
    chest_contrast: float = 100.0
    quiet_margin_px: int = 6
    jump_dy_px: int = 6
    walk_row_frac: float = 0.0
    walk_amplitude: float = 0.0  # target std of the walk over a 20 s window

    def validate(self) -> None:
        if self.width < 16 or self.height < 16:
            raise ValueError("frame must be at least 16x16")
        if self.fps <= 0 or self.duration_s <= 0:
            raise ValueError("fps and duration_s must be positive")
        if not self.rr_segments:
            raise ValueError("need at least one rr segment")
        starts = [s for s, _ in self.rr_segments]
        if starts[0] != 0 or any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("rr_segments must start at 0 and be strictly increasing")
        for _, rr in self.rr_segments:
            if not RR_FLOOR <= rr <= RR_CEIL:
                raise ValueError(f"rr {rr} outside [{RR_FLOOR}, {RR_CEIL}] BPM")
        if self.amplitude_px < 0:
            raise ValueError("amplitude_px must be >= 0")
        if self.pixel_format not in (RGB24, GRAY8):
            raise ValueError(f"unknown pixel_format {self.pixel_format!r}")
        if self.container not in ("raw", "images"):
            raise ValueError(f"unknown container {self.container!r}")
        if not 0 < self.chest_width_frac <= 1:
            raise ValueError("chest_width_frac must be in (0, 1]")

    @property
    def frame_count(self) -> int:
        return int(round(self.duration_s * self.fps))

    def rr_at(self, t: float) -> float:
        rr = self.rr_segments[0][1]
        for start, value in self.rr_segments:
            if t >= start:
                rr = value
        return rr

    def phase_at(self, t: float) -> float:
        """Accumulated breathing phase in radians (continuous across segments)."""
        phase = 0.0
        for i, (start, rr) in enumerate(self.rr_segments):
            end = self.rr_segments[i + 1][0] if i + 1 < len(self.rr_segments) else math.inf
            if t <= start:
                break
            phase += 2 * math.pi * (rr / 60.0) * (min(t, end) - start)
        return phase


@dataclass
class SceneGeometry:
    landmarks: LandmarkSet
    roi: RoiRect
    boundary_y: int  # nominal chest-boundary row
    chest_x0: int
    chest_x1: int
    quiet_half: int  # textureless half-height around the boundary


@dataclass
class SynthDataset:
    out_dir: Path
    video_path: Path  # raw file, or the directory itself for image sequences
    ground_truth_path: Path
    landmarks_path: Path
    meta: VideoMeta
    geometry: SceneGeometry


def scene_geometry(cfg: SynthConfig) -> SceneGeometry:
    """Face landmarks and derived chest layout for a config's frame size."""
    wf = round(cfg.width / 4)
    mid_x = cfg.width // 2
    chin_y = round(cfg.height * 0.25)
    ear_y = max(2, chin_y - round(0.3 * wf))
    lm = LandmarkSet(
        frame_index=0,
        chin=(float(mid_x), float(chin_y)),
        left_ear=(mid_x - wf / 2.0, float(ear_y)),
        right_ear=(mid_x + wf / 2.0, float(ear_y)),
    )
    meta = VideoMeta(
        width=cfg.width,
        height=cfg.height,
        fps=cfg.fps,
        frame_count=cfg.frame_count,
        pixel_format=cfg.pixel_format,
    )
    roi = roi_from_landmarks(lm, meta, RoiGeometryConfig())
    boundary_y = roi.y + round(0.45 * roi.h)
    cw = max(4, round(cfg.chest_width_frac * roi.w))
    chest_x0 = mid_x - cw // 2
    chest_x1 = chest_x0 + cw
    quiet_half = math.ceil(cfg.amplitude_px) + cfg.quiet_margin_px
    return SceneGeometry(lm, roi, boundary_y, chest_x0, chest_x1, quiet_half)


class _Scene:
    """Precomputed textures and per-frame column rendering."""

    def __init__(self, cfg: SynthConfig):
        cfg.validate()
        self.cfg = cfg
        self.geom = scene_geometry(cfg)
        rng = np.random.default_rng([cfg.texture_seed, 0])
        h = cfg.height

        # static background template with textureless rows near the boundary;
        # band levels alternate sign so every band boundary is a strong edge
        n_ext = h + _TEMPLATE_PAD
        ext = self._band_texture(rng, n_ext, _BASE_LEVEL, cfg.band_contrast)
        y_ext = np.arange(n_ext) - _TEMPLATE_PAD
        quiet = np.abs(y_ext - self.geom.boundary_y) <= self.geom.quiet_half
        ext[quiet] = _BASE_LEVEL
        self._static_ext = ext

        # chest: flat dark, so the boundary step is the only moving edge and
        # every motion signal is a monotone function of the displacement
        # (mixed-polarity moving edges would let opposite-phase pulse rows
        # average into clean frequency-doubled waves)
        chest_dark = float(np.clip(_BASE_LEVEL - cfg.chest_contrast, 5, 250))
        self._chest = np.full(2 * h, chest_dark, dtype=np.float64)
        self._chest_pos = np.arange(2 * h, dtype=np.float64)

        self.jump_frame = (
            None if cfg.roi_jump_at_s is None else int(round(cfg.roi_jump_at_s * cfg.fps))
        )

        # random-walk rows live in the static texture inside the ROI
        self.walk_rows: np.ndarray = np.empty(0, dtype=np.int64)
        self._walk_paths: np.ndarray | None = None
        n_walk = int(round(cfg.walk_row_frac * self.geom.roi.h))
        if n_walk > 0 and cfg.walk_amplitude > 0:
            roi = self.geom.roi
            rows = np.arange(roi.y, roi.y + roi.h)
            eligible = rows[np.abs(rows - self.geom.boundary_y) > self.geom.quiet_half + 1]
            walk_rng = np.random.default_rng([cfg.texture_seed, 1])
            self.walk_rows = np.sort(walk_rng.choice(eligible, size=n_walk, replace=False))
            m = round(20.0 * cfg.fps)
            step = cfg.walk_amplitude * math.sqrt(3.0 / m)
            incr = walk_rng.normal(0.0, step, size=(n_walk, cfg.frame_count))
            self._walk_paths = np.cumsum(incr, axis=1)

    def _band_texture(
        self, rng: np.random.Generator, n: int, base: float, contrast: float
    ) -> np.ndarray:
        n_bands = n // self.cfg.band_px + 2
        signs = np.where(np.arange(n_bands) % 2 == 0, 1.0, -1.0)
        levels = base + signs * rng.uniform(0.6, 1.0, size=n_bands) * contrast
        return np.clip(levels, 5, 250)[np.arange(n) // self.cfg.band_px]

    def displacement(self, frame_index: int) -> float:
        t = frame_index / self.cfg.fps
        return self.cfg.amplitude_px * math.sin(self.cfg.phase_at(t))

    def _jumped(self, frame_index: int) -> bool:
        return self.jump_frame is not None and frame_index >= self.jump_frame

    def boundary_at(self, frame_index: int) -> float:
        dy = self.cfg.jump_dy_px if self._jumped(frame_index) else 0
        return self.geom.boundary_y + dy + self.displacement(frame_index)

    def render(self, frame_index: int) -> np.ndarray:
        """One grayscale frame as float64 (h, w), before quantization."""
        cfg = self.cfg
        h, w = cfg.height, cfg.width
        dy = cfg.jump_dy_px if self._jumped(frame_index) else 0
        static = self._static_ext[_TEMPLATE_PAD - dy : _TEMPLATE_PAD - dy + h]

        b = self.boundary_at(frame_index)
        y = np.arange(h, dtype=np.float64)
        chest_val = np.interp(y - b, self._chest_pos, self._chest)
        alpha = np.clip(b - (y - 0.5), 0.0, 1.0)  # background coverage per pixel
        chest_col = alpha * static + (1.0 - alpha) * chest_val

        frame = np.empty((h, w), dtype=np.float64)
        frame[:, :] = static[:, None]
        frame[:, self.geom.chest_x0 : self.geom.chest_x1] = chest_col[:, None]

        if self._walk_paths is not None:
            rows = np.clip(self.walk_rows + dy, 0, h - 1)
            frame[rows, :] += self._walk_paths[:, frame_index][:, None]

        if cfg.illum_drift:
            frame += cfg.illum_drift * (frame_index / cfg.fps)

        if cfg.noise_sigma > 0:
            rng = np.random.default_rng([cfg.texture_seed, 2, frame_index])
            frame = frame + rng.normal(0.0, cfg.noise_sigma, size=(h, w))

        return frame

    def render_quantized(self, frame_index: int) -> np.ndarray:
        """uint8 frame; RGB24 repeats the plane so channel averaging is exact."""
        plane = np.floor(np.clip(self.render(frame_index), 0, 255) + 0.5).astype(np.uint8)
        if self.cfg.pixel_format == RGB24:
            return np.repeat(plane[:, :, None], 3, axis=2)
        return plane


def generate(cfg: SynthConfig, out_path) -> SynthDataset:
    """Render a recording to disk: frames, manifest, ground truth, landmarks."""
    cfg.validate()
    out_dir = Path(out_path)
    if out_dir.exists() and any(out_dir.iterdir()):
        raise ValueError(f"output path {out_dir} exists and is not empty")
    out_dir.mkdir(parents=True, exist_ok=True)

    scene = _Scene(cfg)
    meta = VideoMeta(
        width=cfg.width,
        height=cfg.height,
        fps=cfg.fps,
        frame_count=cfg.frame_count,
        pixel_format=cfg.pixel_format,
    )
    write_manifest(out_dir / "meta.json", meta)

    if cfg.container == "raw":
        ext = ".rgb24" if cfg.pixel_format == RGB24 else ".gray8"
        video_path = out_dir / f"video{ext}"
        with open(video_path, "wb") as fh:
            for i in range(cfg.frame_count):
                fh.write(scene.render_quantized(i).tobytes())
    else:
        video_path = out_dir
        frame_ext = "ppm" if cfg.pixel_format == RGB24 else "pgm"
        for i in range(cfg.frame_count):
            write_pnm(out_dir / f"frame_{i:06d}.{frame_ext}", scene.render_quantized(i))

    gt_path = out_dir / "ground_truth.csv"
    with open(gt_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "rr_bpm"])
        for start, rr in cfg.rr_segments:
            writer.writerow([start, rr])

    lm_path = out_dir / "landmarks.csv"
    records = [scene.geom.landmarks]
    if scene.jump_frame is not None and 0 < scene.jump_frame < cfg.frame_count:
        lm0 = scene.geom.landmarks
        dy = float(cfg.jump_dy_px)
        records.append(
            LandmarkSet(
                frame_index=scene.jump_frame,
                chin=(lm0.chin[0], lm0.chin[1] + dy),
                left_ear=(lm0.left_ear[0], lm0.left_ear[1] + dy),
                right_ear=(lm0.right_ear[0], lm0.right_ear[1] + dy),
            )
        )
    write_landmark_track(lm_path, records)

    return SynthDataset(
        out_dir=out_dir,
        video_path=video_path,
        ground_truth_path=gt_path,
        landmarks_path=lm_path,
        meta=meta,
        geometry=scene.geom,
    )
