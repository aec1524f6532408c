"""Streaming pipeline: frames in, one RR prediction per step out.

Per frame: grayscale, (at epoch starts) ROI + edge-mask re-estimation,
profile extraction, window push. Whenever the window emits a snapshot the
breathing analysis runs on it and a prediction is yielded. Wall time is
recorded per stage so the CLI can report and tests can assert the real-time
contract: profile extraction plus window push must fit within a frame
period, and one window analysis within a step.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .breathing import RRPrediction, analyze_window
from .config import RunConfig
from .edges import canny, dilate
from .ingest import open_source, to_grayscale
from .profile import EDGES, extract_profile
from .roi import LandmarkTrack, RoiRect, load_landmark_track, roi_from_landmarks
from .window import MotionBuffer, schedule_reestimation


@dataclass
class StageTimings:
    """Per-stage wall times in seconds, one entry per frame/window."""

    profile_push: list[float] = field(default_factory=list)
    analysis: list[float] = field(default_factory=list)
    frame_total: list[float] = field(default_factory=list)

    @staticmethod
    def _stats(samples: list[float]) -> dict:
        if not samples:
            return {"n": 0, "p50_ms": None, "p99_ms": None, "max_ms": None}
        arr = np.asarray(samples) * 1000.0
        return {
            "n": len(samples),
            "p50_ms": float(np.percentile(arr, 50)),
            "p99_ms": float(np.percentile(arr, 99)),
            "max_ms": float(arr.max()),
        }

    def summary(self) -> dict:
        return {
            "frame_profile_push": self._stats(self.profile_push),
            "window_analysis": self._stats(self.analysis),
            "frame_total": self._stats(self.frame_total),
        }


def run_stream(
    video_path,
    cfg: RunConfig,
    landmarks_path=None,
    timings: Optional[StageTimings] = None,
) -> Iterator[RRPrediction]:
    """Run the full pipeline over a recording, yielding predictions in order.

    The ROI comes from cfg.fixed_roi when set, otherwise from the landmark
    CSV (required, with a record at or before frame 0).
    """
    cfg.validate()
    meta, frames = open_source(video_path)

    track: Optional[LandmarkTrack] = None
    if cfg.fixed_roi is None:
        if landmarks_path is None:
            raise ValueError("need either fixed_roi or a landmark file")
        track = load_landmark_track(landmarks_path)

    buffer = MotionBuffer(cfg.canonical_len, meta.fps, cfg.schedule)
    epoch = -1
    roi_rect: Optional[RoiRect] = None
    mask = None

    for frame in frames:
        t_start = time.perf_counter()
        gray = to_grayscale(frame).data

        if schedule_reestimation(frame.index, meta.fps, cfg.schedule.reest_s):
            epoch += 1
            if cfg.fixed_roi is not None:
                roi_rect = RoiRect(*cfg.fixed_roi).clamped(meta)
            else:
                roi_rect = roi_from_landmarks(track.lookup(frame.index), meta, cfg.geometry)
            if cfg.profile_mode == EDGES:
                mask = dilate(canny(roi_rect.crop(gray), cfg.canny), cfg.canny.dilation_radius)

        t_profile = time.perf_counter()
        p = extract_profile(
            roi_rect.crop(gray), cfg.profile_mode, cfg.canonical_len, mask=mask, epoch=epoch
        )
        event = buffer.push_profile(p, frame.index)
        t_push = time.perf_counter()

        prediction = None
        if event is not None:
            prediction = analyze_window(event, cfg.breathing)
            t_analysis = time.perf_counter()
            if timings is not None:
                timings.analysis.append(t_analysis - t_push)

        if timings is not None:
            timings.profile_push.append(t_push - t_profile)
            timings.frame_total.append(t_push - t_start)

        if prediction is not None:
            yield prediction


def run_recording(video_path, cfg: RunConfig, landmarks_path=None) -> list[RRPrediction]:
    """Collect all predictions for a recording."""
    return list(run_stream(video_path, cfg, landmarks_path=landmarks_path))
