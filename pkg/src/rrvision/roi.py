"""Chest ROI derivation from facial landmarks, or from an explicit rectangle.

Landmarks (chin, left ear, right ear) come from a sidecar CSV; no face
detector is embedded. The chest box is placed below the chin, sized
relative to the ear-to-ear face width by three geometry constants.
"""

from __future__ import annotations

import csv
import math
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path

from .config import RoiGeometryConfig
from .ingest import VideoMeta

LANDMARK_HEADER = ["frame", "chin_x", "chin_y", "lear_x", "lear_y", "rear_x", "rear_y"]

MIN_ROI_SIDE = 8


@dataclass(frozen=True)
class LandmarkSet:
    frame_index: int
    chin: tuple[float, float]
    left_ear: tuple[float, float]
    right_ear: tuple[float, float]

    def __post_init__(self):
        for x, y in (self.chin, self.left_ear, self.right_ear):
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError("landmark coordinates must be finite")


@dataclass(frozen=True)
class RoiRect:
    """Pixel rectangle, top-left origin."""

    x: int
    y: int
    w: int
    h: int

    def clamped(self, meta: VideoMeta) -> "RoiRect":
        x0 = max(self.x, 0)
        y0 = max(self.y, 0)
        x1 = min(self.x + self.w, meta.width)
        y1 = min(self.y + self.h, meta.height)
        if x1 - x0 < MIN_ROI_SIDE or y1 - y0 < MIN_ROI_SIDE:
            raise ValueError(
                f"ROI smaller than {MIN_ROI_SIDE}x{MIN_ROI_SIDE} after clamping to frame"
            )
        return RoiRect(x0, y0, x1 - x0, y1 - y0)

    def crop(self, plane):
        return plane[self.y : self.y + self.h, self.x : self.x + self.w]


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def roi_span(lm: LandmarkSet, geometry: RoiGeometryConfig) -> tuple[float, float, float, float]:
    """Un-clamped, un-rounded chest box as (x0, y0, x1, y1)."""
    wf = abs(lm.right_ear[0] - lm.left_ear[0])
    if wf == 0:
        raise ValueError("degenerate landmarks: ears share the same x coordinate")
    mid_x = (lm.left_ear[0] + lm.right_ear[0]) / 2.0
    x0 = mid_x - geometry.k_w * wf
    x1 = mid_x + geometry.k_w * wf
    y0 = lm.chin[1] + geometry.k_top * wf
    y1 = y0 + geometry.k_h * wf
    return x0, y0, x1, y1


def roi_from_landmarks(
    lm: LandmarkSet, meta: VideoMeta, geometry: RoiGeometryConfig | None = None
) -> RoiRect:
    """Chest rectangle from landmarks: round half-up to pixels, then clamp."""
    geometry = geometry or RoiGeometryConfig()
    x0, y0, x1, y1 = roi_span(lm, geometry)
    xi0, yi0 = _round_half_up(x0), _round_half_up(y0)
    xi1, yi1 = _round_half_up(x1), _round_half_up(y1)
    return RoiRect(xi0, yi0, xi1 - xi0, yi1 - yi0).clamped(meta)


class LandmarkTrack:
    """Time-indexed landmark records with step-hold lookup."""

    def __init__(self, records: list[LandmarkSet]):
        if not records:
            raise ValueError("empty landmark track")
        frames = [r.frame_index for r in records]
        if any(b <= a for a, b in zip(frames, frames[1:])):
            raise ValueError("landmark frames must be strictly increasing")
        self._records = records
        self._frames = frames

    def lookup(self, frame_index: int) -> LandmarkSet:
        """Record with the greatest frame <= frame_index."""
        i = bisect_right(self._frames, frame_index)
        if i == 0:
            raise ValueError(f"no landmarks yet at frame {frame_index}")
        return self._records[i - 1]

    def __len__(self) -> int:
        return len(self._records)


def load_landmark_track(path) -> LandmarkTrack:
    """Load a landmark CSV (header: frame,chin_x,chin_y,lear_x,lear_y,rear_x,rear_y)."""
    path = Path(path)
    records = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"empty landmark file {path}")
        if [h.strip() for h in header] != LANDMARK_HEADER:
            raise ValueError(f"bad landmark header {header} in {path}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 7:
                raise ValueError(f"malformed landmark row at {path}:{lineno}")
            try:
                frame = int(row[0])
                vals = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise ValueError(f"malformed landmark row at {path}:{lineno}") from exc
            records.append(
                LandmarkSet(
                    frame_index=frame,
                    chin=(vals[0], vals[1]),
                    left_ear=(vals[2], vals[3]),
                    right_ear=(vals[4], vals[5]),
                )
            )
    return LandmarkTrack(records)


def write_landmark_track(path, records: list[LandmarkSet]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LANDMARK_HEADER)
        for r in records:
            writer.writerow(
                [
                    r.frame_index,
                    r.chin[0],
                    r.chin[1],
                    r.left_ear[0],
                    r.left_ear[1],
                    r.right_ear[0],
                    r.right_ear[1],
                ]
            )
