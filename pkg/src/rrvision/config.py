"""Configuration dataclasses and JSON config-file handling.

A run is fully described by a RunConfig. Every field has a default; a JSON
config file overrides defaults, and CLI flags override the config file.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Optional


@dataclass
class ScheduleConfig:
    """Sliding-window timing, all in seconds."""

    window_s: float = 20.0
    step_s: float = 1.0
    reest_s: float = 20.0

    def validate(self) -> None:
        if self.window_s < 2 * self.step_s:
            raise ValueError("window_s must be at least 2*step_s")
        if self.reest_s <= 0:
            raise ValueError("reest_s must be positive")


@dataclass
class CannyConfig:
    """Edge detector parameters (thresholds on the raw Sobel magnitude scale)."""

    sigma: float = 1.4
    low: float = 50.0
    high: float = 100.0
    dilation_radius: int = 2

    def validate(self) -> None:
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not self.low < self.high:
            raise ValueError("canny low threshold must be below high")
        if self.dilation_radius < 0:
            raise ValueError("dilation_radius must be >= 0")


@dataclass
class RoiGeometryConfig:
    """Chest-box geometry relative to the face width (ear-to-ear distance)."""

    k_w: float = 1.0
    k_top: float = 0.5
    k_h: float = 1.5


@dataclass
class BreathingConfig:
    """Signal selection, grouping and peak-analysis parameters."""

    top_frac: float = 0.30
    group_frac: float = 0.05
    smooth_s: float = 0.4
    rr_min: float = 6.0
    rr_max: float = 45.0
    prominence_factor: float = 0.3
    min_peaks: int = 3
    cycles_per_peak: float = 1.0

    def n_groups(self) -> int:
        g = self.top_frac / self.group_frac
        if abs(g - round(g)) > 1e-9:
            raise ValueError("group_frac must divide top_frac into an integer group count")
        return int(round(g))

    def validate(self) -> None:
        if not 0 < self.group_frac <= self.top_frac <= 1:
            raise ValueError("need 0 < group_frac <= top_frac <= 1")
        self.n_groups()
        if not self.rr_min < self.rr_max:
            raise ValueError("rr_min must be below rr_max")
        if self.min_peaks < 2:
            raise ValueError("min_peaks must be >= 2")
        if self.cycles_per_peak <= 0:
            raise ValueError("cycles_per_peak must be positive")


@dataclass
class RunConfig:
    """Union of all pipeline settings for one run."""

    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    canny: CannyConfig = field(default_factory=CannyConfig)
    geometry: RoiGeometryConfig = field(default_factory=RoiGeometryConfig)
    breathing: BreathingConfig = field(default_factory=BreathingConfig)
    profile_mode: str = "edges"  # "edges" | "full_roi"
    canonical_len: int = 100
    fixed_roi: Optional[tuple[int, int, int, int]] = None

    def validate(self) -> None:
        self.schedule.validate()
        self.canny.validate()
        self.breathing.validate()
        if self.profile_mode not in ("edges", "full_roi"):
            raise ValueError(f"unknown profile_mode {self.profile_mode!r}")
        if self.canonical_len < 2:
            raise ValueError("canonical_len must be >= 2")
        if self.fixed_roi is not None:
            x, y, w, h = self.fixed_roi
            if w < 8 or h < 8:
                raise ValueError("fixed_roi smaller than 8x8")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if d["fixed_roi"] is not None:
            d["fixed_roi"] = list(d["fixed_roi"])
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        cfg = cls()
        apply_overrides(cfg, d)
        return cfg


_SECTIONS = {
    "schedule": ScheduleConfig,
    "canny": CannyConfig,
    "geometry": RoiGeometryConfig,
    "breathing": BreathingConfig,
}


def apply_overrides(cfg: RunConfig, d: dict) -> None:
    """Apply a (possibly partial) nested dict onto cfg in place."""
    for key, value in d.items():
        if key in _SECTIONS:
            sub = getattr(cfg, key)
            names = {f.name for f in dataclasses.fields(sub)}
            for k, v in value.items():
                if k not in names:
                    raise ValueError(f"unknown config key {key}.{k}")
                setattr(sub, k, v)
        elif key == "fixed_roi":
            cfg.fixed_roi = None if value is None else tuple(int(v) for v in value)
        elif key in ("profile_mode", "canonical_len"):
            setattr(cfg, key, value)
        else:
            raise ValueError(f"unknown config key {key}")


def load_config(path) -> RunConfig:
    """Load a RunConfig from a JSON file (missing keys keep defaults)."""
    with open(path, "r", encoding="utf-8") as fh:
        d = json.load(fh)
    cfg = RunConfig.from_dict(d)
    cfg.validate()
    return cfg


def dump_config(cfg: RunConfig) -> str:
    """Serialize a config so that loading it back reproduces the run exactly."""
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n"
