"""Scoring against ground truth and the profile-mode x fraction ablation.

Metrics are MAE and Success Rate at 2 BPM (share of valid predictions whose
absolute error is at most 2.0; the bound is inclusive). The ground-truth
series is step-hold: the reference for a prediction at time t is the value
at the greatest ground-truth time <= t.
"""

from __future__ import annotations

import csv
import json
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .breathing import RRPrediction
from .config import RunConfig
from .pipeline import run_recording

SR_BOUND_BPM = 2.0


@dataclass
class EvalMetrics:
    mae: Optional[float]
    sr2: Optional[float]  # percent
    n: int  # valid predictions scored
    invalid_count: int


@dataclass
class RecordingSpec:
    video_path: Path
    ground_truth_path: Path
    landmarks_path: Optional[Path] = None
    fixed_roi: Optional[tuple[int, int, int, int]] = None


@dataclass
class AblationCell:
    profile_mode: str
    fraction: float
    metrics: Optional[EvalMetrics]
    best_group_ge2_share: Optional[float]
    error: Optional[str] = None


def load_ground_truth(path) -> list[tuple[float, float]]:
    """Read a t,rr_bpm CSV into a sorted step-hold series."""
    rows = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "rr_bpm"]:
            raise ValueError(f"bad ground-truth header in {path}")
        for row in reader:
            if not row:
                continue
            rows.append((float(row[0]), float(row[1])))
    if not rows:
        raise ValueError(f"empty ground truth {path}")
    if any(b[0] <= a[0] for a, b in zip(rows, rows[1:])):
        raise ValueError(f"ground-truth times must be strictly increasing in {path}")
    return rows


def reference_at(ground_truth: Sequence[tuple[float, float]], t: float) -> float:
    """Step-hold lookup: value at the greatest ground-truth time <= t."""
    times = [g[0] for g in ground_truth]
    i = bisect_right(times, t)
    if i == 0:
        raise ValueError(f"ground truth does not cover t={t}")
    return ground_truth[i - 1][1]


def prediction_errors(
    predictions: Sequence[RRPrediction], ground_truth: Sequence[tuple[float, float]]
) -> tuple[list[float], int]:
    """Absolute errors of the valid predictions, plus the invalid count."""
    errors = []
    invalid = 0
    for p in predictions:
        if not p.valid:
            invalid += 1
            continue
        errors.append(abs(p.rr_bpm - reference_at(ground_truth, p.t)))
    return errors, invalid


def metrics_from_errors(errors: Sequence[float], invalid_count: int) -> EvalMetrics:
    if not errors:
        return EvalMetrics(mae=None, sr2=None, n=0, invalid_count=invalid_count)
    arr = np.asarray(errors, dtype=np.float64)
    return EvalMetrics(
        mae=float(arr.mean()),
        sr2=float(100.0 * np.mean(arr <= SR_BOUND_BPM)),
        n=len(errors),
        invalid_count=invalid_count,
    )


def score(
    predictions: Sequence[RRPrediction], ground_truth: Sequence[tuple[float, float]]
) -> EvalMetrics:
    """MAE / SR2 of one prediction stream against one ground-truth series."""
    errors, invalid = prediction_errors(predictions, ground_truth)
    return metrics_from_errors(errors, invalid)


def group_rank_stats(group_indices: Sequence[int]) -> float:
    """Share of windows whose winning group sits below the top one (index >= 2)."""
    if not group_indices:
        raise ValueError("no valid windows")
    return sum(1 for g in group_indices if g >= 2) / len(group_indices)


def load_dataset_manifest(path) -> list[RecordingSpec]:
    """JSON list of recordings; relative paths resolve against the manifest."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        entries = json.load(fh)
    if not isinstance(entries, list) or not entries:
        raise ValueError(f"dataset manifest {path} must be a non-empty JSON list")
    base = path.parent
    specs = []
    for e in entries:
        video = base / e["video_path"]
        gt = base / e["ground_truth_path"]
        lm = base / e["landmarks_path"] if e.get("landmarks_path") else None
        roi = tuple(int(v) for v in e["fixed_roi"]) if e.get("fixed_roi") else None
        if lm is None and roi is None:
            raise ValueError(f"recording {e} needs landmarks_path or fixed_roi")
        specs.append(RecordingSpec(video, gt, lm, roi))
    return specs


def _cell_config(base: RunConfig, mode: str, fraction: float) -> RunConfig:
    cfg = RunConfig.from_dict(base.to_dict())
    cfg.profile_mode = mode
    cfg.breathing.top_frac = fraction
    cfg.breathing.group_frac = min(cfg.breathing.group_frac, fraction)
    cfg.validate()
    return cfg


def run_cell(
    recordings: Sequence[RecordingSpec], base_cfg: RunConfig, mode: str, fraction: float
) -> AblationCell:
    """Run every recording through one configuration and pool the errors."""
    errors: list[float] = []
    invalid = 0
    winners: list[int] = []
    try:
        for rec in recordings:
            cfg = _cell_config(base_cfg, mode, fraction)
            cfg.fixed_roi = rec.fixed_roi
            preds = run_recording(rec.video_path, cfg, landmarks_path=rec.landmarks_path)
            gt = load_ground_truth(rec.ground_truth_path)
            errs, inv = prediction_errors(preds, gt)
            errors.extend(errs)
            invalid += inv
            winners.extend(p.group_index for p in preds if p.valid)
    except (OSError, ValueError) as exc:
        return AblationCell(mode, fraction, None, None, error=str(exc))
    share = group_rank_stats(winners) if winners else None
    return AblationCell(mode, fraction, metrics_from_errors(errors, invalid), share)


def ablation(
    recordings: Sequence[RecordingSpec],
    base_cfg: RunConfig,
    modes: Sequence[str] = ("full_roi", "edges"),
    fractions: Sequence[float] = (0.05, 0.30),
) -> list[AblationCell]:
    """Full profile-mode x signal-fraction table (4 cells by default)."""
    if not recordings:
        raise ValueError("empty dataset manifest")
    return [run_cell(recordings, base_cfg, m, f) for m in modes for f in fractions]


def format_table(cells: Sequence[AblationCell]) -> str:
    """Ablation cells as CSV, one row per cell."""
    lines = ["profile,fraction,mae,sr2,n_valid,n_invalid,best_group_ge2_share,status"]
    for c in cells:
        if c.error is not None:
            lines.append(f"{c.profile_mode},{c.fraction:.2f},,,,,,failed: {c.error}")
            continue
        m = c.metrics
        mae = f"{m.mae:.3f}" if m.mae is not None else ""
        sr2 = f"{m.sr2:.1f}" if m.sr2 is not None else ""
        share = f"{c.best_group_ge2_share:.3f}" if c.best_group_ge2_share is not None else ""
        lines.append(
            f"{c.profile_mode},{c.fraction:.2f},{mae},{sr2},{m.n},{m.invalid_count},{share},ok"
        )
    return "\n".join(lines) + "\n"


def describe_cell(c: AblationCell) -> str:
    """One human-readable line per ablation cell."""
    label = f"{c.profile_mode}/{c.fraction:.2f}"
    if c.error is not None:
        return f"{label}: failed ({c.error})"
    m = c.metrics
    if m.n == 0:
        return f"{label}: no valid predictions ({m.invalid_count} invalid)"
    share = (
        f", best group below top-5% in {100 * c.best_group_ge2_share:.0f}% of windows"
        if c.best_group_ge2_share is not None
        else ""
    )
    return (
        f"{label}: MAE {m.mae:.3f} BPM, SR2 {m.sr2:.1f}% "
        f"over {m.n} windows ({m.invalid_count} invalid){share}"
    )
