"""Window analysis: signal selection, grouping, peak detection, RR prediction.

A motion window holds one intensity time series per profile row. The rows
that move the most are the interesting ones, but the very top of the
std-deviation ranking is often subject motion rather than breathing, so the
top 30% of rows are split in rank order into six equal groups and each group
is averaged into a candidate respiratory wave. Every wave is smoothed,
peak-picked and converted to an instantaneous-RR series; the group whose RR
series is steadiest wins, and its mean is the prediction for the window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import BreathingConfig
from .window import MotionWindow

# rows whose detrended std falls below this are considered flat (intensity units)
FLAT_STD = 1e-9


@dataclass
class RRSeries:
    peak_indices: np.ndarray  # ascending sample indices
    inst_rr: np.ndarray  # BPM per consecutive peak pair, band-filtered


@dataclass
class RRPrediction:
    t: float  # window end time, seconds
    rr_bpm: Optional[float]
    group_index: Optional[int]  # 1-based; 1 = highest-std group
    n_peaks: int
    valid: bool

    def as_row(self) -> tuple:
        return (self.t, self.rr_bpm, self.group_index, self.n_peaks, self.valid)


def detrend(signal: np.ndarray) -> np.ndarray:
    """Subtract the least-squares line; result has zero mean and zero trend."""
    y = np.asarray(signal, dtype=np.float64)
    n = len(y)
    if n < 2:
        raise ValueError("detrend needs at least 2 samples")
    t = np.arange(n, dtype=np.float64)
    t_c = t - t.mean()
    y_mean = y.mean()
    slope = (t_c @ (y - y_mean)) / (t_c @ t_c)
    return y - y_mean - slope * t_c


def select_and_group(window: MotionWindow, cfg: BreathingConfig) -> list[np.ndarray]:
    """Detrend rows, rank by std, keep the top fraction, split into groups.

    Returns G arrays of shape (group_size, N) in rank order (group 0 holds
    the highest-std signals). Ranking ties break toward the lower row index.
    Leftover selected rows beyond G*group_size are dropped. An all-flat
    window yields an empty list.
    """
    n_rows = window.matrix.shape[0]
    group_size = int(np.floor(n_rows * cfg.group_frac))
    if group_size < 1:
        raise ValueError("window has too few rows for the configured group fraction")
    n_top = int(np.floor(n_rows * cfg.top_frac))
    n_groups = cfg.n_groups()

    detrended = np.empty_like(window.matrix)
    for i in range(n_rows):
        detrended[i] = detrend(window.matrix[i])
    stds = detrended.std(axis=1)
    if np.all(stds <= FLAT_STD):
        return []  # flat window

    order = np.argsort(-stds, kind="stable")[:n_top]
    return [
        detrended[order[g * group_size : (g + 1) * group_size]]
        for g in range(n_groups)
        if (g + 1) * group_size <= len(order)
    ]


def group_to_wave(group: np.ndarray) -> np.ndarray:
    """Element-wise mean of a group's signals."""
    if len(group) == 0:
        raise ValueError("empty signal group")
    return group.sum(axis=0) / len(group)


def smooth(wave: np.ndarray, fs: float, cfg: BreathingConfig) -> np.ndarray:
    """Centered moving average, window rounded to an odd sample count.

    Truncated at the boundaries and renormalized by the number of samples
    actually present.
    """
    k = int(round(cfg.smooth_s * fs))
    if k % 2 == 0:
        k += 1
    if k <= 1:
        return np.asarray(wave, dtype=np.float64).copy()
    half = k // 2
    n = len(wave)
    csum = np.concatenate(([0.0], np.cumsum(wave, dtype=np.float64)))
    lo = np.maximum(np.arange(n) - half, 0)
    hi = np.minimum(np.arange(n) + half + 1, n)
    return (csum[hi] - csum[lo]) / (hi - lo)


def _prominence(wave: np.ndarray, peak: int) -> float:
    """Topographic prominence: drop to the higher of the two bracketing minima.

    On each side, scan until a sample strictly above the peak (or the array
    border) and take the minimum over the scanned stretch.
    """
    height = wave[peak]
    left_min = height
    i = peak - 1
    while i >= 0 and wave[i] <= height:
        left_min = min(left_min, wave[i])
        i -= 1
    right_min = height
    i = peak + 1
    n = len(wave)
    while i < n and wave[i] <= height:
        right_min = min(right_min, wave[i])
        i += 1
    return height - max(left_min, right_min)


def detect_peaks(wave: np.ndarray, fs: float, cfg: BreathingConfig) -> np.ndarray:
    """Peak indices: local maxima with enough prominence, spaced apart.

    A local maximum satisfies wave[i] > wave[i-1] and wave[i] >= wave[i+1]
    (the leftmost sample of a plateau). Peaks need prominence of at least
    prominence_factor * std(wave), and peaks closer than fs*60/rr_max samples
    are thinned greedily by descending height, keeping the taller one.
    """
    w = np.asarray(wave, dtype=np.float64)
    n = len(w)
    if n < 3:
        return np.empty(0, dtype=np.int64)
    candidates = np.nonzero((w[1:-1] > w[:-2]) & (w[1:-1] >= w[2:]))[0] + 1
    if len(candidates) == 0:
        return np.empty(0, dtype=np.int64)

    sd = w.std()
    if sd > 0:
        threshold = cfg.prominence_factor * sd
        candidates = np.array(
            [i for i in candidates if _prominence(w, i) >= threshold], dtype=np.int64
        )
    if len(candidates) == 0:
        return np.empty(0, dtype=np.int64)

    min_dist = fs * 60.0 / cfg.rr_max
    # greedy: tallest first, ties to the lower index
    by_height = sorted(candidates, key=lambda i: (-w[i], i))
    kept: list[int] = []
    for i in by_height:
        if all(abs(i - j) >= min_dist for j in kept):
            kept.append(i)
    return np.array(sorted(kept), dtype=np.int64)


def instantaneous_rr(peak_indices: np.ndarray, fs: float, cfg: BreathingConfig) -> RRSeries:
    """BPM value per consecutive peak pair, keeping only the plausible band."""
    peaks = np.asarray(peak_indices, dtype=np.int64)
    if len(peaks) < 2:
        return RRSeries(peak_indices=peaks, inst_rr=np.empty(0, dtype=np.float64))
    ibis = np.diff(peaks) / fs  # seconds per breath
    rr = 60.0 * cfg.cycles_per_peak / ibis
    rr = rr[(rr >= cfg.rr_min) & (rr <= cfg.rr_max)]
    return RRSeries(peak_indices=peaks, inst_rr=rr)


def best_group(series_per_group: list[RRSeries], cfg: BreathingConfig) -> Optional[int]:
    """0-based index of the eligible group with the steadiest RR series.

    Eligible means at least min_peaks peaks and at least 2 retained RR
    values (so the std is meaningful). Ties break toward the lower index.
    Returns None when no group qualifies.
    """
    best_i = None
    best_std = np.inf
    for i, s in enumerate(series_per_group):
        if len(s.peak_indices) < cfg.min_peaks or len(s.inst_rr) < 2:
            continue
        sd = float(np.std(s.inst_rr))
        if sd < best_std:
            best_i, best_std = i, sd
    return best_i


def predict(series: RRSeries, t: float, group_index: int) -> RRPrediction:
    """Average the winning group's instantaneous RR into one value."""
    if len(series.inst_rr) == 0:
        raise ValueError("cannot predict from an empty RR series")
    return RRPrediction(
        t=t,
        rr_bpm=float(series.inst_rr.mean()),
        group_index=group_index,
        n_peaks=int(len(series.peak_indices)),
        valid=True,
    )


def analyze_window(window: MotionWindow, cfg: BreathingConfig, t: float | None = None) -> RRPrediction:
    """Full per-window analysis; returns an invalid prediction when no group qualifies."""
    t = window.end_time_s if t is None else t
    groups = select_and_group(window, cfg)
    series = []
    for g in groups:
        wave = smooth(group_to_wave(g), window.fs, cfg)
        peaks = detect_peaks(wave, window.fs, cfg)
        series.append(instantaneous_rr(peaks, window.fs, cfg))
    win = best_group(series, cfg)
    if win is None:
        return RRPrediction(t=t, rr_bpm=None, group_index=None, n_peaks=0, valid=False)
    return predict(series[win], t, group_index=win + 1)
