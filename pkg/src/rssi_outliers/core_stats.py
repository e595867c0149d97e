"""Online and windowed statistics used throughout the package.

All variances use the sample (n - 1) denominator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InputError


@dataclass
class RunningStats:
    """Welford accumulator for the running mean and squared-deviation sum."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def push(self, x: float) -> None:
        """Fold ``x`` into the accumulator in place."""
        x = float(x)
        if not math.isfinite(x):
            raise InputError(f"non-finite sample {x!r}")
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (x - self.mean)
        if self.m2 < 0.0:
            self.m2 = 0.0

    def variance(self) -> float:
        if self.count < 2:
            raise InputError("variance needs at least two samples")
        return self.m2 / (self.count - 1)

    def std(self) -> float:
        return math.sqrt(self.variance())

    def copy(self) -> "RunningStats":
        return RunningStats(self.count, self.mean, self.m2)


def welford_update(state: RunningStats, x: float) -> RunningStats:
    """Return a new accumulator with ``x`` folded in; ``state`` is untouched."""
    new = state.copy()
    new.push(x)
    return new


def running_stats(values) -> RunningStats:
    stats = RunningStats()
    for x in values:
        stats.push(x)
    return stats


def window_stats(values, timestamps, window) -> list[tuple[float, float]]:
    """Mean and sample variance of consecutive fixed-duration windows.

    Windows are anchored at the first timestamp and span ``window`` ms each,
    half-open on the right. A trailing window that is not complete is kept
    only when it holds at least two samples; a complete window always needs
    two samples for its variance and is skipped otherwise.

    Parameters
    ----------
    values : sequence of float
    timestamps : sequence of int
        Milliseconds, strictly increasing.
    window : float
        Window duration in milliseconds.
    """
    if window <= 0:
        raise InputError("window must be positive")
    x = np.asarray(values, dtype=float)
    t = np.asarray(timestamps, dtype=float)
    if x.shape != t.shape:
        raise InputError("values and timestamps differ in length")
    if x.size == 0:
        return []
    if not np.all(np.isfinite(x)):
        raise InputError("non-finite sample in window_stats input")
    if np.any(np.diff(t) <= 0):
        raise InputError("timestamps must be strictly increasing")
    idx = np.floor((t - t[0]) / window).astype(np.int64)
    out = []
    for w in range(int(idx[-1]) + 1):
        seg = x[idx == w]
        if seg.size < 2:
            continue
        out.append((float(seg.mean()), float(seg.var(ddof=1))))
    return out


def window_indices(timestamps, window) -> list[np.ndarray]:
    """Index arrays of the windows used by :func:`window_stats`."""
    t = np.asarray(timestamps, dtype=float)
    if t.size == 0:
        return []
    idx = np.floor((t - t[0]) / window).astype(np.int64)
    groups = [np.flatnonzero(idx == w) for w in range(int(idx[-1]) + 1)]
    return [g for g in groups if g.size >= 2]


def _as_nonempty(values: Sequence[float]) -> np.ndarray:
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise InputError("empty input")
    if not np.all(np.isfinite(x)):
        raise InputError("non-finite value")
    return x


def median(values) -> float:
    return float(np.median(_as_nonempty(values)))


def mad(values) -> float:
    """Median absolute deviation from the median, unscaled."""
    x = _as_nonempty(values)
    return float(np.median(np.abs(x - np.median(x))))
