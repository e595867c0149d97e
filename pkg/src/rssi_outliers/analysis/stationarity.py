"""Window statistics of RSSI increments for wide-sense stationarity checks."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..core_stats import window_indices
from ..errors import InputError

log = logging.getLogger(__name__)


@dataclass
class StationarityReport:
    """Per window size: pooled increment mean/variance and a histogram.

    ``histogram[i]`` counts increments in 1 dB bins centred on the integers
    listed in ``bin_centers``. ``window_means``/``window_vars`` keep the
    individual windows behind each pooled value.
    """

    window_s: list[float] = field(default_factory=list)
    delta_mean: list[float] = field(default_factory=list)
    delta_var: list[float] = field(default_factory=list)
    histogram: list[list[int]] = field(default_factory=list)
    bin_centers: list[int] = field(default_factory=list)
    counts: list[int] = field(default_factory=list)
    window_means: list[list[float]] = field(default_factory=list)
    window_vars: list[list[float]] = field(default_factory=list)
    window_sizes: list[list[int]] = field(default_factory=list)
    global_mean: float = 0.0
    global_var: float = 0.0
    omitted: list[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "window_s": self.window_s,
            "delta_mean": self.delta_mean,
            "delta_var": self.delta_var,
            "counts": self.counts,
            "bin_centers": self.bin_centers,
            "histogram": self.histogram,
            "global_mean": self.global_mean,
            "global_var": self.global_var,
            "omitted_window_s": self.omitted,
        }


def increments(values, timestamps):
    """(delta_rssi, timestamps of the later sample)."""
    x = np.asarray(values, dtype=float)
    t = np.asarray(timestamps)
    return np.diff(x), t[1:]


def stationarity_report(values, timestamps, windows_s=(30, 60, 90, 120, 150)) -> StationarityReport:
    """Partition the increments ``R_t - R_{t-1}`` into windows of each size.

    Only complete windows are used for a given size, so a trace shorter than
    a window size yields no entry for it (recorded in ``omitted``).
    """
    if len(windows_s) == 0:
        raise InputError("need at least one window size")
    x = np.asarray(values, dtype=float)
    t = np.asarray(timestamps, dtype=np.int64)
    if x.size != t.size:
        raise InputError("values and timestamps differ in length")
    if np.any(np.diff(t) <= 0):
        raise InputError("timestamps must be strictly increasing")
    d, td = increments(x, t)
    report = StationarityReport()
    if d.size < 2:
        report.omitted = [float(w) for w in windows_s]
        return report
    report.global_mean = float(d.mean())
    report.global_var = float(d.var(ddof=1))
    top = int(math.ceil(np.abs(d).max() - 0.5)) if d.size else 0
    report.bin_centers = list(range(-top, top + 1))
    edges = np.arange(-top - 0.5, top + 1.5, 1.0)
    dt = float(np.median(np.diff(td))) if td.size > 1 else 0.0
    for w in windows_s:
        w_ms = float(w) * 1000.0
        groups = _complete_windows(td, w_ms, dt)
        if not groups:
            log.warning("trace spans %.1f s, shorter than window %s s; omitted",
                        (td[-1] - td[0] + dt) / 1000.0, w)
            report.omitted.append(float(w))
            continue
        means = [float(d[g].mean()) for g in groups]
        vars_ = [float(d[g].var(ddof=1)) for g in groups]
        used = np.concatenate(groups)
        sizes = [int(g.size) for g in groups]
        dof = sum(n - 1 for n in sizes)
        pooled_var = sum((n - 1) * v for n, v in zip(sizes, vars_)) / dof
        report.window_s.append(float(w))
        report.delta_mean.append(float(d[used].mean()))
        report.delta_var.append(float(pooled_var))
        report.histogram.append(np.histogram(d[used], bins=edges)[0].astype(int).tolist())
        report.counts.append(int(used.size))
        report.window_means.append(means)
        report.window_vars.append(vars_)
        report.window_sizes.append(sizes)
    return report


def _complete_windows(t, w_ms, dt):
    """Consecutive windows of ``w_ms`` that the samples cover to at least 90%."""
    t = np.asarray(t, dtype=float)
    out = []
    for g in window_indices(t, w_ms):
        if t[g[-1]] - t[g[0]] + dt >= 0.9 * w_ms:
            out.append(g)
    return out


def block_standard_errors(values, n: int) -> tuple[float, float]:
    """Spread of the mean and variance over every contiguous block of length ``n``.

    Used as the sampling standard error of a single window's statistics;
    overlapping blocks keep the serial correlation of the series.
    """
    x = np.asarray(values, dtype=float)
    if n < 2 or n > x.size:
        raise InputError("block length must lie in [2, len(values)]")
    c1 = np.concatenate(([0.0], np.cumsum(x - x.mean())))
    c2 = np.concatenate(([0.0], np.cumsum((x - x.mean()) ** 2)))
    s1 = c1[n:] - c1[:-n]
    s2 = c2[n:] - c2[:-n]
    means = s1 / n
    vars_ = (s2 - s1 * s1 / n) / (n - 1)
    return float(means.std(ddof=1)), float(vars_.std(ddof=1))


def window_deviations(report: StationarityReport, values):
    """Largest |window statistic - global value| in standard errors.

    ``values`` are the increments the report was built from. Returns a list
    of ``(window_s, max_mean_dev, max_var_dev)``.
    """
    d = np.asarray(values, dtype=float)
    out = []
    for w, means, vars_, sizes in zip(report.window_s, report.window_means, report.window_vars, report.window_sizes):
        n = int(round(np.median(sizes)))
        se_m, se_v = block_standard_errors(d, n)
        dm = max(abs(m - report.global_mean) for m in means) / se_m if se_m > 0 else 0.0
        dv = max(abs(v - report.global_var) for v in vars_) / se_v if se_v > 0 else 0.0
        out.append((w, dm, dv))
    return out
