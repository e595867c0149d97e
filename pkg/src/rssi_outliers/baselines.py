"""Reference detectors for comparison with the adaptive EMA detector.

Every method is causal: the statistic for sample ``t`` is built from
earlier samples only, and detection starts after the same warm-up as the
adaptive detector. Events reuse :class:`OutlierEvent`; ``ema_prev`` holds
the method's reference level (running mean, window mean, window median or
EMA) and ``k`` the threshold multiplier.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .detector import LinkSummary, OutlierEvent, StreamResult
from .ema import check_alpha, ema_filter
from .errors import ConfigurationError
from .trace import Link, Trace

METHODS = ("basic_ema", "zscore", "moving_average", "mad")
MAD_CONSISTENCY = 1.4826

DEFAULT_THRESHOLDS = {"basic_ema": 2.0, "zscore": 3.0, "moving_average": 3.0, "mad": 3.0}


@dataclass(frozen=True)
class BaselineConfig:
    """``threshold`` is in multiples of the method's dispersion, except for
    ``basic_ema`` where it is an absolute deviation in dB."""

    method: str
    threshold: float | None = None
    window: int = 50
    fixed_alpha: float = 0.5
    warmup: int = 50

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigurationError(f"unknown baseline method {self.method!r}")
        if self.threshold is None:
            object.__setattr__(self, "threshold", DEFAULT_THRESHOLDS[self.method])
        if not self.threshold > 0:
            raise ConfigurationError("threshold must be positive")
        if self.window < 2:
            raise ConfigurationError("window must be at least 2")
        if self.warmup < 2:
            raise ConfigurationError("warmup must be at least 2")
        check_alpha(self.fixed_alpha)


def default_baselines(warmup: int = 50, window: int = 50) -> list[BaselineConfig]:
    return [BaselineConfig(m, window=window, warmup=warmup) for m in METHODS]


def _events(link: Link, flags, center, scale, k, method) -> list[OutlierEvent]:
    out = []
    for t in np.flatnonzero(flags):
        r = float(link.values[t])
        c = float(center[t])
        out.append(OutlierEvent(int(link.timestamps[t]), link.node_id, r, c, abs(r - c),
                                float(k * scale[t]), float(k), method))
    return out


def zscore_flags(values, threshold=3.0, warmup=50):
    """Flags from a cumulative mean and standard deviation of past samples.

    Returns ``(flags, center, scale, n_degenerate)``.
    """
    x = np.asarray(values, dtype=float)
    n = x.size
    center = np.full(n, np.nan)
    scale = np.full(n, np.nan)
    if n > 1:
        csum = np.cumsum(x)
        counts = np.arange(1, n + 1)
        means = csum / counts
        # shifted by x[0] to limit cancellation in the running sums
        shifted = x - x[0]
        csq = np.cumsum(shifted * shifted)
        csh = np.cumsum(shifted)
        var = (csq - csh * csh / counts) / np.maximum(counts - 1, 1)
        center[1:] = means[:-1]
        scale[1:] = np.sqrt(np.maximum(var[:-1], 0.0))
        scale[1] = np.nan
    return _threshold(x, center, scale, threshold, warmup)


def _threshold(x, center, scale, threshold, warmup):
    n = x.size
    eligible = np.zeros(n, dtype=bool)
    eligible[warmup:] = True
    eligible &= np.isfinite(scale)
    degenerate = eligible & (scale <= 0)
    live = eligible & (scale > 0)
    flags = np.zeros(n, dtype=bool)
    flags[live] = np.abs(x[live] - center[live]) >= threshold * scale[live]
    return flags, center, scale, int(degenerate.sum())


def _trailing_windows(x, window):
    """Windows ``x[t-window:t]`` for ``t >= window``; row ``i`` belongs to ``t = i + window``."""
    return sliding_window_view(x[:-1], window) if x.size > window else np.empty((0, window))


def moving_average_flags(values, window=50, threshold=3.0, warmup=50):
    x = np.asarray(values, dtype=float)
    n = x.size
    center = np.full(n, np.nan)
    scale = np.full(n, np.nan)
    wins = _trailing_windows(x, window)
    if len(wins):
        center[window:] = wins.mean(axis=1)
        scale[window:] = wins.std(axis=1, ddof=1)
    return _threshold(x, center, scale, threshold, max(warmup, window))


def mad_flags(values, window=50, threshold=3.0, warmup=50):
    x = np.asarray(values, dtype=float)
    n = x.size
    center = np.full(n, np.nan)
    scale = np.full(n, np.nan)
    wins = _trailing_windows(x, window)
    if len(wins):
        med = np.median(wins, axis=1)
        center[window:] = med
        scale[window:] = MAD_CONSISTENCY * np.median(np.abs(wins - med[:, None]), axis=1)
    return _threshold(x, center, scale, threshold, max(warmup, window))


def basic_ema_flags(values, fixed_alpha=0.5, threshold=2.0, warmup=50):
    """Flags where ``|R_t - E_{t-1}|`` reaches a fixed level in dB."""
    x = np.asarray(values, dtype=float)
    n = x.size
    center = np.full(n, np.nan)
    if n:
        center[1:] = ema_filter(x, fixed_alpha)[:-1]
    flags = np.zeros(n, dtype=bool)
    if math.isinf(threshold):
        return flags, center, np.ones(n), 0
    idx = np.arange(n) >= warmup
    flags[idx] = np.abs(x[idx] - center[idx]) >= threshold
    return flags, center, np.ones(n), 0


def zscore_detect(trace: Trace, threshold=3.0, warmup=50) -> StreamResult:
    return run_baseline(trace, BaselineConfig("zscore", threshold, warmup=warmup))


def moving_average_detect(trace: Trace, window=50, threshold=3.0, warmup=50) -> StreamResult:
    return run_baseline(trace, BaselineConfig("moving_average", threshold, window, warmup=warmup))


def mad_detect(trace: Trace, window=50, threshold=3.0, warmup=50) -> StreamResult:
    return run_baseline(trace, BaselineConfig("mad", threshold, window, warmup=warmup))


def basic_ema_detect(trace: Trace, fixed_alpha=0.5, threshold=2.0, warmup=50) -> StreamResult:
    return run_baseline(trace, BaselineConfig("basic_ema", threshold, fixed_alpha=fixed_alpha, warmup=warmup))


def baseline_link_flags(values, cfg: BaselineConfig):
    """``(flags, center, scale, n_degenerate)`` for one link's values."""
    if cfg.method == "zscore":
        return zscore_flags(values, cfg.threshold, cfg.warmup)
    if cfg.method == "moving_average":
        return moving_average_flags(values, cfg.window, cfg.threshold, cfg.warmup)
    if cfg.method == "mad":
        return mad_flags(values, cfg.window, cfg.threshold, cfg.warmup)
    return basic_ema_flags(values, cfg.fixed_alpha, cfg.threshold, cfg.warmup)


def run_baseline(trace: Trace, cfg: BaselineConfig) -> StreamResult:
    """Apply one baseline to every link of ``trace``.

    The summary's ``k`` is the threshold multiplier; ``alpha`` is only
    meaningful for ``basic_ema`` and NaN otherwise.
    """
    events, summary, warnings, all_flags = [], [], [], {}
    for node, link in trace.links().items():
        n = len(link)
        if n < cfg.warmup:
            warnings.append(f"link {node}: {n} samples, fewer than warmup={cfg.warmup}; skipped")
            continue
        flags, center, scale, degenerate = baseline_link_flags(link.values, cfg)
        if degenerate:
            warnings.append(f"link {node}: {cfg.method} dispersion was zero at {degenerate} samples")
        n_out = int(flags.sum())
        alpha = cfg.fixed_alpha if cfg.method == "basic_ema" else float("nan")
        summary.append(LinkSummary(node, n, n_out, n_out / (n - cfg.warmup) if n > cfg.warmup else 0.0,
                                   alpha, cfg.threshold, float("nan"), float("nan")))
        events.extend(_events(link, flags, center, scale, cfg.threshold, cfg.method))
        all_flags[node] = flags
    return StreamResult(events, summary, warnings, all_flags)
