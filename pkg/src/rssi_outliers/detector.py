"""Streaming outlier detector built on an EMA and a Chebyshev threshold.

For every sample after the first, the deviation ``z_t = |R_t - E_{t-1}|``
is compared with ``eta_z + eps`` where ``eps = sigma_z / sqrt(delta)``.
Chebyshev's inequality bounds the probability of crossing that threshold
by ``delta`` whatever the distribution of ``z``. The threshold is reported
as ``k * sigma_z`` so that ``k`` summarises how volatile a link is.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .core_stats import RunningStats
from .ema import AlphaPolicy, EmaState, calibrate_alpha, check_alpha, steady_state_variance_ratio
from .errors import ConfigurationError, DegenerateInputError, InputError
from .trace import Link, RssiSample, Trace

log = logging.getLogger(__name__)

K_MODES = ("derivation_consistent", "paper_literal")
NORMALIZATIONS = ("none", "zscore", "minmax")
SIGMA_ESTIMATORS = ("online", "closed_form")


@dataclass(frozen=True)
class DetectorConfig:
    """Parameters of the adaptive detector.

    ``k_mode="paper_literal"`` uses ``sigma_z / sqrt(delta)`` as the additive
    term of ``k``; ``"derivation_consistent"`` uses ``1 / sqrt(delta)``,
    which is what ``eps = sigma_z / sqrt(delta)`` implies. Normalization
    statistics come from the warm-up prefix so detection stays causal.
    ``sigma_estimator="closed_form"`` replaces the running standard
    deviation of ``z`` by ``sqrt(var_r + var_e)`` with ``var_e`` taken from
    the steady-state ratio.
    """

    delta: float = 0.05
    k_mode: str = "derivation_consistent"
    alpha_policy: AlphaPolicy = AlphaPolicy()
    warmup: int = 50
    exclude_outliers_from_stats: bool = True
    normalization: str = "none"
    sigma_estimator: str = "online"

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ConfigurationError(f"delta must lie in (0, 1), got {self.delta!r}")
        if self.k_mode not in K_MODES:
            raise ConfigurationError(f"unknown k_mode {self.k_mode!r}")
        if int(self.warmup) != self.warmup or self.warmup < 2:
            raise ConfigurationError("warmup must be an integer >= 2")
        if self.normalization not in NORMALIZATIONS:
            raise ConfigurationError(f"unknown normalization {self.normalization!r}")
        if self.sigma_estimator not in SIGMA_ESTIMATORS:
            raise ConfigurationError(f"unknown sigma_estimator {self.sigma_estimator!r}")


@dataclass(frozen=True)
class OutlierEvent:
    timestamp_ms: int
    node_id: str
    raw_rssi: float
    ema_prev: float
    z: float
    threshold: float
    k: float
    method: str = "adaptive_ema"


@dataclass
class DetectorState:
    alpha: float
    ema: EmaState = EmaState()
    stats_r: RunningStats = field(default_factory=RunningStats)
    stats_z: RunningStats = field(default_factory=RunningStats)
    samples_seen: int = 0
    last_timestamp: int | None = None


@dataclass(frozen=True)
class LinkSummary:
    node_id: str
    n_samples: int
    n_outliers: int
    rate: float
    alpha: float
    k: float
    sigma_z: float
    eta_z: float
    alpha_iterations: int = 0
    alpha_converged: bool = True

    def to_json(self) -> dict:
        return {
            "node_id": self.node_id,
            "n_samples": self.n_samples,
            "n_outliers": self.n_outliers,
            "rate": self.rate,
            "alpha": self.alpha,
            "k": self.k,
            "sigma_z": self.sigma_z,
            "eta_z": self.eta_z,
        }


class StreamResult(NamedTuple):
    events: list[OutlierEvent]
    summary: list[LinkSummary]
    warnings: list[str]
    flags: dict[str, np.ndarray]


def deviation(r: float, e_prev: float) -> float:
    if not (math.isfinite(r) and math.isfinite(e_prev)):
        raise InputError("deviation needs finite inputs")
    return abs(r - e_prev)


def sigma_z(var_r: float, var_e: float) -> float:
    """Half-normal scale of ``z`` from the input and filtered variances."""
    if var_r < 0 or var_e < 0:
        raise InputError("variances must be non-negative")
    return math.sqrt(var_r + var_e)


def sensitivity_k(eta_z: float, sigma: float, delta: float, mode: str = "derivation_consistent") -> float:
    if not sigma > 0:
        raise DegenerateInputError("sigma_z is zero; the link shows no variation")
    if not 0.0 < delta < 1.0:
        raise ConfigurationError(f"delta must lie in (0, 1), got {delta!r}")
    if mode == "derivation_consistent":
        return eta_z / sigma + 1.0 / math.sqrt(delta)
    if mode == "paper_literal":
        return eta_z / sigma + sigma / math.sqrt(delta)
    raise ConfigurationError(f"unknown k_mode {mode!r}")


def _z_estimates(stats_r: RunningStats, stats_z: RunningStats, alpha: float, estimator: str):
    """(eta_z, sigma_z) or None while the statistics are still undefined."""
    if stats_z.count < 2:
        return None
    if estimator == "online":
        return stats_z.mean, math.sqrt(stats_z.m2 / (stats_z.count - 1))
    if stats_r.count < 2:
        return None
    var_r = stats_r.m2 / (stats_r.count - 1)
    return stats_z.mean, sigma_z(var_r, steady_state_variance_ratio(alpha) * var_r)


def current_k(state: DetectorState, config: DetectorConfig) -> tuple[float, float, float]:
    """(k, sigma_z, eta_z) from the state's current statistics; NaN if undefined."""
    est = _z_estimates(state.stats_r, state.stats_z, state.alpha, config.sigma_estimator)
    if est is None or not est[1] > 0:
        nan = float("nan")
        return nan, nan if est is None else est[1], nan if est is None else est[0]
    eta, sig = est
    return sensitivity_k(eta, sig, config.delta, config.k_mode), sig, eta


def detect_step(state: DetectorState, sample: RssiSample, config: DetectorConfig):
    """Process one sample; returns ``(flag, event, new_state)``.

    The input state is not modified. The flag uses only statistics from
    earlier samples; afterwards the EMA and the running statistics absorb
    the sample (the deviation is left out of the ``z`` statistics when the
    sample was flagged and ``exclude_outliers_from_stats`` is set).
    """
    r = float(sample.rssi_dbm)
    if not math.isfinite(r):
        raise InputError(f"non-finite RSSI at t={sample.timestamp_ms}")
    if state.last_timestamp is not None and sample.timestamp_ms < state.last_timestamp:
        raise InputError("sample timestamps must be non-decreasing within a link")
    stats_r = state.stats_r.copy()
    stats_z = state.stats_z.copy()
    if not state.ema.initialized:
        stats_r.push(r)
        new = DetectorState(state.alpha, EmaState(r, True), stats_r, stats_z, state.samples_seen + 1, sample.timestamp_ms)
        return False, None, new

    e_prev = state.ema.value
    z = abs(r - e_prev)
    flag = False
    event = None
    if state.samples_seen >= config.warmup:
        est = _z_estimates(stats_r, stats_z, state.alpha, config.sigma_estimator)
        if est is not None and est[1] > 0:
            eta, sig = est
            k = sensitivity_k(eta, sig, config.delta, config.k_mode)
            threshold = k * sig
            if z >= threshold:
                flag = True
                event = OutlierEvent(sample.timestamp_ms, sample.node_id, r, e_prev, z, threshold, k)
    e = state.alpha * r + (1.0 - state.alpha) * e_prev
    stats_r.push(r)
    if not (flag and config.exclude_outliers_from_stats):
        stats_z.push(z)
    new = DetectorState(state.alpha, EmaState(e, True), stats_r, stats_z, state.samples_seen + 1, sample.timestamp_ms)
    return flag, event, new


def normalize_values(values: np.ndarray, warmup: int, mode: str) -> np.ndarray:
    """Scale a link with statistics of its first ``warmup`` samples."""
    if mode == "none":
        return values
    head = values[:warmup]
    if mode == "zscore":
        center = float(head.mean())
        scale = float(head.std(ddof=1)) if head.size >= 2 else 0.0
    elif mode == "minmax":
        center = float(head.min())
        scale = float(head.max() - head.min())
    else:
        raise ConfigurationError(f"unknown normalization {mode!r}")
    if scale <= 0:
        scale = 1.0
    return (values - center) / scale


def choose_alpha(values: np.ndarray, config: DetectorConfig):
    """(alpha, iterations, converged) for a link, calibrating on warm-up."""
    policy = config.alpha_policy
    if policy.mode == "fixed":
        return check_alpha(policy.fixed_alpha), 0, True
    return tuple(calibrate_alpha(values[: config.warmup], policy))


def run_link(link: Link, config: DetectorConfig, alpha: float):
    """Fold the detector over one link; returns (flags, events, final state).

    Equivalent to repeated :func:`detect_step` calls, written as a single
    loop over floats for speed.
    """
    values = link.values
    ts = link.timestamps
    n = len(values)
    flags = np.zeros(n, dtype=bool)
    events = []
    if n == 0:
        return flags, events, DetectorState(alpha)
    if np.any(np.diff(ts) < 0):
        raise InputError(f"link {link.node_id}: timestamps decrease")
    if not np.all(np.isfinite(values)):
        raise InputError(f"link {link.node_id}: non-finite RSSI")

    delta = config.delta
    inv_sqrt_delta = 1.0 / math.sqrt(delta)
    literal = config.k_mode == "paper_literal"
    closed = config.sigma_estimator == "closed_form"
    ratio = steady_state_variance_ratio(alpha)
    exclude = config.exclude_outliers_from_stats
    warmup = config.warmup
    node = link.node_id
    beta = 1.0 - alpha

    vals = values.tolist()
    e = vals[0]
    rn, rmean, rm2 = 1, e, 0.0
    zn, zmean, zm2 = 0, 0.0, 0.0
    for t in range(1, n):
        r = vals[t]
        z = abs(r - e)
        flagged = False
        if t >= warmup and zn >= 2:
            if closed:
                var_r = rm2 / (rn - 1)
                sig = math.sqrt(var_r + ratio * var_r)
            else:
                sig = math.sqrt(zm2 / (zn - 1))
            if sig > 0:
                k = zmean / sig + (sig * inv_sqrt_delta if literal else inv_sqrt_delta)
                threshold = k * sig
                if z >= threshold:
                    flagged = True
                    flags[t] = True
                    events.append(OutlierEvent(int(ts[t]), node, r, e, z, threshold, k))
        e_prev = e
        e = alpha * r + beta * e_prev
        rn += 1
        d = r - rmean
        rmean += d / rn
        rm2 += d * (r - rmean)
        if not (flagged and exclude):
            zn += 1
            d = z - zmean
            zmean += d / zn
            zm2 += d * (z - zmean)
    state = DetectorState(
        alpha,
        EmaState(e, True),
        RunningStats(rn, rmean, max(rm2, 0.0)),
        RunningStats(zn, zmean, max(zm2, 0.0)),
        n,
        int(ts[-1]),
    )
    return flags, events, state


def detect_stream(trace: Trace, config: DetectorConfig = DetectorConfig()) -> StreamResult:
    """Run the detector over every link of ``trace``.

    Links are independent. A link with fewer than ``warmup`` samples, or
    whose warm-up prefix is constant under calibration, is left out of the
    summary and reported in ``warnings``. The outlier rate is the number of
    flags divided by the number of post-warm-up samples.
    """
    events: list[OutlierEvent] = []
    summary: list[LinkSummary] = []
    warnings: list[str] = []
    flags: dict[str, np.ndarray] = {}
    for node, link in trace.links().items():
        n = len(link)
        if n < config.warmup:
            warnings.append(f"link {node}: {n} samples, fewer than warmup={config.warmup}; skipped")
            log.warning(warnings[-1])
            continue
        work = Link(node, link.timestamps, normalize_values(link.values, config.warmup, config.normalization),
                    link.radio, link.environment)
        try:
            alpha, iters, converged = choose_alpha(work.values, config)
        except DegenerateInputError as exc:
            warnings.append(f"link {node}: {exc}; skipped")
            log.warning(warnings[-1])
            continue
        if not converged:
            warnings.append(f"link {node}: alpha calibration did not converge in {iters} iterations")
            log.info(warnings[-1])
        link_flags, link_events, state = run_link(work, config, alpha)
        k, sig, eta = current_k(state, config)
        n_out = int(link_flags.sum())
        summary.append(LinkSummary(node, n, n_out, n_out / (n - config.warmup) if n > config.warmup else 0.0,
                                   alpha, k, sig, eta, iters, converged))
        events.extend(link_events)
        flags[node] = link_flags
    return StreamResult(events, summary, warnings, flags)


def initial_state(config: DetectorConfig, alpha: float | None = None) -> DetectorState:
    """Fresh state for :func:`detect_step`; ``alpha`` defaults to the fixed policy value."""
    if alpha is None:
        alpha = config.alpha_policy.fixed_alpha
    return DetectorState(check_alpha(alpha))


def with_alpha(config: DetectorConfig, alpha: float) -> DetectorConfig:
    """Copy of ``config`` using a fixed smoothing factor."""
    return replace(config, alpha_policy=replace(config.alpha_policy, mode="fixed", fixed_alpha=alpha))
