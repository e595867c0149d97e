"""Streaming RSSI outlier detection with an adaptive EMA and Chebyshev thresholds."""
from .analysis import anova_oneway, compare_methods, stationarity_report
from .baselines import BaselineConfig, run_baseline
from .channel_sim import (
    ENV_PRESETS,
    RADIO_PROFILES,
    ChannelParams,
    benchmark_suite,
    channel_for,
    path_loss,
    simulate_trace,
)
from .core_stats import RunningStats, mad, median, welford_update, window_stats
from .detector import (
    DetectorConfig,
    DetectorState,
    LinkSummary,
    OutlierEvent,
    detect_step,
    detect_stream,
    deviation,
    sensitivity_k,
    sigma_z,
)
from .ema import (
    AlphaPolicy,
    EmaState,
    calibrate_alpha,
    ema_filter,
    ema_step,
    estimate_alpha,
    steady_state_variance_ratio,
)
from .errors import ConfigurationError, DegenerateInputError, FormatError, InputError
from .trace import RssiSample, Trace, parse_trace_csv, write_trace_csv

__version__ = "0.1.0"
