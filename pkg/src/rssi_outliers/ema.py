"""Exponential moving average filtering and variance-based choice of alpha.

The filter is ``E_t = alpha * R_t + (1 - alpha) * E_{t-1}`` started at
``E_0 = R_0``. For i.i.d. input in steady state the filtered variance is
``alpha / (2 - alpha)`` times the input variance, which inverts to
``alpha = 2 var_e / (var_r + var_e)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.signal import lfilter

from .errors import ConfigurationError, DegenerateInputError, InputError


@dataclass(frozen=True)
class EmaState:
    value: float = float("nan")
    initialized: bool = False


@dataclass(frozen=True)
class AlphaPolicy:
    """How the smoothing factor is chosen.

    ``mode`` is ``"fixed"`` (use ``fixed_alpha``) or ``"calibrated"`` (iterate
    :func:`estimate_alpha` on a prefix starting from ``pilot_alpha``).
    """

    mode: str = "calibrated"
    fixed_alpha: float = 0.5
    pilot_alpha: float = 0.5
    clamp: tuple[float, float] = (0.05, 0.95)
    tol: float = 1e-3
    max_iter: int = 20

    def __post_init__(self):
        if self.mode not in ("fixed", "calibrated"):
            raise ConfigurationError(f"unknown alpha mode {self.mode!r}")
        check_alpha(self.fixed_alpha)
        check_alpha(self.pilot_alpha)
        lo, hi = self.clamp
        if not 0.0 < lo <= hi <= 1.0:
            raise ConfigurationError(f"alpha clamp {self.clamp} must satisfy 0 < lo <= hi <= 1")
        if not self.tol > 0:
            raise ConfigurationError("tol must be positive")
        if self.max_iter < 1:
            raise ConfigurationError("max_iter must be at least 1")

    def clip(self, alpha: float) -> float:
        lo, hi = self.clamp
        return min(max(alpha, lo), hi)


class Calibration(NamedTuple):
    alpha: float
    iterations: int
    converged: bool


def check_alpha(alpha: float) -> float:
    if not (isinstance(alpha, (int, float)) and 0.0 < alpha <= 1.0):
        raise ConfigurationError(f"alpha must lie in (0, 1], got {alpha!r}")
    return float(alpha)


def ema_step(state: EmaState, r: float, alpha: float) -> tuple[float, EmaState]:
    check_alpha(alpha)
    if not math.isfinite(r):
        raise InputError(f"non-finite RSSI {r!r}")
    if not state.initialized:
        e = float(r)
    else:
        e = alpha * r + (1.0 - alpha) * state.value
    return e, EmaState(e, True)


def ema_filter(values, alpha: float) -> np.ndarray:
    """Filter a whole series; element ``t`` is ``E_t``."""
    check_alpha(alpha)
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        return x.copy()
    if not np.all(np.isfinite(x)):
        raise InputError("non-finite value in EMA input")
    # zi chosen so that the first output equals x[0]
    y, _ = lfilter([alpha], [1.0, alpha - 1.0], x, zi=[(1.0 - alpha) * x[0]])
    return y


def steady_state_variance_ratio(alpha: float) -> float:
    """Var(E) / Var(R) for i.i.d. input in steady state."""
    alpha = check_alpha(alpha)
    return alpha / (2.0 - alpha)


def estimate_alpha(var_r: float, var_e: float, clamp: tuple[float, float] | None = (0.05, 0.95)) -> float:
    """Smoothing factor implied by input and filtered variances.

    ``clamp=None`` returns the raw estimate.
    """
    if var_r < 0 or var_e < 0 or not (math.isfinite(var_r) and math.isfinite(var_e)):
        raise InputError("variances must be finite and non-negative")
    total = var_r + var_e
    if total <= 0:
        raise DegenerateInputError("both variances are zero; alpha is undefined")
    alpha = 2.0 * var_e / total
    if clamp is not None:
        lo, hi = clamp
        alpha = min(max(alpha, lo), hi)
    return alpha


def calibrate_alpha(prefix, policy: AlphaPolicy = AlphaPolicy()) -> Calibration:
    """Fixed-point iteration of :func:`estimate_alpha` over a trace prefix.

    Starting from ``policy.pilot_alpha`` the prefix is filtered, the sample
    variances of the raw and filtered series are measured and a new alpha is
    estimated; this repeats until successive values differ by less than
    ``policy.tol``. ``converged`` is False when ``max_iter`` ran out.
    """
    x = np.asarray(prefix, dtype=float)
    if x.size < 2:
        raise InputError("calibration needs at least two samples")
    if not np.all(np.isfinite(x)):
        raise InputError("non-finite value in calibration prefix")
    var_r = float(np.var(x, ddof=1))
    if var_r <= 0:
        raise DegenerateInputError("constant calibration prefix")
    alpha = policy.pilot_alpha
    for it in range(1, policy.max_iter + 1):
        var_e = float(np.var(ema_filter(x, alpha), ddof=1))
        new = estimate_alpha(var_r, var_e, policy.clamp)
        if abs(new - alpha) < policy.tol:
            return Calibration(new, it, True)
        alpha = new
    return Calibration(alpha, policy.max_iter, False)
