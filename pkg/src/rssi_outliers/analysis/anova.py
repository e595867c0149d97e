"""One-way ANOVA with an F-distribution p-value.

The survival function of the F distribution is evaluated through the
regularized incomplete beta function, computed here with Lentz's
continued-fraction algorithm.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InputError

_EPS = 1e-12
_TINY = 1e-300
_MAX_ITER = 10_000


@dataclass(frozen=True)
class AnovaResult:
    f_stat: float
    df_between: int
    df_within: int
    p_value: float
    ss_between: float = 0.0
    ss_within: float = 0.0

    def to_json(self) -> dict:
        return {
            "f_stat": self.f_stat if math.isfinite(self.f_stat) else "inf",
            "df_between": self.df_between,
            "df_within": self.df_within,
            "p_value": self.p_value,
        }


def _betacf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if a <= 0 or b <= 0:
        raise InputError("beta parameters must be positive")
    if not 0.0 <= x <= 1.0:
        raise InputError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(f: float, df1: float, df2: float) -> float:
    """P(F >= f) for an F(df1, df2) variable."""
    if f <= 0:
        return 1.0
    if math.isinf(f):
        return 0.0
    return betainc_regularized(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f))


def anova_oneway(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """F test for equal group means.

    Needs at least two groups with at least two samples each. When every
    group is internally constant but the means differ the statistic is
    infinite (p = 0); when all values are identical it is 0 (p = 1).
    """
    arrays = [np.asarray(g, dtype=float) for g in groups]
    if len(arrays) < 2:
        raise InputError("ANOVA needs at least two groups")
    if any(a.size < 2 for a in arrays):
        raise InputError("every ANOVA group needs at least two samples")
    if any(not np.all(np.isfinite(a)) for a in arrays):
        raise InputError("non-finite value in ANOVA input")
    total = sum(a.size for a in arrays)
    grand = sum(float(a.sum()) for a in arrays) / total
    ssb = sum(a.size * (float(a.mean()) - grand) ** 2 for a in arrays)
    ssw = sum(float(((a - a.mean()) ** 2).sum()) for a in arrays)
    df_b = len(arrays) - 1
    df_w = total - len(arrays)
    scale = max(abs(grand), max(float(np.abs(a).max()) for a in arrays), 1e-300)
    # sums of squares at rounding level count as zero
    tiny = (1e-13 * scale) ** 2 * total
    if ssw <= tiny:
        if ssb <= tiny:
            return AnovaResult(0.0, df_b, df_w, 1.0, ssb, ssw)
        return AnovaResult(math.inf, df_b, df_w, 0.0, ssb, ssw)
    f = (ssb / df_b) / (ssw / df_w)
    return AnovaResult(f, df_b, df_w, f_sf(f, df_b, df_w), ssb, ssw)


def anova_by(trace, key: str = "environment") -> tuple[AnovaResult, list[str]]:
    """ANOVA of RSSI values grouped by a sample attribute.

    ``key`` is ``"environment"``, ``"radio"`` or ``"node_id"``. Returns the result and the group names in
    sorted order.
    """
    if key not in ("node_id", "radio", "environment"):
        raise InputError(f"unknown grouping key {key!r}")
    grouped: dict[str, list[np.ndarray]] = {}
    for link in trace.links().values():
        grouped.setdefault(getattr(link, key), []).append(link.values)
    names = sorted(grouped)
    return anova_oneway([np.concatenate(grouped[n]) for n in names]), names
