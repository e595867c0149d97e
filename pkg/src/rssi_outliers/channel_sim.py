"""Synthetic RSSI traces with known injected outliers.

Received power is modelled as::

    R_t = P_tx - PL(d) + D_t + noise_t

with log-distance path loss, an AR(1) shadowing process ``D_t`` whose
stationary standard deviation is ``shadow_sigma``, and white Gaussian
noise. Outliers are additive dB offsets placed at the sample nearest to
each requested time.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import lfilter

from .errors import ConfigurationError, InputError
from .trace import Label, Trace


def path_loss(d: float, d0: float = 1.0, n_exp: float = 2.0, pl0: float = 40.0) -> float:
    """Log-distance path loss in dB."""
    if d0 <= 0:
        raise InputError("reference distance must be positive")
    if d < d0:
        raise InputError(f"distance {d} m is below the reference distance {d0} m")
    return pl0 + 10.0 * n_exp * math.log10(d / d0)


@dataclass(frozen=True)
class ChannelParams:
    p_tx: float = 0.0
    pl0: float = 40.0
    d0: float = 1.0
    d: float = 10.0
    n_exp: float = 2.5
    shadow_sigma: float = 2.0
    shadow_rho: float = 0.99
    noise_sigma: float = 1.0
    rate_hz: float = 10.0
    duration_s: float = 300.0
    outlier_inject: tuple[tuple[float, float], ...] = ()
    resolution_db: float = 0.0
    node_id: str = "n1"
    radio: str = ""
    environment: str = ""

    def __post_init__(self):
        if not self.d >= self.d0 > 0:
            raise ConfigurationError("need d >= d0 > 0")
        if self.noise_sigma < 0 or self.shadow_sigma < 0:
            raise ConfigurationError("standard deviations must be non-negative")
        if not 0.0 <= self.shadow_rho < 1.0:
            raise ConfigurationError("shadow_rho must lie in [0, 1)")
        if not self.rate_hz > 0 or not self.duration_s > 0:
            raise ConfigurationError("rate_hz and duration_s must be positive")
        if self.resolution_db < 0:
            raise ConfigurationError("resolution_db must be non-negative")

    @property
    def n_samples(self) -> int:
        return math.ceil(self.rate_hz * self.duration_s - 1e-9)

    @property
    def mean_rssi(self) -> float:
        return self.p_tx - path_loss(self.d, self.d0, self.n_exp, self.pl0)


@dataclass(frozen=True)
class RadioProfile:
    name: str
    rate_hz: float
    noise_sigma: float
    p_tx: float = 0.0
    resolution_db: float = 1.0


# Packet rates of the four radio configurations (packets per second).
RADIO_PROFILES = {
    "CC1200": RadioProfile("CC1200", 3.0, 0.5),
    "CC2538": RadioProfile("CC2538", 25.0, 1.5),
    "nRF52840": RadioProfile("nRF52840", 10.0, 1.0),
    "BLE": RadioProfile("BLE", 5.0, 2.0),
}


@dataclass(frozen=True)
class EnvPreset:
    """Propagation knobs for one environment type; values are tuning choices.

    ``shadow_tau_s`` is the correlation time of the shadowing process in
    seconds; the per-sample AR(1) coefficient follows from the packet rate.
    """

    name: str
    shadow_sigma: float
    shadow_tau_s: float
    noise_sigma: float
    n_exp: float
    d: float = 20.0

    def rho(self, rate_hz: float) -> float:
        return math.exp(-1.0 / (rate_hz * self.shadow_tau_s))


ENV_PRESETS = {
    "BG": EnvPreset("BG", 6.0, 20.0, 1.5, 3.2),   # bridge
    "FR": EnvPreset("FR", 5.0, 10.0, 1.8, 3.5),   # forest
    "GG": EnvPreset("GG", 1.5, 60.0, 0.8, 2.2),   # garden
    "LK": EnvPreset("LK", 3.0, 40.0, 1.0, 2.4),   # lake
    "RV": EnvPreset("RV", 3.5, 20.0, 1.2, 2.5),   # river
    "PP": EnvPreset("PP", 2.5, 30.0, 1.0, 2.8),
    "RA": EnvPreset("RA", 4.0, 15.0, 1.4, 3.0),
    "CA": EnvPreset("CA", 2.0, 45.0, 1.0, 2.6),
}


@dataclass
class SimulatedTrace:
    trace: Trace
    params: ChannelParams
    injected_index: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @property
    def labels(self) -> list[Label]:
        return self.trace.labels or []


def _nearest_index(time_s: float, rate_hz: float) -> int:
    # ties go to the later sample
    return math.floor(time_s * rate_hz + 0.5)


def simulate_values(params: ChannelParams, seed: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(timestamps_ms, rssi_dbm, injected sample indices) for one link."""
    rng = np.random.default_rng(seed)
    n = params.n_samples
    ts = np.rint(np.arange(n) * (1000.0 / params.rate_hz)).astype(np.int64)
    w = rng.standard_normal(n)
    noise = rng.standard_normal(n) * params.noise_sigma
    shadow = np.zeros(n)
    gain = math.sqrt(1.0 - params.shadow_rho**2) * params.shadow_sigma
    if n > 1:
        # D_0 = 0, D_t = rho * D_{t-1} + gain * w_t
        shadow[1:] = lfilter([gain], [1.0, -params.shadow_rho], w[1:])
    values = params.mean_rssi + shadow + noise
    injected = []
    for time_s, offset in params.outlier_inject:
        idx = _nearest_index(time_s, params.rate_hz)
        if 0 <= idx < n:
            values[idx] += offset
            injected.append(idx)
    if params.resolution_db > 0:
        values = np.round(values / params.resolution_db) * params.resolution_db
    return ts, values, np.array(sorted(set(injected)), dtype=np.int64)


def simulate_trace(params: ChannelParams, seed: int = 0) -> SimulatedTrace:
    """Generate one link; identical ``(params, seed)`` give identical traces."""
    ts, values, injected = simulate_values(params, seed)
    offsets: dict[int, float] = {}
    for time_s, offset in params.outlier_inject:
        idx = _nearest_index(time_s, params.rate_hz)
        if 0 <= idx < len(values):
            offsets[idx] = offsets.get(idx, 0.0) + offset
    labels = [Label(int(ts[i]), offsets[i]) for i in sorted(offsets)]
    trace = Trace.from_arrays(ts, values, params.node_id, params.radio, params.environment, labels)
    return SimulatedTrace(trace, params, injected)


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from labels, independent of iteration order."""
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def channel_for(preset: EnvPreset, radio: RadioProfile, duration_s: float, inject=()) -> ChannelParams:
    return ChannelParams(
        p_tx=radio.p_tx,
        d=preset.d,
        n_exp=preset.n_exp,
        shadow_sigma=preset.shadow_sigma,
        shadow_rho=preset.rho(radio.rate_hz),
        noise_sigma=math.hypot(preset.noise_sigma, radio.noise_sigma),
        rate_hz=radio.rate_hz,
        duration_s=duration_s,
        outlier_inject=tuple(inject),
        resolution_db=radio.resolution_db,
        node_id=f"{radio.name}-{preset.name}",
        radio=radio.name,
        environment=preset.name,
    )


def random_injections(rng, duration_s, rate_hz, inject_rate, offset_db=(8.0, 15.0), start_frac=0.1):
    """Injection times spread over ``[start_frac * duration, duration)``.

    Offsets are uniform in ``offset_db`` with a random sign.
    """
    n = math.ceil(rate_hz * duration_s - 1e-9)
    first = int(math.ceil(start_frac * n))
    count = int(round(inject_rate * (n - first)))
    if count <= 0:
        return ()
    idx = np.sort(rng.choice(np.arange(first, n), size=count, replace=False))
    mags = rng.uniform(offset_db[0], offset_db[1], size=count)
    signs = rng.choice([-1.0, 1.0], size=count)
    return tuple((float(i / rate_hz), float(s * m)) for i, s, m in zip(idx, signs, mags))


def benchmark_suite(env_presets=("BG", "FR", "GG", "LK", "RV"),
                    radio_profiles=("CC1200", "CC2538", "nRF52840", "BLE"),
                    seed: int = 0, duration_s: float = 600.0, inject_rate: float = 0.01,
                    offset_sigmas=(6.0, 10.0)) -> list[SimulatedTrace]:
    """One simulated link per (environment preset, radio profile) pair.

    Presets and profiles may be given as names or objects. Injected offsets
    are drawn in multiples of the link's fast-noise standard deviation so
    that every link carries outliers of comparable prominence. Each trace's
    seed is derived from its labels and ``seed``, so the trace for a given
    pair does not depend on list order.
    """
    if not env_presets or not radio_profiles:
        raise InputError("need at least one preset and one radio profile")
    out = []
    for p in env_presets:
        preset = ENV_PRESETS[p] if isinstance(p, str) else p
        for r in radio_profiles:
            radio = RADIO_PROFILES[r] if isinstance(r, str) else r
            s = derive_seed(preset.name, radio.name, seed)
            rng = np.random.default_rng(derive_seed("inject", preset.name, radio.name, seed))
            noise = math.hypot(preset.noise_sigma, radio.noise_sigma)
            lo, hi = offset_sigmas
            inject = random_injections(rng, duration_s, radio.rate_hz, inject_rate, (lo * noise, hi * noise))
            out.append(simulate_trace(channel_for(preset, radio, duration_s, inject), s))
    return out


def with_injections(params: ChannelParams, inject) -> ChannelParams:
    return replace(params, outlier_inject=tuple(inject))
