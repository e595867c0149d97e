# %% [markdown]
# # Is a link stationary, and do environments differ?
#
# Differences of consecutive RSSI readings are split into windows of 30 to
# 150 seconds. For a stationary link each window's mean and variance stay
# within a few standard errors of the whole-trace values. A one-way ANOVA
# then asks whether RSSI differs between environments.

# %%
import numpy as np

from rssi_outliers import ENV_PRESETS, RADIO_PROFILES, channel_for, simulate_trace
from rssi_outliers.analysis import anova_by, stationarity_report, window_deviations
from rssi_outliers.analysis.stationarity import increments
from rssi_outliers.trace import Trace

link = simulate_trace(channel_for(ENV_PRESETS["RV"], RADIO_PROFILES["CC2538"], 600), 0).trace.links()["CC2538-RV"]
rep = stationarity_report(link.values, link.timestamps)
for w, m, v in zip(rep.window_s, rep.delta_mean, rep.delta_var):
    print(f"window {w:5.0f} s  mean {m:+.4f}  variance {v:.3f}")
d, _ = increments(link.values, link.timestamps)
for w, dm, dv in window_deviations(rep, d):
    print(f"window {w:5.0f} s  worst window off by {dm:.2f} SE in mean, {dv:.2f} SE in variance")

# %%
samples = []
for env in ("BG", "FR", "GG", "LK", "RV"):
    sim = simulate_trace(channel_for(ENV_PRESETS[env], RADIO_PROFILES["BLE"], 300), seed=7)
    samples += sim.trace.samples
res, groups = anova_by(Trace.from_samples(samples), "environment")
print(groups, f"F={res.f_stat:.1f} df=({res.df_between}, {res.df_within}) p={res.p_value:.3g}")
