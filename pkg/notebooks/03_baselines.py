# %% [markdown]
# # The four reference detectors
#
# All baselines look only at the past. The z-score and moving-average rules
# use mean and standard deviation; the MAD rule swaps in median and scaled
# median absolute deviation; the basic EMA rule flags any step larger than
# a fixed 2 dB.

# %%
import numpy as np

from rssi_outliers import BaselineConfig, DetectorConfig, detect_stream, run_baseline
from rssi_outliers.trace import Trace

rng = np.random.default_rng(3)
n = 3000
x = np.round(-72 + np.cumsum(rng.normal(0, 0.05, n)) + rng.normal(0, 1.2, n))
spikes = rng.choice(np.arange(100, n), 30, replace=False)
x[spikes] += rng.choice([-1, 1], spikes.size) * rng.uniform(8, 14, spikes.size)
trace = Trace.from_arrays(np.arange(n) * 100, x)
truth = np.zeros(n, bool)
truth[spikes] = True

rows = [("adaptive_ema", detect_stream(trace, DetectorConfig()))]
rows += [(m, run_baseline(trace, BaselineConfig(m))) for m in ("zscore", "moving_average", "mad", "basic_ema")]
print(f"{'method':15s} {'rate':>7s} {'recall':>7s} {'precision':>9s}")
for name, res in rows:
    f = res.flags["n1"]
    hits = int((f & truth).sum())
    print(f"{name:15s} {res.summary[0].rate:7.4f} {hits / truth.sum():7.2f} {hits / max(f.sum(), 1):9.2f}")
