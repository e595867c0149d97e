# %% [markdown]
# # Smoothing an RSSI stream and choosing alpha
#
# The detector tracks each link with an exponential moving average. For
# uncorrelated input the filtered series keeps a fraction alpha / (2 - alpha)
# of the input variance, and that relation can be turned around to pick
# alpha from the two variances.

# %%
import numpy as np

from rssi_outliers.ema import AlphaPolicy, calibrate_alpha, ema_filter, estimate_alpha, steady_state_variance_ratio

rng = np.random.default_rng(0)
x = rng.normal(-70.0, 2.0, 200_000)

for alpha in (0.1, 0.3, 0.6, 0.95):
    e = ema_filter(x, alpha)
    measured = e[1000:].var() / x.var()
    print(f"alpha={alpha:.2f}  Var(E)/Var(R) measured {measured:.4f}  predicted {steady_state_variance_ratio(alpha):.4f}")

# %% [markdown]
# Inverting the ratio gives back alpha exactly.

# %%
var_r = x.var()
print(estimate_alpha(var_r, steady_state_variance_ratio(0.37) * var_r))

# %% [markdown]
# On a real link the warm-up prefix is short and correlated. Calibration
# iterates filter -> variance -> alpha until alpha settles, clamped to
# [0.05, 0.95]. A slowly drifting link drives alpha up, because the filter
# has to follow the drift. On pure white noise every alpha reproduces its
# own variance ratio, so the iteration wanders and is reported as not
# converged.

# %%
t = np.arange(200)
drifting = -70 + 0.05 * t + rng.normal(0, 0.5, t.size)
for name, prefix in (("white noise", x[:200]), ("drifting link", drifting)):
    cal = calibrate_alpha(prefix, AlphaPolicy())
    print(f"{name:14s} alpha={cal.alpha:.3f} iterations={cal.iterations} converged={cal.converged}")
