# %% [markdown]
# # Simulated links with known outliers
#
# Received power is transmit power minus log-distance path loss, plus a
# slowly varying AR(1) shadowing term and white noise. Environment presets
# set the shadowing depth and correlation time; radio profiles set the
# packet rate and register noise.

# %%
import numpy as np

from rssi_outliers import ENV_PRESETS, RADIO_PROFILES, benchmark_suite, path_loss
from rssi_outliers.channel_sim import ChannelParams, simulate_values

print("path loss at 5 m, n=3:", round(path_loss(5.0, 1.0, 3.0, 40.0), 2), "dB")

# %% [markdown]
# With no correlation the two random terms simply add in variance.

# %%
_, r, _ = simulate_values(ChannelParams(shadow_sigma=2.0, shadow_rho=0.0, noise_sigma=1.5,
                                        rate_hz=1000, duration_s=500), seed=0)
print("variance", round(r.var(), 3), "expected", 2.0**2 + 1.5**2)

# %% [markdown]
# The benchmark grid pairs environments with radios. Each trace's seed is
# derived from its labels, so the grid can be built in any order.

# %%
for name, p in ENV_PRESETS.items():
    print(f"{name}: shadow {p.shadow_sigma} dB over {p.shadow_tau_s} s, noise {p.noise_sigma} dB, n={p.n_exp}")
suite = benchmark_suite(duration_s=120)
for sim in suite[:4]:
    link = next(iter(sim.trace.links().values()))
    print(f"{sim.params.node_id:14s} {link.values.size:5d} samples, mean {link.values.mean():7.2f} dBm, "
          f"{len(sim.labels)} injected")
print(len(suite), "traces from", len(RADIO_PROFILES), "radios")
