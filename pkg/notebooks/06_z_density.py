# %% [markdown]
# # The distribution of the deviation z
#
# If the fresh reading and the previous filtered value are independent
# Gaussians with equal means, z = |R - E| is half-normal with scale
# sqrt(var_R + var_E). The numeric density below integrates the two branches
# (R above E, R below E) directly and reproduces that closed form.

# %%
import math

import numpy as np

from rssi_outliers.analysis import half_normal_pdf, monte_carlo_sigma_z, z_density_numeric

grid = np.linspace(0, 8, 9)
numeric = z_density_numeric(-70.0, 4.0, -70.0, 1.0, grid)
closed = half_normal_pdf(grid, math.sqrt(5.0))
for z, a, b in zip(grid, numeric, closed):
    print(f"z={z:3.0f}  numeric {a:.6f}  half-normal {b:.6f}")

# %%
scale, mean_abs = monte_carlo_sigma_z(2.0, 1.0, 10**6, seed=0)
print(f"sampled scale {scale:.4f} vs sqrt(5) = {math.sqrt(5):.4f}")
print(f"sampled E|z| {mean_abs:.4f} vs {math.sqrt(5) * math.sqrt(2 / math.pi):.4f}")

# %% [markdown]
# With unequal means the density is a folded normal and no longer peaks at 0.

# %%
print(np.round(z_density_numeric(3.0, 1.0, 0.0, 1.0, np.linspace(0, 6, 7)), 4))
