"""Density of the absolute deviation between two independent Gaussians."""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from ..errors import InputError

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def half_normal_pdf(z, sigma: float):
    z = np.asarray(z, dtype=float)
    return np.where(z >= 0, SQRT_2_OVER_PI / sigma * np.exp(-0.5 * (z / sigma) ** 2), 0.0)


def _gauss(mu: float, sd: float):
    c = 1.0 / (sd * math.sqrt(2.0 * math.pi))
    return lambda x: c * math.exp(-0.5 * ((x - mu) / sd) ** 2)


def z_density_numeric(mu_r, var_r, mu_e, var_e, grid, return_branches=False):
    """Density of ``z = |R - E|`` for independent Gaussian R and E.

    Each grid point is the sum of two integrals over E, one for ``R > E``
    (``f_R(E + z) f_E(E)``) and one for ``R <= E`` (``f_R(E - z) f_E(E)``),
    evaluated by adaptive quadrature over ``mu_e +/- 10 sd_e``.
    With ``return_branches=True`` returns ``(density, upper, lower)``.
    """
    if var_r <= 0 or var_e <= 0:
        raise InputError("variances must be positive")
    z = np.atleast_1d(np.asarray(grid, dtype=float))
    if np.any(z < 0):
        raise InputError("z grid must be non-negative")
    sd_r, sd_e = math.sqrt(var_r), math.sqrt(var_e)
    lo, hi = mu_e - 10.0 * sd_e, mu_e + 10.0 * sd_e
    f_r = _gauss(mu_r, sd_r)
    f_e = _gauss(mu_e, sd_e)
    upper = np.empty_like(z)
    lower = np.empty_like(z)
    for i, zi in enumerate(z):
        # the peak of the integrand sits between the two means
        peaks = sorted(p for p in (mu_r - zi, mu_r + zi, mu_e) if lo < p < hi)
        upper[i] = integrate.quad(lambda e: f_r(e + zi) * f_e(e), lo, hi, points=peaks,
                                  epsabs=1e-14, epsrel=1e-11, limit=200)[0]
        lower[i] = integrate.quad(lambda e: f_r(e - zi) * f_e(e), lo, hi, points=peaks,
                                  epsabs=1e-14, epsrel=1e-11, limit=200)[0]
    density = upper + lower
    if return_branches:
        return density, upper, lower
    return density


def monte_carlo_sigma_z(sigma_r: float, sigma_e: float, n_draws: int = 1_000_000, seed: int = 0):
    """Sampled ``(scale, mean |z|)`` for ``z = |R - E|`` with zero-mean normals.

    ``scale`` is the root mean square of ``z``, i.e. the standard deviation
    of the signed difference; for equal means it should approach
    ``sqrt(sigma_r**2 + sigma_e**2)`` and ``mean |z|`` should approach
    ``scale * sqrt(2 / pi)``.
    """
    if n_draws < 10_000:
        raise InputError("n_draws must be at least 10^4")
    rng = np.random.default_rng(seed)
    r = rng.standard_normal(n_draws) * sigma_r
    e = rng.standard_normal(n_draws) * sigma_e
    z = np.abs(r - e)
    return float(np.sqrt(np.mean(z * z))), float(z.mean())
