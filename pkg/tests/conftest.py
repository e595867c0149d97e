import numpy as np
import pytest

from rssi_outliers.trace import Trace


@pytest.fixture
def gaussian_trace():
    def make(n=2000, mean=-70.0, sd=2.0, seed=0, node="n1", spacing_ms=100):
        x = np.random.default_rng(seed).normal(mean, sd, n)
        return Trace.from_arrays(np.arange(n) * spacing_ms, x, node)

    return make
