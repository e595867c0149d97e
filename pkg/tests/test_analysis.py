import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special, stats

from rssi_outliers.analysis import (
    AnovaResult,
    ComparisonReport,
    anova_by,
    anova_oneway,
    betainc_regularized,
    block_standard_errors,
    compare_methods,
    f_sf,
    half_normal_pdf,
    monte_carlo_sigma_z,
    outlier_rate,
    stationarity_report,
    window_deviations,
    z_density_numeric,
)
from rssi_outliers.analysis.stationarity import increments
from rssi_outliers.baselines import BaselineConfig
from rssi_outliers.channel_sim import ChannelParams, benchmark_suite, simulate_trace
from rssi_outliers.detector import DetectorConfig, detect_stream
from rssi_outliers.errors import InputError
from rssi_outliers.trace import Trace

from oracles import anova_by_hand


class TestBeta:
    @pytest.mark.parametrize("a,b", [(0.5, 0.5), (1.0, 1.0), (2.0, 44938.0), (3.5, 1.2), (30.0, 30.0)])
    def test_against_scipy(self, a, b):
        for x in (0.0, 1e-6, 0.1, 0.37, 0.5, 0.9, 0.999999, 1.0):
            assert betainc_regularized(a, b, x) == pytest.approx(special.betainc(a, b, x), rel=1e-10, abs=1e-14)

    def test_uniform_case(self):
        assert betainc_regularized(1.0, 1.0, 0.3) == pytest.approx(0.3, abs=1e-15)

    @pytest.mark.parametrize("df1,df2", [(1, 1), (2, 10), (4, 95), (4, 89876), (19, 7)])
    def test_f_sf_against_scipy(self, df1, df2):
        for f in (0.0, 0.2, 1.0, 2.5, 10.0, 149256.0):
            assert f_sf(f, df1, df2) == pytest.approx(stats.f.sf(f, df1, df2), rel=1e-9, abs=1e-300)

    def test_f_sf_edges(self):
        assert f_sf(0.0, 3, 10) == 1.0
        assert f_sf(math.inf, 3, 10) == 0.0


class TestAnova:
    def test_hand_example(self):
        groups = [[1, 2, 3], [2, 3, 4], [3, 4, 5]]
        res = anova_oneway(groups)
        f, dfb, dfw = anova_by_hand(groups)
        # SSB = 3*(1 + 0 + 1) = 6, SSW = 3*2 = 6 -> F = (6/2)/(6/6) = 3
        assert f == pytest.approx(3.0, rel=1e-12)
        assert res.f_stat == pytest.approx(f, rel=1e-9)
        assert (res.df_between, res.df_within) == (2, 6)
        assert res.p_value == pytest.approx(stats.f.sf(3.0, 2, 6), rel=1e-9)

    def test_identical_constants(self):
        res = anova_oneway([[2.0, 2.0], [2.0, 2.0, 2.0]])
        assert (res.f_stat, res.p_value) == (0.0, 1.0)

    def test_zero_within_variance(self):
        res = anova_oneway([[1.0, 1.0], [2.0, 2.0]])
        assert res.f_stat == math.inf and res.p_value == 0.0
        assert res.to_json()["f_stat"] == "inf"

    def test_five_groups_df(self):
        rng = np.random.default_rng(0)
        res = anova_oneway([rng.normal(size=20) for _ in range(5)])
        assert (res.df_between, res.df_within) == (4, 95)

    @pytest.mark.parametrize("groups", [[[1, 2, 3]], [[1, 2], [3]], []])
    def test_invalid(self, groups):
        with pytest.raises(InputError):
            anova_oneway(groups)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6))
    def test_invariances(self, seed):
        rng = np.random.default_rng(seed)
        groups = [rng.normal(rng.normal(0, 2), 1, rng.integers(2, 8)) for _ in range(rng.integers(2, 6))]
        base = anova_oneway(groups).f_stat
        permuted = anova_oneway([rng.permutation(g) for g in groups]).f_stat
        shifted = anova_oneway([g + 7.25 for g in groups]).f_stat
        scaled = anova_oneway([g * -4.0 for g in groups]).f_stat
        assert permuted == pytest.approx(base, rel=1e-10)
        assert shifted == pytest.approx(base, rel=1e-9)
        assert scaled == pytest.approx(base, rel=1e-12)

    def test_p_monotone_in_f(self):
        fs = np.linspace(0, 20, 200)
        ps = [f_sf(f, 4, 30) for f in fs]
        assert all(a > b for a, b in zip(ps, ps[1:]))

    def test_by_environment(self):
        sims = benchmark_suite(("BG", "FR", "GG", "LK", "RV"), ("BLE",), duration_s=60)
        samples = [s for sim in sims for s in sim.trace.samples]
        trace = Trace.from_samples(samples)
        res, names = anova_by(trace, "environment")
        assert names == ["BG", "FR", "GG", "LK", "RV"]
        assert res.df_between == 4 and res.df_within == len(samples) - 5
        with pytest.raises(InputError):
            anova_by(trace, "colour")


class TestZDensity:
    def test_half_normal_at_zero(self):
        f0 = z_density_numeric(0.0, 0.5, 0.0, 0.5, [0.0])[0]
        assert f0 == pytest.approx(math.sqrt(2 / math.pi), abs=1e-9)

    def test_matches_half_normal(self):
        grid = np.linspace(0, 6, 61)
        f = z_density_numeric(-70.0, 1.3, -70.0, 0.7, grid)
        np.testing.assert_allclose(f, half_normal_pdf(grid, math.sqrt(2.0)), atol=1e-9)

    def test_normalizes(self):
        sz = math.sqrt(2.0)
        total = integrate.quad(lambda z: z_density_numeric(0.0, 1.0, 0.0, 1.0, [z])[0], 0, 12 * sz)[0]
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_unequal_means_folded_normal(self):
        grid = np.linspace(0, 8, 33)
        f = z_density_numeric(2.0, 1.0, 0.0, 3.0, grid)
        ref = stats.foldnorm.pdf(grid, 1.0, scale=2.0)
        np.testing.assert_allclose(f, ref, atol=1e-9)

    def test_branch_symmetry(self):
        grid = np.linspace(0, 5, 21)
        _, up, low = z_density_numeric(-60.0, 2.0, -60.0, 0.5, grid, return_branches=True)
        np.testing.assert_allclose(up, low, atol=1e-12)

    def test_monte_carlo_histogram(self):
        rng = np.random.default_rng(1)
        n = 10**7
        z = np.abs(rng.normal(0, 1.0, n) - rng.normal(0, math.sqrt(0.5), n))
        edges = np.linspace(0, 5, 51)
        hist, _ = np.histogram(z, bins=edges, density=False)
        emp = hist / (n * np.diff(edges))
        centers = 0.5 * (edges[1:] + edges[:-1])
        num = z_density_numeric(0.0, 1.0, 0.0, 0.5, centers)
        assert np.max(np.abs(emp - num)) < 1e-2

    def test_invalid(self):
        with pytest.raises(InputError):
            z_density_numeric(0, 1, 0, 1, [-0.1, 1.0])
        with pytest.raises(InputError):
            z_density_numeric(0, 0, 0, 1, [1.0])


class TestMonteCarlo:
    def test_zero(self):
        assert monte_carlo_sigma_z(0.0, 0.0, 10**4) == (0.0, 0.0)

    def test_scale(self):
        scale, _ = monte_carlo_sigma_z(2.0, 1.0, 10**6, seed=3)
        assert scale == pytest.approx(math.sqrt(5), rel=0.02)

    def test_mean_abs(self):
        _, m = monte_carlo_sigma_z(1.0, 1.0, 10**6, seed=4)
        assert m == pytest.approx(math.sqrt(2) * math.sqrt(2 / math.pi), rel=0.02)

    def test_too_few(self):
        with pytest.raises(InputError):
            monte_carlo_sigma_z(1, 1, 9999)


class TestStationarity:
    def test_constant(self):
        t = np.arange(0, 400_000, 100)
        rep = stationarity_report(np.full(t.size, -70.0), t, (30, 60))
        assert rep.delta_mean == [0.0, 0.0] and rep.delta_var == [0.0, 0.0]
        centre = rep.bin_centers.index(0)
        assert rep.histogram[0][centre] == rep.counts[0]

    def test_histograms_sum_to_counts(self):
        p = ChannelParams(duration_s=600, resolution_db=1.0)
        tr = simulate_trace(p, 0).trace.links()["n1"]
        rep = stationarity_report(tr.values, tr.timestamps)
        assert rep.window_s == [30.0, 60.0, 90.0, 120.0, 150.0]
        for h, c, sizes in zip(rep.histogram, rep.counts, rep.window_sizes):
            assert sum(h) == c == sum(sizes)
        assert rep.bin_centers == sorted(rep.bin_centers) and rep.bin_centers[0] == -rep.bin_centers[-1]

    def test_short_trace_omits_window(self):
        t = np.arange(0, 45_000, 100)
        x = np.random.default_rng(0).normal(-70, 1, t.size)
        rep = stationarity_report(x, t, (30, 60))
        assert rep.window_s == [30.0] and rep.omitted == [60.0]

    def test_pooled_values(self):
        t = np.arange(0, 120_000, 1000)
        x = np.random.default_rng(1).normal(0, 1, t.size)
        rep = stationarity_report(x, t, (30,))
        d, _ = increments(x, t)
        sizes = rep.window_sizes[0]
        assert rep.delta_mean[0] == pytest.approx(np.concatenate([d[: sum(sizes)]]).mean())
        pooled = sum((n - 1) * v for n, v in zip(sizes, rep.window_vars[0])) / sum(n - 1 for n in sizes)
        assert rep.delta_var[0] == pytest.approx(pooled)

    def test_rejects_unsorted(self):
        with pytest.raises(InputError):
            stationarity_report([1.0, 2.0, 3.0], [0, 200, 100])

    def test_block_errors_iid(self):
        x = np.random.default_rng(2).normal(0, 2, 200_000)
        se_m, se_v = block_standard_errors(x, 100)
        assert se_m == pytest.approx(2 / 10, rel=0.05)
        # Var(s^2) = 2 sigma^4 / (n - 1) for Gaussian data
        assert se_v == pytest.approx(math.sqrt(2 * 16 / 99), rel=0.05)

    def test_step_change_detected(self):
        rng = np.random.default_rng(3)
        t = np.arange(0, 600_000, 100)
        x = rng.normal(0, 1, t.size)
        # one 30 s burst of higher variance inside a 10 minute trace
        x[3000:3300] *= 4.0
        rep = stationarity_report(x, t, (30,))
        d, _ = increments(x, t)
        (_, _, dv), = window_deviations(rep, d)
        assert dv > 3.0


def _pure_noise_suite():
    return benchmark_suite(("GG", "LK"), ("BLE", "nRF52840"), seed=5, duration_s=300, inject_rate=0.0)


class TestComparison:
    def test_pure_noise(self):
        rep = compare_methods(_pure_noise_suite())
        assert rep.methods() == ["adaptive_ema", "basic_ema", "mad", "moving_average", "zscore"]
        for r in rep.rows:
            assert r.n_injected == 0 and r.true_positives == 0 and r.recall is None
            assert r.detection_rate == r.n_flags / r.n_scored
            if r.n_flags:
                assert r.precision == 0.0
        assert max(rep.rates("adaptive_ema")) <= DetectorConfig().delta

    def test_deterministic(self):
        a = compare_methods(_pure_noise_suite()).to_json()
        b = compare_methods(_pure_noise_suite()).to_json()
        assert a == b

    def test_merge_order_independent(self):
        suite = benchmark_suite(("GG", "BG", "RV"), ("BLE",), duration_s=120)
        parts = [compare_methods([s]) for s in suite]
        ab = parts[0].merge(parts[1]).merge(parts[2])
        ba = parts[2].merge(parts[0].merge(parts[1]))
        whole = compare_methods(suite)
        assert ab.to_json() == ba.to_json() == whole.to_json()

    def test_single_trace_identity(self):
        sim = benchmark_suite(("FR",), ("CC2538",), duration_s=120)[0]
        rep = compare_methods([sim], baseline_configs=[])
        res = detect_stream(sim.trace)
        assert len(rep.rows) == 1
        assert rep.rows[0].detection_rate == res.summary[0].rate
        assert rep.rows[0].detection_rate == outlier_rate(res.flags["CC2538-FR"], 50)

    def test_missing_labels_skipped(self):
        sim = benchmark_suite(("FR",), ("BLE",), duration_s=60)[0]
        unlabeled = Trace(sim.trace.links().values(), labels=None)
        rep = compare_methods([unlabeled, sim])
        assert len(rep.skipped) == 1
        assert {r.node_id for r in rep.rows} == {"BLE-FR"}

    def test_scoring_counts_hits(self):
        sim = benchmark_suite(("GG",), ("CC2538",), duration_s=300)[0]
        rep = compare_methods([sim], baseline_configs=[BaselineConfig("mad")])
        for r in rep.rows:
            assert r.n_injected == len(sim.injected_index)
            assert 0 <= r.true_positives <= min(r.n_flags, r.n_injected)
        adaptive = [r for r in rep.rows if r.method == "adaptive_ema"][0]
        assert adaptive.recall > 0.9

    def test_boxplot_rows(self):
        rep = compare_methods(_pure_noise_suite())
        rows = rep.boxplot_rows()
        assert len(rows) == 20 and all(len(r) == 4 for r in rows)

    def test_empty_report_json(self):
        assert ComparisonReport().to_json()["rows"] == []


def test_anova_result_json():
    js = AnovaResult(2.0, 4, 10, 0.17).to_json()
    assert js["df_between"] == 4 and js["p_value"] == 0.17
