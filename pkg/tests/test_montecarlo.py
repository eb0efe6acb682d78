import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from masim.channel import ChannelField, Region
from masim.config import ExperimentConfig
from masim.exceptions import DimensionError, DomainError
from masim.montecarlo import (BaselineArray, ChannelSampler, RunResult, as_gain,
                              correlation_experiment, dbf_gain, default_array_size,
                              empirical_cdf, fpa_gain, ks_distance, ma_max_gain, philox_stream,
                              quantization_period_experiment, run_sweep, sample_channel)
from masim.stochastic import spatial_correlation


def draw_many(sampler, n, seed=0):
    return [sample_channel(sampler, philox_stream(seed, 0, i)) for i in range(n)]


# sampling

def test_sampler_power_and_angles():
    sampler = ChannelSampler(4, 2.0)
    rng = philox_stream(7)
    power, vt, vp = [], [], []
    for _ in range(10**5 // 4):
        f = sampler.sample(rng)
        power.append(np.sum(np.abs(f.eprv) ** 2))
        vt.extend(f.vartheta)
        vp.extend(f.varphi)
    assert np.mean(power) == pytest.approx(2.0, rel=0.01)
    assert stats.kstest(vt, "uniform", args=(-1, 2)).statistic < 0.01
    assert np.all(np.square(vp) + np.square(vt) <= 1 + 1e-12)


def test_sampler_is_deterministic():
    s = ChannelSampler(3)
    a, b = s.sample(philox_stream(5, 1, 2)), s.sample(philox_stream(5, 1, 2))
    np.testing.assert_array_equal(a.eprv, b.eprv)
    np.testing.assert_array_equal(a.varphi, b.varphi)
    c = s.sample(philox_stream(5, 1, 3))
    assert not np.array_equal(a.eprv, c.eprv)


def test_sampler_power_ratios():
    s = ChannelSampler(2, 3.0, (10.0, 1.0))
    np.testing.assert_allclose(s.path_variances, [30 / 11, 3 / 11])
    assert s.path_variances.sum() == pytest.approx(3.0)
    with pytest.raises(DimensionError):
        ChannelSampler(3, 1.0, (1.0, 2.0))
    with pytest.raises(DomainError):
        ChannelSampler(2, 1.0, (1.0, -2.0))
    with pytest.raises(DomainError):
        ChannelSampler(0)


# baseline arrays

def test_baseline_array_positions():
    x, y = BaselineArray("linear-x", 5).positions
    np.testing.assert_allclose(x, [-1, -0.5, 0, 0.5, 1])
    np.testing.assert_array_equal(y, 0)
    x, y = BaselineArray("square", 9).positions
    assert sorted(set(x)) == [-0.5, 0, 0.5] == sorted(set(y))
    x, _ = BaselineArray("linear-x", 4).positions
    np.testing.assert_allclose(x, -x[::-1])
    np.testing.assert_allclose(np.diff(x), 0.5)
    with pytest.raises(DomainError):
        BaselineArray("square", 8)
    with pytest.raises(DomainError):
        BaselineArray("ring", 4)
    with pytest.raises(DomainError):
        BaselineArray("linear-x", 0)


def test_default_array_size():
    assert default_array_size(10) == 21
    assert default_array_size(10, "square") == 441
    assert default_array_size(2.3) == 5


# schemes

def test_fpa_examples():
    assert fpa_gain(ChannelField([1, -1], [0.2, 0.5])) == 0.0
    assert fpa_gain(ChannelField([1], [0.2])) == 1.0
    g = [fpa_gain(f) for f in draw_many(ChannelSampler(3, 1.5), 10**5)]
    assert np.mean(g) == pytest.approx(1.5, rel=0.02)


def test_ma_max_gain_examples():
    one = ChannelField([0.3 - 0.4j], [0.5], [0.1])
    assert ma_max_gain(one, Region.square(3), 0.1) == pytest.approx(0.25)
    for f in draw_many(ChannelSampler(2), 20, seed=1):
        bound = np.sum(np.abs(f.eprv)) ** 2
        assert ma_max_gain(f, Region.square(4), 0.01) == pytest.approx(bound, rel=0.01)
    f = ChannelSampler(5).sample(philox_stream(2))
    vals = [ma_max_gain(f, Region.square(s), 0.05) for s in (0.5, 1.0, 2.0, 4.0)]
    assert np.all(np.diff(vals) >= 0)


def test_as_and_dbf_single_element():
    f = ChannelSampler(3).sample(philox_stream(3))
    arr = BaselineArray("linear-x", 1)
    assert as_gain(f, arr) == pytest.approx(fpa_gain(f))
    assert dbf_gain(f, arr) == pytest.approx(fpa_gain(f))


def test_scheme_ordering():
    for f in draw_many(ChannelSampler(4), 200, seed=4):
        arr = BaselineArray("linear-x", 9)
        region = Region.square(4)
        assert fpa_gain(f) <= as_gain(f, arr) + 1e-12 <= dbf_gain(f, arr) + 2e-12
        # array positions at multiples of 0.5 are lattice points of the 0.05 scan
        assert as_gain(f, arr) <= ma_max_gain(f, region, 0.05) + 1e-12
        sq = BaselineArray("square", 25)
        assert as_gain(f, sq) <= dbf_gain(f, sq)
        assert as_gain(f, sq) <= ma_max_gain(f, region, 0.05) + 1e-12


def test_dbf_expectation():
    arr = BaselineArray("linear-x", 5)
    g = [dbf_gain(f, arr) for f in draw_many(ChannelSampler(3, 2.0), 20000, seed=5)]
    assert np.mean(g) == pytest.approx(5 * 2.0, rel=0.02)


def test_as_approaches_ma_with_dense_arrays():
    gaps = []
    for f in draw_many(ChannelSampler(3), 20, seed=6):
        ma = ma_max_gain(f, Region.square(4), 0.05)
        dense = BaselineArray("square", 81 ** 2, spacing=0.05)
        gaps.append(ma - as_gain(f, dense))
    assert max(gaps) < 1e-9


# empirical CDF and KS

def test_empirical_cdf_single_sample():
    ecdf = empirical_cdf([2.5])
    assert ecdf(2.5) == 1.0
    assert ecdf(2.5 - 1e-12) == 0.0
    with pytest.raises(DomainError):
        empirical_cdf([])


@settings(max_examples=100)
@given(samples=st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50),
       t=st.lists(st.floats(-2e6, 2e6), min_size=2, max_size=20))
def test_empirical_cdf_is_nondecreasing_and_right_continuous(samples, t):
    ecdf = empirical_cdf(samples)
    t = np.sort(t)
    v = ecdf(t)
    assert np.all(np.diff(v) >= 0)
    for s in samples:
        assert ecdf(s) == np.mean(np.asarray(samples) <= s)


def test_ks_distance_exponential():
    x = np.random.default_rng(8).exponential(1.0, 10**6)
    d = ks_distance(x, lambda t: -np.expm1(-t))
    assert d < 0.002
    assert d == pytest.approx(stats.kstest(x, "expon").statistic, abs=1e-12)


def test_run_result_summary():
    s = np.random.default_rng(9).normal(size=1000)
    r = RunResult.from_samples("MA", 3.0, s)
    assert abs(r.mean - np.mean(s)) < 1e-12
    assert r.stderr == pytest.approx(np.std(s, ddof=1) / math.sqrt(1000))
    assert r.empirical_cdf(np.inf) == 1.0


# sweeps

def small(**kw):
    base = dict(n_realizations=200, region_side=3.0, grid_step=0.1, region_sizes=(1.0, 2.0, 3.0))
    base.update(kw)
    return ExperimentConfig(**base)


def test_run_sweep_shape_and_order():
    res = run_sweep(small(experiment="sweep-region", l_r=3))
    keys = [(r.sweep_value, r.scheme) for r in res]
    assert keys == sorted(keys)
    assert len(res) == 3 * 4
    assert all(r.samples.size == 200 for r in res)


def test_run_sweep_single_path_constant_field():
    res = {r.scheme: r for r in run_sweep(small(experiment="cdf", l_r=1))}
    np.testing.assert_array_equal(res["MA"].samples, res["FPA"].samples)
    np.testing.assert_allclose(res["AS"].samples, res["FPA"].samples, rtol=1e-12)
    assert abs(res["MA"].mean - 1.0) < 3 * res["MA"].stderr


def test_fpa_sampling_correctness():
    cfg = ExperimentConfig(experiment="cdf", l_r=3, sigma2=2.0, n_realizations=10**4,
                           region_side=1.0, grid_step=0.5, schemes=("FPA",))
    (r,) = run_sweep(cfg)
    # relative gains: FPA should average exactly 1 in expectation
    assert abs(r.mean - 1.0) <= 3 * r.stderr


def test_region_monotonicity_per_realization():
    res = run_sweep(small(experiment="sweep-region", l_r=4, schemes=("MA",)))
    data = np.stack([r.samples for r in res])
    assert np.all(np.diff(data, axis=0) >= 0)


def test_run_sweep_thread_independence():
    cfg = small(experiment="sweep-paths", path_counts=(1, 3), n_realizations=50)
    a, b = run_sweep(cfg, threads=1), run_sweep(cfg, threads=3)
    for x, y in zip(a, b):
        assert (x.scheme, x.sweep_value) == (y.scheme, y.sweep_value)
        np.testing.assert_array_equal(x.samples, y.samples)


def test_power_ratio_sweep_values():
    res = run_sweep(small(experiment="power-ratio", power_ratios=(100.0, 2.0), schemes=("FPA",)))
    assert [r.sweep_value for r in res] == [2.0, 100.0]


def test_run_sweep_rejects_non_sweep_experiments():
    with pytest.raises(DomainError):
        run_sweep(small(experiment="period"))


# quantization and correlation experiments

def test_quantization_period_experiment():
    res = quantization_period_experiment([2, 64], 3, 200, step=0.02)
    by = {(r.sweep_value, r.scheme): r for r in res}
    for T in (2, 64):
        assert np.all(by[T, "ten_periods"].samples >= by[T, "one_period"].samples - 1e-12)
    gap2 = by[2, "ten_periods"].mean - by[2, "one_period"].mean
    gap64 = by[64, "ten_periods"].mean - by[64, "one_period"].mean
    assert gap2 > 0.1
    assert gap64 < gap2


def test_quantization_period_large_resolution_gap():
    res = quantization_period_experiment([512], 3, 200, step=0.01, seed=3)
    one, ten = (r.mean for r in res)
    assert (ten - one) / ten < 0.02


def test_correlation_experiment_small():
    d = [0.0, 0.25, 0.5]
    res = correlation_experiment(d, 20000, l_r=100, sigma2=2.0)
    for r in res:
        assert abs(r.mean - spatial_correlation(r.sweep_value, 2.0)) < 5 * r.stderr
    a = correlation_experiment([0.3], 2500, l_r=20, threads=1)[0].samples
    b = correlation_experiment([0.3], 2500, l_r=20, threads=2)[0].samples
    np.testing.assert_array_equal(a, b)
