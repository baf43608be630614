import math

import numpy as np
import pytest

from spdclink.analysis import (
    FringeTrace,
    expected_period_bins,
    find_extrema,
    fit_cosine,
    linear_visibility_extrapolation,
    monte_carlo_visibility,
    shot_noise_visibility_error,
    visibility,
)
from spdclink.errors import DegenerateInputError

REFERENCE_POINTS = [(2.0, 0.9615), (20.0, 0.9205), (70.0, 0.8390)]


def cosine_trace(n_bins=996, period_bins=12, vis=0.9, mean=50.0, shift=5,
                 bin_duration=0.07):
    # period commensurate with the binning, so extrema are sampled exactly
    k = np.arange(n_bins)
    counts = mean * (1.0 + vis * np.cos(2.0 * np.pi * (k - shift) / period_bins))
    return FringeTrace(counts=counts, bin_duration=bin_duration)


def test_expected_period_bins_values():
    assert expected_period_bins(405.5e-9, 180e-9, 2.0, 70e-3) == pytest.approx(16.09, abs=0.01)
    assert expected_period_bins(405.5e-9, 180e-9, 1.0, 70e-3) == pytest.approx(32.18, abs=0.01)
    assert expected_period_bins(405.5e-9, 180e-9, 2.0, 1e-6) > 1e4


def test_expected_period_bins_validation():
    with pytest.raises(ValueError):
        expected_period_bins(405.5e-9, 0.0, 2.0, 70e-3)


def test_find_extrema_counts_on_pure_cosine():
    trace = cosine_trace(n_bins=996, period_bins=12)
    result = find_extrema(trace, 12.0)
    assert abs(result.n_maxima - 83) <= 1
    assert abs(result.n_minima - 83) <= 1


def test_find_extrema_constant_trace():
    trace = FringeTrace(counts=np.full(200, 7.0), bin_duration=0.07)
    result = find_extrema(trace, 16.0)
    assert result.n_maxima == 0
    assert result.n_minima == 0


def test_find_extrema_offset_invariance():
    rng = np.random.default_rng(51)
    counts = rng.poisson(40.0 * (1.0 + 0.9 * np.cos(np.arange(500) / 2.5)), 500)
    a = find_extrema(FringeTrace(counts, 0.07), 16.0)
    b = find_extrema(FringeTrace(counts + 1000, 0.07), 16.0)
    assert np.array_equal(a.max_indices, b.max_indices)
    assert np.array_equal(a.min_indices, b.min_indices)


def test_find_extrema_recovers_model_visibility_exactly():
    trace = cosine_trace(vis=0.87)
    result = find_extrema(trace, 12.0)
    vhat = visibility(result.maxima.mean(), result.minima.mean())
    assert abs(vhat - 0.87) < 1e-6


def test_find_extrema_separation_enforced():
    rng = np.random.default_rng(52)
    counts = rng.poisson(47.0 * (1.0 + 0.95 * np.cos(np.arange(1000) * 2 * np.pi / 16.09)))
    result = find_extrema(FringeTrace(counts, 0.07), 16.09)
    assert np.all(np.diff(result.max_indices) >= 8)
    assert np.all(np.diff(result.min_indices) >= 8)


def test_find_extrema_plateau_resolves_to_earlier_bin():
    counts = np.array([0, 0, 5, 5, 0, 0, 0, 0, 5, 5, 0, 0], dtype=float)
    result = find_extrema(FringeTrace(counts, 0.07), 5.0)
    assert result.max_indices.tolist() == [2, 8]


def test_find_extrema_short_trace_warns():
    trace = cosine_trace(n_bins=10, period_bins=12)
    with pytest.warns(UserWarning):
        result = find_extrema(trace, 12.0)
    assert result.n_maxima == 0


def test_find_extrema_requires_resolvable_period():
    with pytest.raises(ValueError):
        find_extrema(cosine_trace(), 3.0)


def test_visibility_values():
    assert visibility(100.0, 1.96) == pytest.approx(0.96155, abs=1e-5)
    assert visibility(7.0, 7.0) == 0.0
    assert visibility(9.0, 0.0) == 1.0


def test_visibility_zero_denominator():
    with pytest.raises(DegenerateInputError):
        visibility(0.0, 0.0)


def test_visibility_negative_warns():
    with pytest.warns(UserWarning):
        v = visibility(1.0, 2.0)
    assert v == pytest.approx(-1.0 / 3.0)


def test_monte_carlo_high_count_limit():
    est = monte_carlo_visibility([1e6] * 3, [0.0] * 3, n_samples=10_000, seed=1)
    assert est.mean == pytest.approx(1.0, abs=1e-4)
    assert est.std < 1e-3


def test_monte_carlo_single_extrema_matches_closed_form():
    est = monte_carlo_visibility([100.0], [1.96], n_samples=100_000, seed=2)
    closed = shot_noise_visibility_error(100.0, 1.96)
    assert est.std == pytest.approx(closed, rel=0.05)
    assert est.std == pytest.approx(0.027, abs=0.002)


def test_monte_carlo_deterministic():
    a = monte_carlo_visibility([80.0, 90.0], [2.0, 3.0], n_samples=20_000, seed=3)
    b = monte_carlo_visibility([80.0, 90.0], [2.0, 3.0], n_samples=20_000, seed=3)
    assert a.mean == b.mean
    assert a.std == b.std
    assert np.array_equal(a.samples, b.samples)


def test_monte_carlo_validation():
    with pytest.raises(DegenerateInputError):
        monte_carlo_visibility([], [1.0], n_samples=10_000)
    with pytest.raises(ValueError):
        monte_carlo_visibility([10.0], [1.0], n_samples=100)


def test_monte_carlo_converges_to_closed_form_at_high_counts():
    for mu in (1e3, 1e4):
        for vis_true in (0.3, 0.6, 0.9):
            mu_min = mu * (1.0 - vis_true) / (1.0 + vis_true)
            est = monte_carlo_visibility([mu], [mu_min], n_samples=100_000, seed=4)
            closed = shot_noise_visibility_error(mu, mu_min)
            assert est.std == pytest.approx(closed, rel=0.05)


def test_shot_noise_closed_form_values():
    assert shot_noise_visibility_error(100.0, 1.96) == pytest.approx(0.0272, abs=5e-4)
    assert shot_noise_visibility_error(13.0, 1.14) == pytest.approx(0.145, abs=2e-3)
    assert shot_noise_visibility_error(50.0, 0.0) == 0.0


def test_shot_noise_validation():
    with pytest.raises(DegenerateInputError):
        shot_noise_visibility_error(0.0, 0.0)
    with pytest.raises(ValueError):
        shot_noise_visibility_error(-1.0, 1.0)


def test_fit_cosine_recovers_noiseless_parameters():
    period = 1.1264
    t = (np.arange(1000) + 0.5) * 0.07
    counts = 47.25 * (1.0 + 0.96 * np.cos(2.0 * np.pi * t / period + 0.4))
    trace = FringeTrace(counts=counts, bin_duration=0.07)
    fit = fit_cosine(trace, period * 1.05)
    assert fit.converged
    assert fit.visibility == pytest.approx(0.96, rel=1e-8)
    assert fit.period == pytest.approx(period, rel=1e-8)
    assert fit.offset == pytest.approx(47.25, rel=1e-8)
    assert fit.residual < 1e-8


def test_fit_cosine_on_poisson_noised_trace():
    rng = np.random.default_rng(53)
    period = 1.1264
    t = (np.arange(1000) + 0.5) * 0.07
    model = 47.25 * (1.0 + 0.96 * np.cos(2.0 * np.pi * t / period))
    hits = 0
    for _ in range(20):
        trace = FringeTrace(rng.poisson(model), bin_duration=0.07)
        fit = fit_cosine(trace, period)
        sigma = shot_noise_visibility_error(
            47.25 * 1.96, 47.25 * 0.04
        )
        if abs(fit.visibility - 0.96) < 2.0 * sigma:
            hits += 1
    assert hits >= 18


def test_fit_cosine_constant_trace():
    trace = FringeTrace(np.full(300, 40.0), bin_duration=0.07)
    fit = fit_cosine(trace, 1.1264)
    assert abs(fit.amplitude) / fit.offset < 1e-3


def test_extrapolation_reference_points():
    fit = linear_visibility_extrapolation(REFERENCE_POINTS)
    assert fit.slope == pytest.approx(-0.0017646, rel=1e-4)
    assert fit.intercept == pytest.approx(0.96112, rel=1e-4)
    assert fit.visibility_at(250.0) == pytest.approx(0.520, abs=2e-3)
    assert fit.visibility_at(500.0) == pytest.approx(0.0788, abs=2e-3)
    assert fit.distance_at(0.50) == pytest.approx(261.3, abs=0.5)
    assert fit.distance_at(0.10) == pytest.approx(488.0, abs=0.5)


def test_extrapolation_two_points_exact():
    fit = linear_visibility_extrapolation([(0.0, 1.0), (100.0, 0.5)])
    assert fit.slope == pytest.approx(-0.005)
    assert fit.intercept == pytest.approx(1.0)


def test_extrapolation_flat_line():
    fit = linear_visibility_extrapolation([(2.0, 0.9), (20.0, 0.9), (70.0, 0.9)])
    assert fit.slope == pytest.approx(0.0, abs=1e-12)
    assert math.isinf(fit.distance_at(0.5))


def test_extrapolation_validation():
    with pytest.raises(ValueError):
        linear_visibility_extrapolation([(2.0, 0.9)])
    with pytest.raises(DegenerateInputError):
        linear_visibility_extrapolation([(2.0, 0.9), (2.0, 0.8)])


def test_visibility_scale_invariance():
    rng = np.random.default_rng(54)
    for _ in range(50):
        maxima = rng.uniform(50.0, 150.0, 5)
        minima = rng.uniform(0.0, 10.0, 5)
        k = rng.uniform(0.1, 100.0)
        v1 = visibility(maxima.mean(), minima.mean())
        v2 = visibility((k * maxima).mean(), (k * minima).mean())
        assert v1 == pytest.approx(v2, rel=1e-12)
