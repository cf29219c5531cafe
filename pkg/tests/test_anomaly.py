import numpy as np
import pytest

from bfcr import (
    DetectionConfig,
    GuardParams,
    VolParams,
    bfcr_trend,
    detect_edge_first,
    detect_edge_last,
    detect_internal,
    low_noise_guards,
    population_stats,
    reverse,
    truncate_volatility,
)
from bfcr.errors import InvalidParams, NoData, TooFewPoints


def two_regime_series(seed=7):
    rng = np.random.default_rng(seed)
    return 20 + np.concatenate([rng.normal(0, 0.3, 50), rng.normal(0, 3.0, 50)])


def outlier_plus_edge_series():
    """Deterministic series with one large internal outlier and a moderate
    edge outlier, the situation screening exists for."""
    i = np.arange(1, 31)
    x = 10 + 0.5 * np.sin(2 * np.pi * i / 15)
    x[14] += 25.0
    x[-1] += 4.0
    return x


# --- population statistics ----------------------------------------------------

def test_population_stats_zero_deviation():
    x = np.arange(6.0)
    stats = population_stats(x, x)
    assert (stats.mu, stats.sigma, stats.n) == (0.0, 0.0, 6)


def test_population_stats_constant_deviation():
    x = np.zeros(4)
    stats = population_stats(x, x + 1.0)
    assert (stats.mu, stats.sigma) == (1.0, 0.0)


def test_population_stats_direct_case():
    stats = population_stats(np.array([0.0, 2.0]), np.zeros(2))
    assert (stats.mu, stats.sigma, stats.n) == (1.0, 1.0, 2)


def test_population_stats_exclusion():
    x = np.array([0.0, 2.0, 10.0])
    stats = population_stats(x, np.zeros(3), exclude=[2])
    assert (stats.mu, stats.sigma, stats.n) == (1.0, 1.0, 2)
    with pytest.raises(NoData):
        population_stats(x, np.zeros(3), exclude=[0, 1, 2])


# --- internal detection ---------------------------------------------------------

def test_internal_flags_spike(bracing):
    x = np.array([10.0, 10, 10, 10, 60, 10, 10, 10, 10, 10, 10, 10])
    report = detect_internal(x, bracing=bracing)
    assert [f.index for f in report.flagged] == [5]
    flag = report.flagged[0]
    # deviation and score agree with the reported statistics
    assert flag.score == pytest.approx((flag.deviation - report.stats.mu)
                                       / report.stats.sigma)
    assert flag.score > 2


def test_internal_constant_series_no_flags(bracing):
    report = detect_internal(np.full(10, 3.0), bracing=bracing)
    assert report.flagged == ()
    assert report.stats.sigma == 0.0


def test_internal_endpoints_never_flagged(bracing):
    x = np.full(12, 5.0)
    x[0] += 40.0  # huge deviation at the first point
    report = detect_internal(x, bracing=bracing)
    assert all(f.index not in (1, len(x)) for f in report.flagged)


def test_internal_affine_invariance(bracing, rng):
    x = 10 + rng.normal(size=40)
    x[20] += 8
    base = [f.index for f in detect_internal(x, bracing=bracing).flagged]
    for a in (-3.0, 0.5):
        for b in (0.0, 1000.0):
            flags = [f.index for f in
                     detect_internal(a * x + b, bracing=bracing).flagged]
            assert flags == base


def test_internal_min_points(bracing):
    with pytest.raises(TooFewPoints):
        detect_internal(np.arange(5.0), bracing=bracing)


def test_internal_k_sigma_monotonicity(bracing, rng):
    x = rng.normal(size=60)
    previous = None
    for k in (1.0, 1.5, 2.0, 3.0):
        flags = {f.index for f in
                 detect_internal(x, DetectionConfig(k_sigma=k), bracing=bracing).flagged}
        if previous is not None:
            assert flags <= previous
        previous = flags


def test_internal_one_sided_excludes_low_outliers(bracing, rng):
    x = 10 + rng.normal(size=50)
    x[25] += 9
    two = detect_internal(x, DetectionConfig(sided="two-sided"), bracing=bracing)
    one = detect_internal(x, DetectionConfig(sided="one-sided-above"), bracing=bracing)
    one_idx = {f.index for f in one.flagged}
    assert one_idx <= {f.index for f in two.flagged}
    assert all(f.score > 0 for f in one.flagged)


# --- edge detection --------------------------------------------------------------

def test_edge_last_quiet_and_displaced(bracing):
    rng = np.random.default_rng(3)
    x = 50 + rng.normal(0, 1.0, 40)
    assert detect_edge_last(x, bracing=bracing).verdict == "normal"
    displaced = x.copy()
    displaced[-1] += 10.0
    report = detect_edge_last(displaced, bracing=bracing)
    assert report.verdict == "anomalous"
    assert report.edge_sample - report.stats.mu > 2 * report.stats.sigma


def test_edge_sigma_zero_rules(bracing):
    flat = np.full(10, 2.0)
    report = detect_edge_last(flat, bracing=bracing)
    assert report.stats.sigma == 0.0
    assert report.verdict == "normal"  # s = 0 is not above mu = 0
    stepped = flat.copy()
    stepped[-1] += 5.0
    assert detect_edge_last(stepped, bracing=bracing).verdict == "anomalous"


def test_edge_screening_changes_verdict(bracing):
    x = outlier_plus_edge_series()
    plain = detect_edge_last(x, DetectionConfig(screen_internal=False), bracing=bracing)
    screened = detect_edge_last(x, DetectionConfig(screen_internal=True), bracing=bracing)
    assert plain.verdict == "normal"
    assert screened.verdict == "anomalous"
    record = screened.mitigations.screening
    assert 15 in record.excluded
    assert record.sigma_after < record.sigma_before
    assert screened.stats.sigma == record.sigma_after


def test_edge_screening_noop_without_outliers(bracing):
    # smooth ripple, no spikes: nothing to screen, so both paths agree exactly
    x = 4 + 0.2 * np.sin(2 * np.pi * np.arange(20) / 10)
    plain = detect_edge_last(x, DetectionConfig(screen_internal=False), bracing=bracing)
    screened = detect_edge_last(x, DetectionConfig(screen_internal=True), bracing=bracing)
    assert screened.mitigations.screening.excluded == ()
    assert screened.verdict == plain.verdict
    assert screened.stats == plain.stats


def test_edge_screening_never_raises_sigma(bracing):
    for seed in range(20):
        rng = np.random.default_rng(seed)
        x = rng.normal(size=40)
        x[int(rng.integers(2, 37))] += rng.uniform(0, 12)
        record = detect_edge_last(x, bracing=bracing).mitigations.screening
        assert record.sigma_after <= record.sigma_before


def test_edge_first_is_reversed_last(bracing):
    rng = np.random.default_rng(9)
    x = 5 + rng.normal(0, 0.5, 30)
    x[0] += 6.0
    first = detect_edge_first(x, bracing=bracing)
    last_on_reversed = detect_edge_last(reverse(x), bracing=bracing)
    assert first.verdict == last_on_reversed.verdict == "anomalous"
    assert first.edge_sample == last_on_reversed.edge_sample
    assert first.which == "first"


def test_edge_first_remaps_excluded_indices(bracing):
    x = outlier_plus_edge_series()[::-1].copy()  # outlier now at position 16
    report = detect_edge_first(x, bracing=bracing)
    assert report.verdict == "anomalous"
    assert 16 in report.mitigations.screening.excluded


def test_edge_palindrome_agreement(bracing):
    rng = np.random.default_rng(5)
    half = 3 + rng.normal(0, 1, 15)
    x = np.concatenate([half, half[::-1]])
    cfg = DetectionConfig()
    first = detect_edge_first(x, cfg, bracing=bracing)
    last = detect_edge_last(x, cfg, bracing=bracing)
    assert first.verdict == last.verdict
    assert first.edge_sample == pytest.approx(last.edge_sample, rel=1e-9)


def test_edge_affine_invariance(bracing, rng):
    x = rng.normal(size=30)
    x[-1] += 4
    base = detect_edge_last(x, bracing=bracing).verdict
    for a in (-2.0, 0.5):
        for b in (0.0, 500.0):
            assert detect_edge_last(a * x + b, bracing=bracing).verdict == base


def test_edge_min_points(bracing):
    with pytest.raises(TooFewPoints):
        detect_edge_last(np.arange(5.0), bracing=bracing)


def test_edge_guard_skip_produces_report(bracing):
    x = np.arange(1.0, 41.0)
    cfg = DetectionConfig(guards=GuardParams())
    report = detect_edge_last(x, cfg, bracing=bracing)
    assert report.verdict == "skipped"
    assert report.reason == "below percent-change threshold"
    assert report.stats is None
    assert report.mitigations.guards.run is False


# --- low-noise guards -------------------------------------------------------------

def test_guard_small_percent_change_skips():
    verdict = low_noise_guards(np.array([1.0, 2.0, 50.0, 100.0, 101.0]))
    assert verdict.run is False
    assert verdict.reason == "below percent-change threshold"


def test_guard_deterministic_edge_skips():
    verdict = low_noise_guards(np.array([0.0, 1.0, 2.0, 3.0, 4.0]))
    assert verdict.run is False
    assert verdict.reason == "edge locally deterministic"


def test_guard_exponential_runs():
    x = np.exp(np.arange(1.0, 11.0))
    verdict = low_noise_guards(x)
    assert verdict.run is True
    # both statistics clear their thresholds by a wide margin
    diffs = np.diff(x[-4:])
    cov = np.std(diffs) / abs(np.mean(diffs))
    assert cov == pytest.approx(0.729, abs=0.01)


def test_guard_zero_mean_differences_run():
    # oscillating edge: mean difference 0 means infinite variation, so run
    verdict = low_noise_guards(np.array([5.0, 1.0, 9.0, 1.0, 9.0]))
    assert verdict.run is True


def test_guard_window_too_large():
    with pytest.raises(TooFewPoints):
        low_noise_guards(np.array([1.0, 2.0, 3.0]), GuardParams(cov_window=4))


def test_guard_params_validation():
    for bad in (dict(min_pct_change=0.0), dict(cov_window=2), dict(cov_threshold=-1)):
        with pytest.raises(InvalidParams):
            GuardParams(**bad)


# --- volatility truncation ----------------------------------------------------------

def test_truncation_keeps_homogeneous_series(bracing):
    x = 5 + np.random.default_rng(2).normal(0, 1, 100)
    result = truncate_volatility(x, bracing=bracing)
    assert result.iterations == 0
    assert result.stopped_in_band
    np.testing.assert_array_equal(result.values, x)


def test_truncation_trims_two_regime_series(bracing):
    x = two_regime_series()
    result = truncate_volatility(x, bracing=bracing)
    assert len(result.values) < len(x)
    np.testing.assert_array_equal(result.values, x[len(x) - len(result.values):])
    if result.stopped_in_band:
        assert 0.75 <= result.final_ratio <= 1.25
    else:
        assert len(result.values) >= 0.5 * len(x) * 0.8  # floor stop


def test_truncation_iteration_bound(bracing):
    params = VolParams()
    bound = int(np.ceil(np.log(params.min_remaining_fraction)
                        / np.log(1 - params.trim_fraction))) + 1
    for seed in (7, 11, 42):
        result = truncate_volatility(two_regime_series(seed), params, bracing=bracing)
        assert result.iterations <= bound


def test_truncation_zero_deviation_stops_immediately(bracing):
    x = np.full(10, 1.5)
    result = truncate_volatility(x, bracing=bracing)
    assert result.iterations == 0
    assert result.final_ratio == 1.0
    assert result.stopped_in_band


def test_truncation_min_points(bracing):
    with pytest.raises(TooFewPoints):
        truncate_volatility(np.arange(7.0), bracing=bracing)


def test_vol_params_validation():
    for bad in (dict(ratio_low=0.0), dict(ratio_low=1.1, ratio_high=1.05),
                dict(trim_fraction=1.0), dict(min_remaining_fraction=0.0)):
        with pytest.raises(InvalidParams):
            VolParams(**bad)


def test_detection_config_validation():
    for bad in (dict(k_sigma=0.0), dict(sided="sideways"), dict(min_points=0)):
        with pytest.raises(InvalidParams):
            DetectionConfig(**bad)


# --- cross-op sanity -----------------------------------------------------------------

def test_fewer_flags_after_truncation(bracing):
    x = two_regime_series()
    full_flags = detect_internal(x, bracing=bracing).flagged
    kept = truncate_volatility(x, bracing=bracing).values
    trunc_flags = detect_internal(kept, bracing=bracing).flagged
    assert len(full_flags) > len(trunc_flags)


def test_reported_deviations_match_trend(bracing, rng):
    x = rng.normal(size=30)
    x[10] += 6
    report = detect_internal(x, bracing=bracing)
    trend = bfcr_trend(x, bracing=bracing)
    for flag in report.flagged:
        assert flag.deviation == pytest.approx(abs(x[flag.index - 1] - trend[flag.index - 1]))
