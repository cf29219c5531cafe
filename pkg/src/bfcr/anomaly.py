"""Outlier detection on trend residuals, for interior points and edges.

Every detector compares absolute deviations between a series and its trend
against population statistics of those deviations (mean and standard
deviation with divisor n). Indices in reports are 1-based, matching row
numbers of the input. Three mitigations are available: volatility-regime
truncation, screening of internal outliers out of the edge population, and
low-noise guards that skip edge detection when it would only chase the
reconstruction's own edge bias.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bracing import BracingSet
from .errors import InvalidParams, NoData
from .series import reverse
from .trend import TrendConfig, bfcr_trend
from .validation import check_same_length, check_series

TWO_SIDED = "two-sided"
ONE_SIDED_ABOVE = "one-sided-above"

SKIP_PCT_CHANGE = "below percent-change threshold"
SKIP_DETERMINISTIC = "edge locally deterministic"


@dataclass(frozen=True)
class PopulationStats:
    mu: float
    sigma: float
    n: int


@dataclass(frozen=True)
class GuardParams:
    """Thresholds of the low-noise guards.

    min_pct_change bounds the relative change of the final step; the
    coefficient of variation of the last cov_window differences must reach
    cov_threshold for the edge to count as noisy enough to test.
    """

    min_pct_change: float = 0.10
    cov_window: int = 4
    cov_threshold: float = 0.2

    def __post_init__(self):
        if self.min_pct_change <= 0 or self.cov_threshold <= 0:
            raise InvalidParams("guard thresholds must be positive")
        if int(self.cov_window) != self.cov_window or self.cov_window < 3:
            raise InvalidParams(f"cov_window must be an integer >= 3, got {self.cov_window}")


@dataclass(frozen=True)
class VolParams:
    """Volatility-truncation loop knobs: acceptance band, trim step, floor."""

    ratio_low: float = 0.75
    ratio_high: float = 1.25
    trim_fraction: float = 0.20
    min_remaining_fraction: float = 0.50

    def __post_init__(self):
        if not 0 < self.ratio_low <= 1 <= self.ratio_high:
            raise InvalidParams("need 0 < ratio_low <= 1 <= ratio_high")
        if not 0 < self.trim_fraction < 1:
            raise InvalidParams("trim_fraction must be in (0, 1)")
        if not 0 < self.min_remaining_fraction < 1:
            raise InvalidParams("min_remaining_fraction must be in (0, 1)")


@dataclass(frozen=True)
class DetectionConfig:
    """Detection thresholds.

    sided defaults to two-sided for internal detection and one-sided-above
    for the edge verdict (a point unusually close to the trend is not an
    edge anomaly); set it explicitly to override either. guards=None leaves
    the low-noise guards off.
    """

    k_sigma: float = 2.0
    sided: str | None = None
    min_points: int = 6
    screen_internal: bool = True
    guards: GuardParams | None = None

    def __post_init__(self):
        if self.k_sigma <= 0:
            raise InvalidParams(f"k_sigma must be positive, got {self.k_sigma}")
        if self.sided is not None and self.sided not in (TWO_SIDED, ONE_SIDED_ABOVE):
            raise InvalidParams(f"sided must be {TWO_SIDED!r} or {ONE_SIDED_ABOVE!r}")
        if int(self.min_points) != self.min_points or self.min_points < 1:
            raise InvalidParams(f"min_points must be a positive integer, got {self.min_points}")


@dataclass(frozen=True)
class FlaggedPoint:
    index: int  # 1-based position in the input series
    deviation: float
    score: float


@dataclass(frozen=True)
class GuardRecord:
    evaluated: bool
    run: bool
    reason: str | None = None


@dataclass(frozen=True)
class ScreeningRecord:
    applied: bool
    excluded: tuple[int, ...] = ()
    sigma_before: float | None = None
    sigma_after: float | None = None


@dataclass(frozen=True)
class TruncationRecord:
    applied: bool
    iterations: int = 0
    kept_from_index: int = 1
    final_ratio: float | None = None


@dataclass(frozen=True)
class MitigationRecord:
    truncation: TruncationRecord | None = None
    screening: ScreeningRecord | None = None
    guards: GuardRecord | None = None


@dataclass(frozen=True)
class AnomalyReport:
    mode: str  # "internal" or "edge"
    flagged: tuple[FlaggedPoint, ...] = ()
    stats: PopulationStats | None = None
    edge_sample: float | None = None
    verdict: str | None = None  # edge mode: "anomalous" | "normal" | "skipped"
    reason: str | None = None
    which: str | None = None  # edge mode: "first" | "last"
    mitigations: MitigationRecord = field(default_factory=MitigationRecord)


@dataclass(frozen=True)
class GuardVerdict:
    run: bool
    reason: str | None = None


@dataclass(frozen=True)
class TruncationResult:
    values: np.ndarray
    iterations: int
    final_ratio: float
    stopped_in_band: bool


def population_stats(values, trend, exclude=None) -> PopulationStats:
    """Mean and standard deviation (divisor n) of absolute deviations."""
    x = check_series(values)
    y = check_series(trend)
    check_same_length(x, y, "series and trend")
    deviations = np.abs(x - y)
    if exclude:
        keep = np.ones(len(deviations), dtype=bool)
        keep[list(exclude)] = False
        deviations = deviations[keep]
    if len(deviations) == 0:
        raise NoData("no points remain after exclusion")
    return PopulationStats(
        mu=float(np.mean(deviations)),
        sigma=float(np.std(deviations)),
        n=len(deviations),
    )


def _resolve_sided(config: DetectionConfig, mode: str) -> str:
    if config.sided is not None:
        return config.sided
    return TWO_SIDED if mode == "internal" else ONE_SIDED_ABOVE


def _outlier_mask(deviations: np.ndarray, stats: PopulationStats,
                  k_sigma: float, sided: str) -> np.ndarray:
    if stats.sigma == 0.0:
        return np.zeros(len(deviations), dtype=bool)
    excess = deviations - stats.mu
    if sided == TWO_SIDED:
        return np.abs(excess) > k_sigma * stats.sigma
    return excess > k_sigma * stats.sigma


def detect_internal(values, config: DetectionConfig | None = None,
                    trend_config: TrendConfig | None = None,
                    bracing: BracingSet | None = None) -> AnomalyReport:
    """Flag interior points whose trend deviation is extreme.

    The population statistics use every point; only interior positions
    (neither first nor last) are eligible for flagging. With zero
    deviation spread nothing is flagged.
    """
    config = config if config is not None else DetectionConfig()
    x = check_series(values, min_points=config.min_points)
    y = bfcr_trend(x, trend_config, bracing)
    stats = population_stats(x, y)
    deviations = np.abs(x - y)
    sided = _resolve_sided(config, "internal")
    mask = _outlier_mask(deviations, stats, config.k_sigma, sided)
    mask[0] = mask[-1] = False
    flagged = tuple(
        FlaggedPoint(
            index=int(i) + 1,
            deviation=float(deviations[i]),
            score=float((deviations[i] - stats.mu) / stats.sigma),
        )
        for i in np.flatnonzero(mask)
    )
    return AnomalyReport(mode="internal", flagged=flagged, stats=stats)


def low_noise_guards(values, params: GuardParams | None = None) -> GuardVerdict:
    """Decide whether a series edge is noisy enough to be worth testing.

    Guard 1 skips when the relative magnitude of the last step is below
    min_pct_change. Guard 2 skips when the differences of the last
    cov_window points have a coefficient of variation below cov_threshold,
    meaning the edge is locally deterministic. Both pass: run.
    """
    params = params if params is not None else GuardParams()
    x = check_series(values, min_points=params.cov_window)

    denom = max(abs(x[-2]), 1e-300)
    if abs(x[-1] - x[-2]) / denom < params.min_pct_change:
        return GuardVerdict(run=False, reason=SKIP_PCT_CHANGE)

    diffs = np.diff(x[-params.cov_window:])
    mean_diff = float(np.mean(diffs))
    cov = np.inf if mean_diff == 0.0 else float(np.std(diffs)) / abs(mean_diff)
    if cov < params.cov_threshold:
        return GuardVerdict(run=False, reason=SKIP_DETERMINISTIC)
    return GuardVerdict(run=True)


def _screen_population(deviations: np.ndarray, stats: PopulationStats,
                       config: DetectionConfig):
    """Drop internal outliers from the edge population and refit the stats."""
    sided = _resolve_sided(config, "internal")
    mask = _outlier_mask(deviations, stats, config.k_sigma, sided)
    mask[0] = mask[-1] = False
    excluded = np.flatnonzero(mask)
    if len(excluded) == 0:
        return stats, ScreeningRecord(applied=True, excluded=(),
                                      sigma_before=stats.sigma, sigma_after=stats.sigma)
    keep = ~mask
    refit = PopulationStats(
        mu=float(np.mean(deviations[keep])),
        sigma=float(np.std(deviations[keep])),
        n=int(np.sum(keep)),
    )
    record = ScreeningRecord(
        applied=True,
        excluded=tuple(int(i) + 1 for i in excluded),
        sigma_before=stats.sigma,
        sigma_after=refit.sigma,
    )
    return refit, record


def detect_edge_last(values, config: DetectionConfig | None = None,
                     trend_config: TrendConfig | None = None,
                     bracing: BracingSet | None = None) -> AnomalyReport:
    """Decide whether the final point of a series is an outlier.

    Two trends are drawn: one without the final point, giving the
    population of deviations, and one with it, giving the sample
    s = |trend_full[N] - x[N]|. With guards configured, the low-noise
    guards run first and may return a skipped verdict. With screening on,
    internal outliers are removed from the population before the verdict.
    """
    config = config if config is not None else DetectionConfig()
    x = check_series(values, min_points=max(config.min_points, 5))

    guard_record = None
    if config.guards is not None:
        verdict = low_noise_guards(x, config.guards)
        guard_record = GuardRecord(evaluated=True, run=verdict.run, reason=verdict.reason)
        if not verdict.run:
            return AnomalyReport(
                mode="edge", which="last", verdict="skipped", reason=verdict.reason,
                mitigations=MitigationRecord(guards=guard_record),
            )

    head = x[:-1]
    trend_head = bfcr_trend(head, trend_config, bracing)
    trend_full = bfcr_trend(x, trend_config, bracing)
    deviations = np.abs(head - trend_head)
    stats = population_stats(head, trend_head)

    screening_record = None
    if config.screen_internal:
        stats, screening_record = _screen_population(deviations, stats, config)

    sample = float(abs(trend_full[-1] - x[-1]))
    sided = _resolve_sided(config, "edge")
    if stats.sigma == 0.0:
        anomalous = sample > stats.mu
    elif sided == TWO_SIDED:
        anomalous = abs(sample - stats.mu) > config.k_sigma * stats.sigma
    else:
        anomalous = (sample - stats.mu) > config.k_sigma * stats.sigma

    return AnomalyReport(
        mode="edge",
        which="last",
        stats=stats,
        edge_sample=sample,
        verdict="anomalous" if anomalous else "normal",
        mitigations=MitigationRecord(screening=screening_record, guards=guard_record),
    )


def detect_edge_first(values, config: DetectionConfig | None = None,
                      trend_config: TrendConfig | None = None,
                      bracing: BracingSet | None = None) -> AnomalyReport:
    """Decide whether the first point is an outlier: run on the reversal."""
    x = check_series(values, min_points=1)
    report = detect_edge_last(reverse(x), config, trend_config, bracing)
    n = len(x)
    screening = report.mitigations.screening
    if screening is not None and screening.excluded:
        # Position i of the reversed series is position N+1-i of the original.
        remapped = tuple(sorted(n + 1 - i for i in screening.excluded))
        screening = ScreeningRecord(
            applied=screening.applied,
            excluded=remapped,
            sigma_before=screening.sigma_before,
            sigma_after=screening.sigma_after,
        )
    return AnomalyReport(
        mode="edge",
        which="first",
        flagged=report.flagged,
        stats=report.stats,
        edge_sample=report.edge_sample,
        verdict=report.verdict,
        reason=report.reason,
        mitigations=MitigationRecord(
            truncation=report.mitigations.truncation,
            screening=screening,
            guards=report.mitigations.guards,
        ),
    )


def truncate_volatility(values, params: VolParams | None = None,
                        trend_config: TrendConfig | None = None,
                        bracing: BracingSet | None = None) -> TruncationResult:
    """Trim old-regime data until deviation spread is front/back homogeneous.

    Each pass draws a trend, splits the absolute deviations into halves
    (first half takes the extra point), and compares their standard
    deviations. While the ratio is outside [ratio_low, ratio_high], the
    leading ceil(trim_fraction * n) points are dropped. Stops in-band, or
    at the min_remaining_fraction floor of the original length.
    """
    params = params if params is not None else VolParams()
    x = check_series(values, min_points=8)
    n_original = len(x)
    current = x
    iterations = 0

    while True:
        trend = bfcr_trend(current, trend_config, bracing)
        deviations = np.abs(current - trend)
        first_half = deviations[:(len(deviations) + 1) // 2]
        second_half = deviations[(len(deviations) + 1) // 2:]
        sigma1 = float(np.std(first_half))
        sigma2 = float(np.std(second_half))
        if sigma2 == 0.0:
            ratio = 1.0 if sigma1 == 0.0 else np.inf
        else:
            ratio = sigma1 / sigma2

        if params.ratio_low <= ratio <= params.ratio_high:
            return TruncationResult(current, iterations, ratio, stopped_in_band=True)

        trim = int(np.ceil(params.trim_fraction * len(current)))
        remaining = len(current) - trim
        # 4 points is the hard floor below which no trend can be drawn.
        if remaining < params.min_remaining_fraction * n_original or remaining < 4:
            return TruncationResult(current, iterations, ratio, stopped_in_band=False)
        current = current[trim:]
        iterations += 1
