"""Scikit-learn style estimators wrapping the functional pipeline.

The expensive fitted state is the precomputed continuation (it depends
only on hyperparameters), so one fitted estimator amortizes that solve
across any number of series passed to transform/predict.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, OutlierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from .anomaly import (
    AnomalyReport,
    DetectionConfig,
    GuardParams,
    detect_edge_first,
    detect_edge_last,
    detect_internal,
)
from .bracing import FcParams, build_bracing_set
from .spectral import FilterSpec
from .trend import TrendConfig, bfcr_trend
from .validation import check_series


def _trend_config(est) -> TrendConfig:
    return TrendConfig(
        fc=FcParams(d=est.d, z=est.zero_matching, c_fc=est.continuation,
                    e=est.extra, n_over=est.oversampling),
        filter=FilterSpec(cutoff_fraction=est.cutoff_fraction, power=est.filter_power),
    )


class _BracingMixin:
    def _fit_bracing(self):
        self.config_ = _trend_config(self)
        self.bracing_ = build_bracing_set(self.config_.fc)
        return self

    def _check_fitted(self):
        if not hasattr(self, "bracing_"):
            raise NotFittedError(
                f"This {type(self).__name__} instance is not fitted yet. "
                "Call fit before using this method."
            )


class BracedFourierTrend(_BracingMixin, TransformerMixin, BaseEstimator):
    """Trend-line transformer for one-dimensional series.

    Parameters
    ----------
    d : int, default=12
        Brace length in points.
    zero_matching : int, default=12
        Zero-matching points on each side of the bridge interior.
    continuation : int, default=27
        Continuation length in points.
    extra : int, default=0
        Extra points widening the bridge period.
    oversampling : int, default=20
        Oversampling factor of the continuation solve.
    cutoff_fraction : float, default=0.2
        Retained fraction of the Nyquist band.
    filter_power : int, default=4
        Exponent applied to each Lanczos factor.

    Attributes
    ----------
    bracing_ : BracingSet
        Precomputed unit braces and continuation responses.
    config_ : TrendConfig
        Assembled pipeline configuration.

    Examples
    --------
    >>> est = BracedFourierTrend().fit()
    >>> trend = est.transform([1.0, 2.0, 4.0, 8.0, 9.0, 9.5])
    """

    def __init__(self, d=12, zero_matching=12, continuation=27, extra=0,
                 oversampling=20, cutoff_fraction=0.2, filter_power=4):
        self.d = d
        self.zero_matching = zero_matching
        self.continuation = continuation
        self.extra = extra
        self.oversampling = oversampling
        self.cutoff_fraction = cutoff_fraction
        self.filter_power = filter_power

    def fit(self, X=None, y=None):
        """Precompute the continuation responses. X is accepted for API
        compatibility and only validated."""
        if X is not None:
            check_series(X, min_points=4)
        return self._fit_bracing()

    def transform(self, X) -> np.ndarray:
        """Return the trend of a series, in the shape it arrived in."""
        self._check_fitted()
        arr = np.asarray(X, dtype=np.float64)
        trend = bfcr_trend(arr, self.config_, self.bracing_)
        return trend.reshape(arr.shape)


class InternalAnomalyDetector(_BracingMixin, OutlierMixin, BaseEstimator):
    """Interior-point outlier detector on trend residuals.

    predict labels every sample of the series: -1 for flagged outliers,
    +1 otherwise (endpoints are never flagged). ``report`` exposes the
    full deviation statistics and 1-based flag indices.

    Parameters
    ----------
    k_sigma : float, default=2.0
        Deviation threshold in population standard deviations.
    sided : {None, "two-sided", "one-sided-above"}, default=None
        None uses the internal-detection default (two-sided).
    min_points : int, default=6
        Minimum series length accepted.
    d, zero_matching, continuation, extra, oversampling, cutoff_fraction, \
filter_power :
        Trend pipeline knobs, as in BracedFourierTrend.
    """

    def __init__(self, k_sigma=2.0, sided=None, min_points=6, d=12,
                 zero_matching=12, continuation=27, extra=0, oversampling=20,
                 cutoff_fraction=0.2, filter_power=4):
        self.k_sigma = k_sigma
        self.sided = sided
        self.min_points = min_points
        self.d = d
        self.zero_matching = zero_matching
        self.continuation = continuation
        self.extra = extra
        self.oversampling = oversampling
        self.cutoff_fraction = cutoff_fraction
        self.filter_power = filter_power

    def _detection_config(self) -> DetectionConfig:
        return DetectionConfig(k_sigma=self.k_sigma, sided=self.sided,
                               min_points=self.min_points)

    def fit(self, X=None, y=None):
        if X is not None:
            check_series(X, min_points=self.min_points)
        return self._fit_bracing()

    def report(self, X) -> AnomalyReport:
        self._check_fitted()
        return detect_internal(X, self._detection_config(), self.config_, self.bracing_)

    def predict(self, X) -> np.ndarray:
        """Label samples: -1 outlier, +1 inlier."""
        rep = self.report(X)
        labels = np.ones(len(check_series(X)), dtype=int)
        for flag in rep.flagged:
            labels[flag.index - 1] = -1
        return labels


class EdgeAnomalyDetector(_BracingMixin, BaseEstimator):
    """Outlier detector for the first or last point of a series.

    predict returns -1 when the tested edge point is anomalous and +1
    otherwise; a guard skip counts as +1 (detection deemed unnecessary).
    ``report`` carries the verdict string, the edge sample, and the
    mitigation records.

    Parameters
    ----------
    which : {"last", "first"}, default="last"
        Edge to test.
    screen_internal : bool, default=True
        Remove internal outliers from the population statistics first.
    guards : bool, default=False
        Evaluate the low-noise guards before detecting.
    min_pct_change, cov_window, cov_threshold :
        Guard thresholds, used when guards is True.
    k_sigma, sided, min_points :
        Verdict thresholds; sided=None means one-sided-above for edges.
    d, zero_matching, continuation, extra, oversampling, cutoff_fraction, \
filter_power :
        Trend pipeline knobs, as in BracedFourierTrend.
    """

    def __init__(self, which="last", k_sigma=2.0, sided=None, min_points=6,
                 screen_internal=True, guards=False, min_pct_change=0.10,
                 cov_window=4, cov_threshold=0.2, d=12, zero_matching=12,
                 continuation=27, extra=0, oversampling=20,
                 cutoff_fraction=0.2, filter_power=4):
        self.which = which
        self.k_sigma = k_sigma
        self.sided = sided
        self.min_points = min_points
        self.screen_internal = screen_internal
        self.guards = guards
        self.min_pct_change = min_pct_change
        self.cov_window = cov_window
        self.cov_threshold = cov_threshold
        self.d = d
        self.zero_matching = zero_matching
        self.continuation = continuation
        self.extra = extra
        self.oversampling = oversampling
        self.cutoff_fraction = cutoff_fraction
        self.filter_power = filter_power

    def _detection_config(self) -> DetectionConfig:
        guard_params = None
        if self.guards:
            guard_params = GuardParams(min_pct_change=self.min_pct_change,
                                       cov_window=self.cov_window,
                                       cov_threshold=self.cov_threshold)
        return DetectionConfig(k_sigma=self.k_sigma, sided=self.sided,
                               min_points=self.min_points,
                               screen_internal=self.screen_internal,
                               guards=guard_params)

    def fit(self, X=None, y=None):
        if self.which not in ("first", "last"):
            raise ValueError(f"which must be 'first' or 'last', got {self.which!r}")
        if X is not None:
            check_series(X, min_points=self.min_points)
        return self._fit_bracing()

    def report(self, X) -> AnomalyReport:
        self._check_fitted()
        detect = detect_edge_first if self.which == "first" else detect_edge_last
        return detect(X, self._detection_config(), self.config_, self.bracing_)

    def predict(self, X) -> int:
        return -1 if self.report(X).verdict == "anomalous" else 1

    def fit_predict(self, X, y=None) -> int:
        return self.fit(X).predict(X)
