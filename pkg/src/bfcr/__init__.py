"""Braced Fourier continuation trend extraction and anomaly detection.

A series is made periodic by wrapping it in precomputed, per-dataset
scaled brace ramps, so its Fourier representation is free of endpoint
artifacts; a sigma-approximation low-pass then separates trend from
noise. Deviations from the trend drive interior and edge outlier
detection with the mitigations needed on volatile, pre-contaminated, or
noise-free data.

Use the scikit-learn style estimators (BracedFourierTrend,
InternalAnomalyDetector, EdgeAnomalyDetector) for ecosystem composition,
or the functional API (bfcr_trend, detect_internal, detect_edge_last,
detect_edge_first, truncate_volatility, low_noise_guards) directly.
"""

from . import errors
from .anomaly import (
    AnomalyReport,
    DetectionConfig,
    FlaggedPoint,
    GuardParams,
    GuardVerdict,
    PopulationStats,
    TruncationResult,
    VolParams,
    detect_edge_first,
    detect_edge_last,
    detect_internal,
    low_noise_guards,
    population_stats,
    truncate_volatility,
)
from .bracing import (
    BracingSet,
    ExtendedSeries,
    FcParams,
    LineFit,
    ScalingPoints,
    brace_extend,
    bridge_continuation,
    build_bracing_set,
    default_brace_shape,
    fit_line3,
    left_scaling_point,
    load_bracing_set,
    right_scaling_point,
    save_bracing_set,
    scaling_points,
)
from .estimators import BracedFourierTrend, EdgeAnomalyDetector, InternalAnomalyDetector
from .series import emit_csv, parse_csv, reverse
from .spectral import FilterSpec, dft, idft, lowpass, sigma_weights
from .trend import TrendConfig, bfcr_trend
from .validation import check_series

__version__ = "0.1.0"

__all__ = [
    "AnomalyReport",
    "BracedFourierTrend",
    "BracingSet",
    "DetectionConfig",
    "EdgeAnomalyDetector",
    "ExtendedSeries",
    "FcParams",
    "FilterSpec",
    "FlaggedPoint",
    "GuardParams",
    "GuardVerdict",
    "InternalAnomalyDetector",
    "LineFit",
    "PopulationStats",
    "ScalingPoints",
    "TrendConfig",
    "TruncationResult",
    "VolParams",
    "bfcr_trend",
    "brace_extend",
    "bridge_continuation",
    "build_bracing_set",
    "check_series",
    "default_brace_shape",
    "detect_edge_first",
    "detect_edge_last",
    "detect_internal",
    "dft",
    "emit_csv",
    "errors",
    "fit_line3",
    "idft",
    "left_scaling_point",
    "load_bracing_set",
    "low_noise_guards",
    "lowpass",
    "parse_csv",
    "population_stats",
    "reverse",
    "right_scaling_point",
    "save_bracing_set",
    "scaling_points",
    "sigma_weights",
    "truncate_volatility",
]
