"""Trend extraction: periodic extension, low-pass reconstruction, realignment."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bracing import BracingSet, FcParams, brace_extend, build_bracing_set
from .errors import InvalidParams, NumericalFailure
from .spectral import FilterSpec, dft, idft, lowpass, sigma_weights
from .validation import check_series


@dataclass(frozen=True)
class TrendConfig:
    fc: FcParams = field(default_factory=FcParams)
    filter: FilterSpec = field(default_factory=FilterSpec)


def bfcr_trend(values, config: TrendConfig | None = None,
               bracing: BracingSet | None = None) -> np.ndarray:
    """Extract the trend line of a series, aligned sample-for-sample.

    Pipeline: extend the series to a periodic sequence with scaled braces
    and the precomputed continuation, subtract the extension mean, apply
    the sigma-approximation low-pass in the frequency domain, keep the
    original sample positions, restore the mean, and finally remove the
    average offset between reconstruction and input so the trend mean
    equals the series mean exactly.

    The computation runs in an affine-normalized frame (series shifted to
    zero mean and unit spread, results mapped back), which makes the trend
    exactly equivariant under value scaling and offset: the trend of
    a*x + b is a*trend(x) + b to rounding. Pass a precomputed ``bracing``
    to amortize the continuation solve across many series.
    """
    config = config if config is not None else TrendConfig()
    if bracing is None:
        bracing = build_bracing_set(config.fc)
    elif bracing.params != config.fc:
        raise InvalidParams(
            f"bracing set was built for {bracing.params}, config asks for {config.fc}"
        )

    x = check_series(values, min_points=4)
    with np.errstate(over="ignore"):
        offset = float(np.mean(x))
        scale = float(np.std(x))
    if not np.isfinite(offset) or not np.isfinite(scale):
        raise NumericalFailure("series mean or spread overflowed")
    if scale == 0.0:
        return x.copy()

    normalized = (x - offset) / scale
    extended = brace_extend(normalized, bracing)
    ext_mean = float(np.mean(extended.values))
    spectrum = dft(extended.values - ext_mean)
    weights = sigma_weights(len(extended.values), config.filter)
    reconstructed = idft(lowpass(spectrum, weights))
    kept = reconstructed[extended.d:extended.d + extended.n_original] + ext_mean

    trend = scale * kept + offset
    trend -= np.mean(trend - x)
    if not np.all(np.isfinite(trend)):
        raise NumericalFailure("trend reconstruction produced non-finite values")
    return trend
