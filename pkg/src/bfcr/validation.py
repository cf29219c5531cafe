"""Input validation helpers shared by the functional API and the estimators."""

import numpy as np

from .errors import NonFiniteValue, TooFewPoints


def check_series(x, min_points: int = 1, name: str = "series") -> np.ndarray:
    """Coerce ``x`` to a 1-D float64 array of finite values.

    Accepts any 1-D array-like, or a 2-D column of shape (n, 1).
    Raises TooFewPoints if fewer than ``min_points`` samples remain and
    NonFiniteValue if any entry is NaN or infinite.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] < min_points:
        raise TooFewPoints(
            f"{name} must contain at least {min_points} data points, got {arr.shape[0]}"
        )
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"{name} contains NaN or infinite values")
    return arr


def check_same_length(a: np.ndarray, b: np.ndarray, what: str = "arrays") -> None:
    if len(a) != len(b):
        raise ValueError(f"{what} must have equal length, got {len(a)} and {len(b)}")
