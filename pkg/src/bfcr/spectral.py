"""Discrete Fourier transform and the sigma-approximation low-pass filter.

Transform convention: coefficient[k] = sum_j x[j] exp(-2*pi*i*j*k/M), with
the inverse carrying the 1/M normalization. Spectra of real series are
conjugate-symmetric: coefficient[M-k] = conj(coefficient[k]).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, NonRealSignal, ShapeError


@dataclass(frozen=True)
class FilterSpec:
    """Low-pass filter knobs.

    cutoff_fraction is the retained fraction of the Nyquist band; the
    Lanczos factors are normalized against the resulting cutoff index and
    raised to ``power``.
    """

    cutoff_fraction: float = 0.2
    power: int = 4

    def __post_init__(self):
        if not 0.0 < self.cutoff_fraction <= 1.0:
            raise InvalidParams(
                f"cutoff_fraction must be in (0, 1], got {self.cutoff_fraction}"
            )
        if int(self.power) != self.power or self.power < 1:
            raise InvalidParams(f"power must be a positive integer, got {self.power}")


def dft(values) -> np.ndarray:
    """Forward transform of a real series (any fast algorithm, same sums)."""
    return np.fft.fft(np.asarray(values, dtype=np.float64))


def idft(spectrum, asym_tol: float = 1e-6) -> np.ndarray:
    """Inverse transform back to a real series.

    The spectrum must be conjugate-symmetric to relative tolerance
    ``asym_tol``; the tiny imaginary residue of the inverse is discarded.
    """
    spec = np.asarray(spectrum, dtype=np.complex128)
    scale = np.max(np.abs(spec))
    if scale > 0:
        mirrored = np.conj(spec[(-np.arange(len(spec))) % len(spec)])
        asym = np.max(np.abs(spec - mirrored)) / scale
        if asym > asym_tol:
            raise NonRealSignal(f"spectrum asymmetry {asym:.3g} exceeds {asym_tol:g}")
    return np.real(np.fft.ifft(spec))


def cutoff_index(m_total: int, cutoff_fraction: float) -> int:
    """First zeroed frequency bin: max(2, ceil(fraction * floor(M/2)))."""
    return max(2, int(np.ceil(cutoff_fraction * (m_total // 2))))


def sigma_weights(m_total: int, spec: FilterSpec | None = None) -> np.ndarray:
    """Per-bin weights of the sigma-approximation low-pass filter.

    With cutoff index M: w(0) = 1, w(k) = sinc(k/M)**power for 0 < k < M,
    and w(k) = 0 from M up to Nyquist. Weights are mirrored onto the
    conjugate bins so real series stay real through the filter.
    """
    spec = spec if spec is not None else FilterSpec()
    if m_total < 2:
        raise InvalidParams(f"filter length must be at least 2, got {m_total}")
    m_cut = cutoff_index(m_total, spec.cutoff_fraction)
    k = np.arange(m_total)
    kf = np.minimum(k, m_total - k).astype(np.float64)
    weights = np.zeros(m_total)
    weights[kf == 0] = 1.0
    inner = (kf > 0) & (kf < m_cut)
    t = kf[inner] / m_cut
    weights[inner] = (np.sin(np.pi * t) / (np.pi * t)) ** spec.power
    return weights


def lowpass(spectrum: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Apply per-bin weights; symmetric real weights preserve conjugate symmetry."""
    spec = np.asarray(spectrum)
    w = np.asarray(weights)
    if spec.shape != w.shape:
        raise ShapeError(f"spectrum has {spec.shape}, weights have {w.shape}")
    return spec * w
