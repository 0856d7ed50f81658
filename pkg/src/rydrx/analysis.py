"""AT-peak extraction and the spectroscopic retrieval laws.

The receiver reads three numbers off every spectrum: the two AT peak
positions and their baseline-referenced heights. From those it retrieves

* the microwave field amplitude from the splitting, E = h * f_AT / dipole,
* the modulation index from field extrema, k = (Emax - Emin)/(Emax + Emin),
* the microwave detuning from the relative height difference
  F = (H+ - H-)/(H+ + H-) via  delta = -F * Omega / sqrt(1 - F^2),

where Omega is the modulation-free AT splitting. The detuning law inverts
the two-state dressed model exactly: peak strengths proportional to the
squared lower-Rydberg-state components give F(delta) = -delta /
sqrt(delta^2 + Omega^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants as sc
from scipy.signal import find_peaks as _find_peaks

from .doppler import Spectrum
from .errors import (AmbiguousPeaksError, AsymmetrySaturatedError,
                     UnresolvedSplittingError)

TWO_PI = 2.0 * math.pi

#: Fraction of the scan window on each side used for the baseline estimate.
BASELINE_FRACTION = 0.10
#: Local maxima below this prominence (relative to the signal range above
#: baseline) are treated as ripple, not peaks.
PROMINENCE_FRACTION = 0.08
#: A third prominent peak larger than this fraction of the second makes the
#: pairing ambiguous.
THIRD_PEAK_FRACTION = 0.20


@dataclass(frozen=True)
class AtPeaks:
    """The two AT peaks: positions (rad/s, sub-grid interpolated) and
    heights relative to the off-peak baseline."""

    pos_low: float
    pos_high: float
    h_minus: float
    h_plus: float
    baseline: float

    def __post_init__(self) -> None:
        if not self.pos_low < self.pos_high:
            raise ValueError("pos_low must be < pos_high")
        if self.h_minus <= 0 or self.h_plus <= 0:
            raise ValueError("peak heights must be > 0")


@dataclass(frozen=True)
class RetrievalConstants:
    """Constants entering the retrieval laws."""

    dipole_mw: float = 1.046e-26       # C m
    hbar: float = sc.hbar
    h: float = sc.h
    rabi_ref: float = TWO_PI * 35.52e6  # rad/s, modulation-free splitting

    def __post_init__(self) -> None:
        if min(self.dipole_mw, self.hbar, self.h, self.rabi_ref) <= 0:
            raise ValueError("retrieval constants must be positive")


def _quadratic_peak(axis: np.ndarray, signal: np.ndarray, i: int):
    """Sub-grid peak position/height from a three-point parabola."""
    if i == 0 or i == signal.size - 1:
        return float(axis[i]), float(signal[i]), False
    ym1, y0, yp1 = signal[i - 1], signal[i], signal[i + 1]
    denom = ym1 - 2.0 * y0 + yp1
    if denom == 0.0:  # flat top
        return float(axis[i]), float(y0), True
    p = 0.5 * (ym1 - yp1) / denom
    pos = axis[i] + p * (axis[min(i + 1, axis.size - 1)] - axis[i])
    height = y0 - 0.25 * (ym1 - yp1) * p
    return float(pos), float(height), False


def spectrum_baseline(spec: Spectrum) -> float:
    """Median signal over the outer window fraction on each side."""
    n = max(1, int(round(BASELINE_FRACTION * spec.signal.size)))
    return float(np.median(np.concatenate([spec.signal[:n], spec.signal[-n:]])))


def find_at_peaks(spec: Spectrum) -> AtPeaks:
    """Locate the two AT peaks of an EIT spectrum.

    Takes the two most prominent local maxima; positions and heights are
    refined by three-point quadratic interpolation and heights are reported
    relative to the off-peak baseline. Raises UnresolvedSplittingError when
    fewer than two peaks stand out and AmbiguousPeaksError when a third
    comparable peak makes the pairing unsafe.
    """
    s = spec.signal
    baseline = spectrum_baseline(spec)
    span = s.max() - baseline
    if span <= 0:
        raise UnresolvedSplittingError("spectrum has no signal above baseline")
    # point-to-point noise floor (robust MAD of the first difference); keeps
    # detector-noise ripple below the prominence cut
    diffs = np.diff(s)
    noise = 1.4826 * np.median(np.abs(diffs - np.median(diffs))) / np.sqrt(2.0)
    prominence = max(PROMINENCE_FRACTION * span, 6.0 * noise)
    idx, props = _find_peaks(s, prominence=prominence)
    if idx.size < 2:
        raise UnresolvedSplittingError(
            f"found {idx.size} resolved peak(s); AT splitting unresolved")
    order = np.argsort(props["prominences"])[::-1]
    if idx.size >= 3:
        second = props["prominences"][order[1]]
        third = props["prominences"][order[2]]
        if third >= max(THIRD_PEAK_FRACTION * second, 10.0 * noise):
            raise AmbiguousPeaksError(
                f"third peak with {third / second:.0%} of the second peak's "
                "prominence; pairing is ambiguous")
    i_a, i_b = sorted(idx[order[:2]])
    pos_a, height_a, flat_a = _quadratic_peak(spec.axis, s, i_a)
    pos_b, height_b, flat_b = _quadratic_peak(spec.axis, s, i_b)
    if flat_a or flat_b:
        import warnings
        warnings.warn("flat-topped AT peak; position from grid point",
                      RuntimeWarning, stacklevel=2)
    h_minus = height_a - baseline
    h_plus = height_b - baseline
    if h_minus <= 0 or h_plus <= 0:
        raise UnresolvedSplittingError("peak height not above baseline")
    return AtPeaks(pos_low=pos_a, pos_high=pos_b,
                   h_minus=h_minus, h_plus=h_plus, baseline=baseline)


def at_splitting(peaks: AtPeaks) -> float:
    """AT splitting as an ordinary frequency f_AT (Hz)."""
    return (peaks.pos_high - peaks.pos_low) / TWO_PI


def field_from_splitting(f_at: float, c: RetrievalConstants) -> float:
    """Microwave field amplitude (V/m) from the AT splitting (Hz)."""
    if f_at < 0:
        raise ValueError("f_AT must be >= 0")
    return c.h * f_at / c.dipole_mw


def rabi_from_field(e_field: float, c: RetrievalConstants) -> float:
    """Angular Rabi frequency (rad/s) of the microwave transition."""
    if e_field < 0:
        raise ValueError("field must be >= 0")
    return c.dipole_mw * e_field / c.hbar


def modulation_index(e_max: float, e_min: float) -> float:
    """AM modulation index from the field extrema."""
    if not (e_max >= e_min >= 0.0) or e_max <= 0.0:
        raise ValueError(f"require e_max >= e_min >= 0 and e_max > 0, "
                         f"got ({e_max}, {e_min})")
    return (e_max - e_min) / (e_max + e_min)


def asymmetry(peaks: AtPeaks) -> float:
    """Relative line-height difference F = (H+ - H-)/(H+ + H-)."""
    total = peaks.h_plus + peaks.h_minus
    if total <= 0:
        raise ValueError("total peak height must be > 0")
    return (peaks.h_plus - peaks.h_minus) / total


def detuning_from_asymmetry(f_value: float, c: RetrievalConstants,
                            guard: float = 1e-9) -> float:
    """Microwave detuning (rad/s) from the height asymmetry.

    delta = -F * Omega / sqrt(1 - F^2); diverges as |F| -> 1, so values at
    or past 1 - guard raise AsymmetrySaturatedError.
    """
    if abs(f_value) >= 1.0 - guard:
        raise AsymmetrySaturatedError(
            f"|F| = {abs(f_value):.12f} is outside the invertible range")
    return -f_value * c.rabi_ref / math.sqrt(1.0 - f_value * f_value)
