"""Baseband waveforms and their mapping onto the microwave drive.

Only the quantities the receiver physics consumes are represented: the AM
field envelope E_c * m(t) and the FM instantaneous detuning delta(t) (the
time derivative of the carrier phase). The carrier oscillation itself never
appears; in the rotating frame it is already folded away.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import OvermodulationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Sinusoid:
    """value(t) = 1 - depth * cos(2*pi*freq_s*t + phase)  (AM convention);
    for FM use, the same shape scaled by the signal amplitude."""

    freq_s: float = 1.0
    depth: float = 0.5
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.freq_s <= 0:
            raise ValueError("freq_s must be > 0")

    def __call__(self, t):
        return 1.0 - self.depth * np.cos(TWO_PI * self.freq_s * np.asarray(t)
                                         + self.phase)

    @property
    def bandwidth(self) -> float:
        return self.freq_s


@dataclass(frozen=True)
class Square:
    """Ideal square wave toggling between low (first) and high levels."""

    freq_s: float = 1.0
    duty: float = 0.5
    low: float = 0.5
    high: float = 1.5

    def __post_init__(self) -> None:
        if self.freq_s <= 0:
            raise ValueError("freq_s must be > 0")
        if not 0.0 < self.duty < 1.0:
            raise ValueError("duty must be in (0, 1)")

    def __call__(self, t):
        phase = np.mod(np.asarray(t) * self.freq_s, 1.0)
        return np.where(phase < self.duty, self.low, self.high)

    @property
    def bandwidth(self) -> float:
        return self.freq_s


@dataclass(frozen=True)
class Arbitrary:
    """Sampled waveform, hold- or linearly-interpolated."""

    samples: tuple
    sample_rate: float
    interpolation: str = "linear"

    def __post_init__(self) -> None:
        samples = tuple(float(x) for x in self.samples)
        object.__setattr__(self, "samples", samples)
        if len(samples) < 1:
            raise ValueError("need at least one sample")
        if not all(math.isfinite(x) for x in samples):
            raise ValueError("samples must be finite")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be > 0")
        if self.interpolation not in ("linear", "hold"):
            raise ValueError("interpolation must be 'linear' or 'hold'")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        y = np.asarray(self.samples)
        if self.interpolation == "hold":
            idx = np.clip((t * self.sample_rate).astype(int), 0, y.size - 1)
            return y[idx]
        tk = np.arange(y.size) / self.sample_rate
        return np.interp(t, tk, y)

    @property
    def bandwidth(self) -> float:
        return 0.5 * self.sample_rate


@dataclass(frozen=True)
class Baseband:
    waveform: "Sinusoid | Square | Arbitrary | FmCosine"
    duration: float = 1.0

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("duration must be > 0")

    def __call__(self, t):
        return self.waveform(t)

    @property
    def bandwidth(self) -> float:
        return self.waveform.bandwidth


def _dense_extrema(bb: Baseband, n: int = 4096):
    t = np.linspace(0.0, bb.duration, n)
    v = bb(t)
    return float(np.min(v)), float(np.max(v))


@dataclass(frozen=True)
class AmSignal:
    """Amplitude-modulated carrier: envelope E_c * m(t) with m(t) >= 0."""

    e_carrier: float
    baseband: Baseband
    carrier_freq: float = 16.98e9

    def __post_init__(self) -> None:
        if self.e_carrier <= 0:
            raise ValueError("e_carrier must be > 0")
        lo, _ = _dense_extrema(self.baseband)
        if lo < 0:
            raise OvermodulationError(
                f"AM envelope reaches {lo:.4f} < 0 (overmodulation)")


@dataclass(frozen=True)
class FmSignal:
    """Frequency-modulated carrier of fixed amplitude: the baseband supplies
    the instantaneous detuning delta(t) in rad/s."""

    e_carrier: float
    baseband: Baseband
    carrier_freq: float = 16.98e9
    max_detuning: float = field(init=False)

    def __post_init__(self) -> None:
        if self.e_carrier <= 0:
            raise ValueError("e_carrier must be > 0")
        lo, hi = _dense_extrema(self.baseband)
        object.__setattr__(self, "max_detuning", max(abs(lo), abs(hi)))


@dataclass(frozen=True)
class FmCosine:
    """delta(t) = -amplitude * cos(2*pi*freq_s*t + phase), in rad/s."""

    amplitude: float
    freq_s: float = 1.0
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.freq_s <= 0:
            raise ValueError("freq_s must be > 0")

    def __call__(self, t):
        return -self.amplitude * np.cos(TWO_PI * self.freq_s * np.asarray(t)
                                        + self.phase)

    @property
    def bandwidth(self) -> float:
        return self.freq_s


def fm_sinusoid(amplitude: float, freq_s: float = 1.0,
                duration: float = 1.0) -> Baseband:
    """Sinusoidal FM baseband delta(t) = -amplitude * cos(2*pi*freq_s*t)."""
    return Baseband(FmCosine(amplitude=amplitude, freq_s=freq_s), duration)


def am_envelope(sig: AmSignal, t) -> np.ndarray:
    """Modulated field amplitude E_cm(t) = E_c * m(t) in V/m."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > sig.baseband.duration):
        raise ValueError("t outside [0, duration]")
    return sig.e_carrier * np.asarray(sig.baseband(t), dtype=float)


def fm_detuning(sig: FmSignal, t) -> np.ndarray:
    """Instantaneous carrier detuning delta(t) in rad/s."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(t > sig.baseband.duration):
        raise ValueError("t outside [0, duration]")
    return np.asarray(sig.baseband(t), dtype=float)


def sample_times(baseband: Baseband, rate: float) -> np.ndarray:
    """Uniform spectroscopic sampling grid over the baseband duration."""
    if rate <= 0:
        raise ValueError("sampling rate must be > 0")
    if rate < 2.0 * baseband.bandwidth:
        warnings.warn(
            f"sampling rate {rate} Hz is below twice the baseband bandwidth "
            f"{baseband.bandwidth} Hz", RuntimeWarning, stacklevel=2)
    n = max(1, int(round(baseband.duration * rate)))
    return np.arange(n) / rate
