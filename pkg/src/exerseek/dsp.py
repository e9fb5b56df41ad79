"""Streaming EMG processing chain and the windowed performance objective.

Per muscle channel, at 2 kHz:

    raw -> high-pass 30 Hz -> low-pass 900 Hz -> |.| -> low-pass 50 Hz
        -> divide by MVC scale -> activation

All filters are second-order Butterworth biquads from a pre-warped bilinear
transform.  The performance objective is the mean of the weighted activation
sum over a ring buffer holding exactly one cursor revolution, followed by a
second-order low-pass to tame sample-to-sample sensitivity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

SQRT2 = math.sqrt(2.0)


class InvalidCutoffError(ValueError):
    """Cutoff frequency outside (0, fs/2)."""


class DegenerateCalibrationError(ValueError):
    """Calibration stream carries no signal."""


@dataclass(frozen=True)
class BiquadCoeffs:
    """Normalized biquad coefficients (a0 = 1)."""

    b0: float
    b1: float
    b2: float
    a1: float
    a2: float

    def poles(self) -> tuple[complex, complex]:
        disc = cmath.sqrt(self.a1 * self.a1 - 4.0 * self.a2)
        return ((-self.a1 + disc) / 2.0, (-self.a1 - disc) / 2.0)

    @property
    def is_stable(self) -> bool:
        return all(abs(p) < 1.0 for p in self.poles())

    @property
    def dc_gain(self) -> float:
        return (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)


def design_butterworth(kind: str, fc: float, fs: float) -> BiquadCoeffs:
    """Second-order Butterworth low/high-pass via pre-warped bilinear transform.

    The pre-warp places |H| = 1/sqrt(2) exactly at fc.
    """
    if not 0.0 < fc < fs / 2.0:
        raise InvalidCutoffError(f"cutoff {fc} Hz must lie in (0, {fs / 2.0}) Hz")
    k = math.tan(math.pi * fc / fs)
    k2 = k * k
    norm = 1.0 / (1.0 + SQRT2 * k + k2)
    a1 = 2.0 * (k2 - 1.0) * norm
    a2 = (1.0 - SQRT2 * k + k2) * norm
    if kind == "lowpass":
        return BiquadCoeffs(k2 * norm, 2.0 * k2 * norm, k2 * norm, a1, a2)
    if kind == "highpass":
        return BiquadCoeffs(norm, -2.0 * norm, norm, a1, a2)
    raise ValueError(f"kind must be 'lowpass' or 'highpass', got {kind!r}")


def frequency_response(coeffs: BiquadCoeffs, f: float, fs: float) -> complex:
    """H(e^{j 2 pi f / fs}) evaluated from the coefficients."""
    z1 = cmath.exp(-2j * math.pi * f / fs)
    z2 = z1 * z1
    num = coeffs.b0 + coeffs.b1 * z1 + coeffs.b2 * z2
    den = 1.0 + coeffs.a1 * z1 + coeffs.a2 * z2
    return num / den


class Biquad:
    """Direct-form-II-transposed biquad, one stream per instance."""

    __slots__ = ("b0", "b1", "b2", "a1", "a2", "s1", "s2")

    def __init__(self, coeffs: BiquadCoeffs) -> None:
        self.b0 = coeffs.b0
        self.b1 = coeffs.b1
        self.b2 = coeffs.b2
        self.a1 = coeffs.a1
        self.a2 = coeffs.a2
        self.s1 = 0.0
        self.s2 = 0.0

    def step(self, x: float) -> float:
        y = self.b0 * x + self.s1
        self.s1 = self.b1 * x - self.a1 * y + self.s2
        self.s2 = self.b2 * x - self.a2 * y
        return y

    def reset(self) -> None:
        self.s1 = 0.0
        self.s2 = 0.0

    def prime(self, x: float) -> None:
        """Set internal state to the steady-state response for constant input x.

        A primed filter produces no startup transient when the stream begins
        at x and stays there.
        """
        den = 1.0 + self.a1 + self.a2
        y = (self.b0 + self.b1 + self.b2) / den * x
        self.s2 = self.b2 * x - self.a2 * y
        self.s1 = self.b1 * x - self.a1 * y + self.s2


class EmgPipeline:
    """Four-channel raw-EMG to activation chain with MVC normalization."""

    N_CHANNELS = 4

    def __init__(
        self,
        fs: float = 2000.0,
        band_low: float = 30.0,
        band_high: float = 900.0,
        envelope_cutoff: float = 50.0,
    ) -> None:
        self.fs = fs
        self.band_low = band_low
        self.band_high = band_high
        self.envelope_cutoff = envelope_cutoff
        hp = design_butterworth("highpass", band_low, fs)
        lp = design_butterworth("lowpass", band_high, fs)
        env = design_butterworth("lowpass", envelope_cutoff, fs)
        self._hp = [Biquad(hp) for _ in range(self.N_CHANNELS)]
        self._lp = [Biquad(lp) for _ in range(self.N_CHANNELS)]
        self._env = [Biquad(env) for _ in range(self.N_CHANNELS)]
        self.mvc_scale = np.ones(self.N_CHANNELS)

    def reset_filters(self) -> None:
        for f in (*self._hp, *self._lp, *self._env):
            f.reset()

    def process_sample(self, raw: tuple[float, float, float, float]) -> np.ndarray:
        """Bandpass, rectify, envelope and MVC-normalize one 4-channel sample."""
        out = np.empty(self.N_CHANNELS)
        hp, lp, env, mvc = self._hp, self._lp, self._env, self.mvc_scale
        for i in range(self.N_CHANNELS):
            banded = lp[i].step(hp[i].step(raw[i]))
            out[i] = env[i].step(abs(banded)) / mvc[i]
        return out

    def process_block(self, raw: np.ndarray) -> np.ndarray:
        """Stream an (n, 4) block through process_sample; returns (n, 4)."""
        raw = np.asarray(raw, dtype=float)
        out = np.empty_like(raw)
        for n in range(raw.shape[0]):
            out[n] = self.process_sample(tuple(raw[n]))
        return out

    def calibrate_mvc(self, raw: np.ndarray) -> None:
        """Set per-channel MVC scales from a maximal-effort recording.

        The scale is the mean envelope over the stream, so later activations
        read ~1.0 at the calibrated effort.  Requires at least 3 s of data.
        """
        raw = np.asarray(raw, dtype=float)
        if raw.shape[0] < 3.0 * self.fs:
            raise ValueError("calibration stream must cover at least 3 s")
        self.reset_filters()
        saved = self.mvc_scale
        self.mvc_scale = np.ones(self.N_CHANNELS)
        envelopes = self.process_block(raw)
        means = envelopes.mean(axis=0)
        if np.any(means < 1e-6):
            self.mvc_scale = saved
            self.reset_filters()
            raise DegenerateCalibrationError(
                f"mean calibration envelope too small: {means}"
            )
        self.mvc_scale = means
        self.reset_filters()


class PerformanceWindow:
    """Moving average of the weighted activation sum over one revolution.

    Holds round(t_rev / t_s) samples.  A running sum keeps the update O(1);
    it is recomputed from the buffer on every wrap so float drift cannot
    accumulate.  Before the window fills, the mean is over the samples seen.
    """

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._buf = [0.0] * capacity
        self._idx = 0
        self._count = 0
        self._sum = 0.0

    @classmethod
    def for_revolution(cls, t_rev: float, t_s: float) -> "PerformanceWindow":
        return cls(int(round(t_rev / t_s)))

    def push(self, x: float) -> float:
        """Insert one weighted sample and return the current window mean."""
        buf = self._buf
        i = self._idx
        self._sum += x - buf[i]
        buf[i] = x
        i += 1
        if i == self.capacity:
            i = 0
            self._sum = math.fsum(buf)
        self._idx = i
        if self._count < self.capacity:
            self._count += 1
        return self._sum / self._count

    @property
    def value(self) -> float:
        return self._sum / self._count if self._count else 0.0


def performance(window: PerformanceWindow, m: np.ndarray, w_m: np.ndarray) -> float:
    """Push the weighted activation sum w_m . m and return the window mean."""
    return window.push(float(np.dot(w_m, m)))


class PerformanceSmoother:
    """Second-order low-pass on the performance signal.

    Primed to the first sample so the smoother starts on the signal instead
    of ramping up from zero.
    """

    def __init__(self, fs: float, fc: float = 0.5) -> None:
        self._biquad = Biquad(design_butterworth("lowpass", fc, fs))
        self._primed = False

    def step(self, j: float) -> float:
        if not self._primed:
            self._biquad.prime(j)
            self._primed = True
        return self._biquad.step(j)

    def reset(self) -> None:
        self._biquad.reset()
        self._primed = False
