"""Perturbation-based extremum seeking for the ellipse orientation.

Single-parameter loop: high-pass the (normalized) performance signal,
demodulate with the sinusoidal dither, low-pass, integrate with gain k, and
add the dither back onto the estimate:

    xi_h = HP_wh(y / y_scale)
    xi_l = LP_wl(xi_h * sin(w1 t))
    theta_hat += k * xi_l * dt
    theta_cmd  = theta_hat + a * sin(w1 t)

Positive k climbs the performance map; negative k descends.  Both filters
are first-order sections discretized by the bilinear transform.  The
high-pass is primed to the first input sample, so a constant offset on y
never reaches the integrator, not even at startup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trajectory import wrap_orientation_deg


class NonFiniteInputError(ValueError):
    """Performance input was NaN or infinite; controller state left untouched."""


@dataclass(frozen=True)
class EscParams:
    amplitude: float = 0.1        # dither amplitude a, rad
    dither_freq: float = 1.0      # w1, rad/s
    lowpass_cutoff: float = 0.1   # w_l, rad/s
    highpass_cutoff: float = 0.5  # w_h, rad/s
    gain: float = 1000.0          # integrator gain k
    y_scale: float = 1.0          # performance normalization divisor

    def __post_init__(self) -> None:
        if self.amplitude <= 0.0:
            raise ValueError("EscParams.amplitude must be > 0")
        if self.lowpass_cutoff >= self.dither_freq:
            raise ValueError("EscParams.lowpass_cutoff must be < dither_freq")
        if self.highpass_cutoff >= self.dither_freq:
            raise ValueError("EscParams.highpass_cutoff must be < dither_freq")
        if self.lowpass_cutoff <= 0.0 or self.highpass_cutoff <= 0.0:
            raise ValueError("EscParams filter cutoffs must be > 0")
        if self.gain == 0.0:
            raise ValueError("EscParams.gain must be nonzero")
        if self.y_scale <= 0.0:
            raise ValueError("EscParams.y_scale must be > 0")


@dataclass
class EscState:
    """Integrator, filter memories and clock.  theta_hat is unwrapped."""

    theta_hat: float = 0.0
    t: float = 0.0
    hp_x: float = 0.0   # previous high-pass input
    hp_y: float = 0.0   # previous high-pass output
    lp_x: float = 0.0   # previous low-pass input
    lp_y: float = 0.0   # previous low-pass output
    primed: bool = False

    @property
    def theta_hat_deg(self) -> float:
        return wrap_orientation_deg(self.theta_hat)


def reset(theta0: float = 0.0) -> EscState:
    """Fresh controller state with the estimate at theta0 (rad)."""
    return EscState(theta_hat=float(theta0))


def esc_step(
    state: EscState, params: EscParams, y: float, dt: float
) -> tuple[EscState, float]:
    """Advance one sample on performance value y; returns (state, theta_cmd)."""
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    if not math.isfinite(y):
        raise NonFiniteInputError(f"performance input {y!r} at t = {state.t:.4f}")
    (theta_hat, t, hp_x, hp_y, lp_x, lp_y, primed), theta_cmd = _core(
        (state.theta_hat, state.t, state.hp_x, state.hp_y,
         state.lp_x, state.lp_y, state.primed),
        params.amplitude, params.dither_freq,
        params.lowpass_cutoff, params.highpass_cutoff,
        params.gain, params.y_scale, y, dt,
    )
    return (
        EscState(theta_hat, t, hp_x, hp_y, lp_x, lp_y, primed),
        theta_cmd,
    )


def _core(
    s: tuple, a: float, w1: float, wl: float, wh: float,
    k: float, y_scale: float, y: float, dt: float,
) -> tuple[tuple, float]:
    """Scalar update shared by esc_step and the real-time loop."""
    theta_hat, t, hp_x, hp_y, lp_x, lp_y, primed = s
    x = y / y_scale
    if not primed:
        hp_x = x       # no startup kick from the DC level
        primed = True

    # bilinear s/(s + wh):  y[n] = ((x[n]-x[n-1]) - (ch-1) y[n-1]) / (1+ch)
    ch = 0.5 * wh * dt
    xi_h = ((x - hp_x) - (ch - 1.0) * hp_y) / (1.0 + ch)
    hp_x, hp_y = x, xi_h

    t += dt
    sin_w1t = math.sin(w1 * t)
    xi_d = xi_h * sin_w1t

    # bilinear wl/(s + wl):  y[n] = (cl (x[n]+x[n-1]) - (cl-1) y[n-1]) / (1+cl)
    cl = 0.5 * wl * dt
    xi_l = (cl * (xi_d + lp_x) - (cl - 1.0) * lp_y) / (1.0 + cl)
    lp_x, lp_y = xi_d, xi_l

    theta_hat += k * xi_l * dt
    theta_cmd = theta_hat + a * sin_w1t
    return (theta_hat, t, hp_x, hp_y, lp_x, lp_y, primed), theta_cmd


@dataclass(frozen=True)
class ConvergenceStatus:
    converged: bool
    solution_deg: float | None = None     # wrapped to (-90, 90]
    convergence_time: float | None = None


def _window_ok(
    times: np.ndarray, theta_deg: np.ndarray, end: float,
    hold_s: float, band_deg: float,
) -> tuple[bool, float]:
    """Band test on the unwrapped samples in [end - hold_s, end]."""
    mask = (times >= end - hold_s) & (times <= end)
    window = theta_deg[mask]
    if window.size == 0:
        return False, 0.0
    median = float(np.median(window))
    ok = bool(np.all(np.abs(window - median) <= band_deg))
    return ok, median


def check_convergence(
    times: np.ndarray,
    theta_hat_deg: np.ndarray,
    now: float,
    *,
    band_deg: float = 10.0,
    hold_s: float = 10.0,
    check_interval: float = 1.0,
) -> ConvergenceStatus:
    """Declare convergence once the estimate holds a +/-band for hold_s seconds.

    Scans candidate window ends at check_interval hops; the first window
    whose samples all lie within band_deg of that window's median wins.
    theta_hat_deg must be the unwrapped estimate in degrees; the reported
    solution is the winning window's median, wrapped to (-90, 90].
    """
    times = np.asarray(times, dtype=float)
    theta_hat_deg = np.asarray(theta_hat_deg, dtype=float)
    if times.size == 0 or now - times[0] < hold_s:
        return ConvergenceStatus(converged=False)
    end = times[0] + hold_s
    while end <= now + 1e-9:
        ok, median = _window_ok(times, theta_hat_deg, end, hold_s, band_deg)
        if ok:
            return ConvergenceStatus(
                converged=True,
                solution_deg=wrap_orientation_deg(math.radians(median)),
                convergence_time=end,
            )
        end += check_interval
    return ConvergenceStatus(converged=False)
