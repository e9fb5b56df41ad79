"""Ellipse reference path: fixed axes, variable orientation, revolving cursor."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class EllipseSpec:
    """Ellipse geometry and cursor revolution timing.

    The cursor sweeps the ellipse once per t_rev seconds at a uniform
    parameter rate.  Orientation theta is supplied per call because the
    optimizer rotates the path while the spec stays fixed.
    """

    center: tuple[float, float] = (0.45, -0.10)
    a_x: float = 0.20   # semi-major axis, m
    a_y: float = 0.08   # semi-minor axis, m
    t_rev: float = 1.4  # revolution period, s
    phase0: float = 0.0

    def __post_init__(self) -> None:
        if not (self.a_x >= self.a_y > 0.0):
            raise ValueError("EllipseSpec requires a_x >= a_y > 0")
        if self.t_rev <= 0.0:
            raise ValueError("EllipseSpec.t_rev must be > 0")


def ellipse_point(spec: EllipseSpec, theta: float, t: float) -> np.ndarray:
    """Cursor position at time t on the ellipse oriented by theta (rad)."""
    phi = TWO_PI * t / spec.t_rev + spec.phase0
    ex = spec.a_x * math.cos(phi)
    ey = spec.a_y * math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    return np.array(
        [spec.center[0] + ct * ex - st * ey, spec.center[1] + st * ex + ct * ey]
    )


def ellipse_velocity(spec: EllipseSpec, theta: float, t: float) -> np.ndarray:
    """Cursor velocity (time derivative of ellipse_point at fixed theta)."""
    rate = TWO_PI / spec.t_rev
    phi = rate * t + spec.phase0
    ex = -spec.a_x * math.sin(phi) * rate
    ey = spec.a_y * math.cos(phi) * rate
    ct, st = math.cos(theta), math.sin(theta)
    return np.array([ct * ex - st * ey, st * ex + ct * ey])


def ellipse_path(spec: EllipseSpec, theta: float, n: int) -> np.ndarray:
    """n uniform samples of one revolution, shape (n, 2)."""
    if n < 2:
        raise ValueError("ellipse_path requires n >= 2")
    step = spec.t_rev / n
    return np.array([ellipse_point(spec, theta, k * step) for k in range(n)])


def wrap_orientation_deg(theta_rad: float) -> float:
    """Report an unwrapped orientation as degrees in (-90, 90].

    The ellipse is symmetric under a half-turn, so orientation is only
    meaningful modulo 180 degrees.
    """
    deg = math.degrees(theta_rad)
    return 90.0 - ((90.0 - deg) % 180.0)
