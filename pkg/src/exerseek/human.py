"""Surrogate human: cursor-tracking force, muscle recruitment, raw EMG.

The real muscle dynamics are unknown to the optimizer; this module is the
simulator's stand-in.  The tracker is a spring-damper pulling the hand
toward a delayed target.  Effort maps to four muscle activations by
rectified projection of the applied force onto each muscle's preferred pull
direction, scaled up by a slow recruitment (fatigue) multiplier.  Raw EMG is
the activation amplitude-modulating a unit-RMS band-limited noise carrier.

In interactive mode a live cursor replaces the modeled target and the same
spring-damper law turns the human's actual tracking into force.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .dsp import design_butterworth

MUSCLE_NAMES = (
    "lateral_deltoid",
    "anterior_deltoid",
    "biceps_brachii",
    "pectoralis_major",
)

ACTIVATION_MAX = 1.5


def _unit_directions(angles_deg: tuple[float, ...]) -> np.ndarray:
    rad = np.radians(angles_deg)
    return np.column_stack([np.cos(rad), np.sin(rad)])


@dataclass(frozen=True)
class HumanParams:
    """Tracking behavior of the simulated subject."""

    kp: float = 400.0          # tracking stiffness, N/m
    kd: float = 20.0           # tracking damping, N s/m
    delay: float = 0.015       # effective lag; periodic targets are anticipated
    force_noise: float = 2.0   # sigma of added force noise, N

    def __post_init__(self) -> None:
        if self.kp <= 0.0:
            raise ValueError("HumanParams.kp must be > 0")
        if self.kd < 0.0 or self.delay < 0.0 or self.force_noise < 0.0:
            raise ValueError("HumanParams: kd, delay, force_noise must be >= 0")


@dataclass(frozen=True)
class MuscleModel:
    """Directional recruitment surrogate for the four monitored muscles.

    Order: lateral deltoid, anterior deltoid, biceps brachii, pectoralis
    major.  Directions are preferred pull directions in the task plane.
    """

    direction_deg: tuple[float, float, float, float] = (100.0, 60.0, 80.0, -20.0)
    f_max: tuple[float, float, float, float] = (120.0, 120.0, 100.0, 200.0)
    fatigue_gain: tuple[float, float, float, float] = (0.3, 0.3, 0.3, 0.3)
    fatigue_tau: float = 120.0        # s
    activation_noise: float = 0.02
    directions: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if any(f <= 0.0 for f in self.f_max):
            raise ValueError("MuscleModel.f_max entries must be > 0")
        if any(b < 0.0 for b in self.fatigue_gain):
            raise ValueError("MuscleModel.fatigue_gain entries must be >= 0")
        if self.fatigue_tau <= 0.0:
            raise ValueError("MuscleModel.fatigue_tau must be > 0")
        if self.activation_noise < 0.0:
            raise ValueError("MuscleModel.activation_noise must be >= 0")
        object.__setattr__(self, "directions", _unit_directions(self.direction_deg))


@dataclass
class FatigueState:
    """Per-muscle recruitment multiplier and accumulated active time."""

    recruitment: np.ndarray = field(default_factory=lambda: np.ones(4))
    active_time: np.ndarray = field(default_factory=lambda: np.zeros(4))


def tracking_force(
    params: HumanParams,
    p: np.ndarray,
    pdot: np.ndarray,
    p_des_delayed: np.ndarray,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Spring-damper force toward the delayed target, plus Gaussian noise."""
    f = params.kp * (np.asarray(p_des_delayed) - np.asarray(p)) \
        - params.kd * np.asarray(pdot)
    if rng is not None and params.force_noise > 0.0:
        f = f + params.force_noise * rng.standard_normal(2)
    return f


def muscle_activation(
    model: MuscleModel,
    f_h: np.ndarray,
    fatigue: FatigueState,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Rectified directional projections of the applied force.

    Each muscle pulls, never pushes: only the positive component of the
    force along its preferred direction activates it.
    """
    proj = model.directions @ np.asarray(f_h, dtype=float)
    m = fatigue.recruitment * np.maximum(proj, 0.0) / np.asarray(model.f_max)
    if rng is not None and model.activation_noise > 0.0:
        m = m + model.activation_noise * rng.standard_normal(4)
    return np.clip(m, 0.0, ACTIVATION_MAX)


def fatigue_update(
    state: FatigueState, m: np.ndarray, dt: float, model: MuscleModel
) -> FatigueState:
    """Accumulate activation-weighted time and grow recruitment toward 1+beta."""
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    active = state.active_time + np.asarray(m, dtype=float) * dt
    beta = np.asarray(model.fatigue_gain)
    recruitment = 1.0 + beta * (1.0 - np.exp(-active / model.fatigue_tau))
    return FatigueState(recruitment=recruitment, active_time=active)


class NoiseStream:
    """Chunked standard-normal stream; deterministic for a given generator."""

    CHUNK = 16384

    def __init__(self, rng: np.random.Generator) -> None:
        self._rng = rng
        self._buf = rng.standard_normal(self.CHUNK)
        self._idx = 0

    def next(self, n: int) -> np.ndarray:
        if self._idx + n > self._buf.size:
            self._buf = self._rng.standard_normal(self.CHUNK)
            self._idx = 0
        out = self._buf[self._idx:self._idx + n]
        self._idx += n
        return out


class EmgSynth:
    """Raw 2 kHz EMG synthesis: activation times a unit-RMS noise carrier.

    Each channel has an independent seeded white-noise source shaped to the
    30-450 Hz surface-EMG band by three cascaded high-pass and three
    low-pass biquads, then scaled so the carrier has unit RMS (the scale
    comes from the filter cascade's impulse energy).  Carriers are generated
    in blocks with scipy.lfilter; per-sample cost is one multiply.
    """

    N_SECTIONS = 3
    BLOCK = 8192

    def __init__(
        self,
        rng: np.random.Generator,
        fs: float = 2000.0,
        band: tuple[float, float] = (30.0, 450.0),
    ) -> None:
        hp = design_butterworth("highpass", band[0], fs)
        lp = design_butterworth("lowpass", band[1], fs)
        self._b = [
            np.array([c.b0, c.b1, c.b2]) for c in (hp, lp)
        ]
        self._a = [
            np.array([1.0, c.a1, c.a2]) for c in (hp, lp)
        ]
        self._gain = 1.0 / math.sqrt(self._cascade_energy(fs))
        children = rng.bit_generator.seed_seq.spawn(4)
        self._noise = [
            NoiseStream(np.random.Generator(np.random.PCG64(s))) for s in children
        ]
        # per channel, per section: lfilter state carried across blocks
        self._zi = [
            [np.zeros(2) for _ in range(2 * self.N_SECTIONS)] for _ in range(4)
        ]
        self._carrier = [np.empty(0) for _ in range(4)]
        self._pos = [0, 0, 0, 0]

    def _cascade_energy(self, fs: float) -> float:
        impulse = np.zeros(int(4 * fs))
        impulse[0] = 1.0
        out = impulse
        for _ in range(self.N_SECTIONS):
            out = lfilter(self._b[0], self._a[0], out)
            out = lfilter(self._b[1], self._a[1], out)
        return float(np.sum(out * out))

    def _refill(self, ch: int) -> None:
        block = self._noise[ch].next(self.BLOCK)
        zi = self._zi[ch]
        sect = 0
        for _ in range(self.N_SECTIONS):
            block, zi[sect] = lfilter(self._b[0], self._a[0], block, zi=zi[sect])
            sect += 1
            block, zi[sect] = lfilter(self._b[1], self._a[1], block, zi=zi[sect])
            sect += 1
        self._carrier[ch] = block * self._gain
        self._pos[ch] = 0

    def step(self, m: np.ndarray) -> tuple[float, float, float, float]:
        """One raw 4-channel sample for the current activations."""
        out = []
        for ch in range(4):
            if self._pos[ch] >= self._carrier[ch].size:
                self._refill(ch)
            out.append(float(m[ch]) * self._carrier[ch][self._pos[ch]])
            self._pos[ch] += 1
        return tuple(out)

    def block(self, m: np.ndarray, n: int) -> np.ndarray:
        """n raw samples at constant activation, shape (n, 4)."""
        return np.array([self.step(m) for _ in range(n)])


class DelayLine:
    """Fixed-latency FIFO: push the newest value, get the one n samples back."""

    def __init__(self, history: list) -> None:
        self._buf = deque(history)

    def push(self, value):
        self._buf.append(value)
        return self._buf.popleft()


class StaleCursorError(RuntimeError):
    """No live cursor update for longer than the staleness limit."""


class CursorTracker:
    """Live-cursor target for interactive mode.

    Holds the last pointer position; if no update arrives for longer than
    stale_after seconds the position is still used but flagged stale so the
    harness can pause or annotate telemetry.
    """

    def __init__(self, initial: np.ndarray, stale_after: float = 0.5) -> None:
        self.stale_after = stale_after
        self._p = np.array(initial, dtype=float)
        self._last_update: float | None = None

    def update(self, p_mouse: np.ndarray, t: float) -> None:
        self._p = np.array(p_mouse, dtype=float)
        self._last_update = t

    def target(self, t: float) -> tuple[np.ndarray, bool]:
        stale = self._last_update is None or t - self._last_update > self.stale_after
        return self._p, stale

    @property
    def has_input(self) -> bool:
        return self._last_update is not None


def external_cursor_force(
    params: HumanParams,
    p: np.ndarray,
    pdot: np.ndarray,
    p_mouse: np.ndarray,
) -> np.ndarray:
    """Spring-damper force toward the live cursor (no modeled noise)."""
    return params.kp * (np.asarray(p_mouse) - np.asarray(p)) \
        - params.kd * np.asarray(pdot)
