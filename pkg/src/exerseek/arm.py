"""Planar 2-link arm: kinematics, dynamics, and the PD + gravity controller.

The exercise robot is reduced to its two active joints moving in a vertical
plane (x horizontal, y up, gravity along -y).  Dynamics are the standard
rigid-body form

    D(q) qdd + C(q, qd) qd + g(q) + B qd = tau + J^T F_ext

with C built from Christoffel symbols so that (Ddot - 2C) is skew-symmetric.
All functions here are pure; the scalar helpers at the bottom are the same
formulas unpacked for the real-time loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class UnreachablePointError(ValueError):
    """Target point lies outside the arm's reachable annulus."""


class SingularInertiaError(ArithmeticError):
    """Inertia matrix not invertible (cannot happen for physical params)."""


@dataclass(frozen=True)
class ArmParams:
    """Geometry and inertial parameters of the 2-link arm."""

    l1: float = 0.55   # link lengths, m
    l2: float = 0.35
    m1: float = 5.0    # link masses, kg
    m2: float = 2.5
    lc1: float = 0.275  # distance joint -> center of mass, m
    lc2: float = 0.175
    I1: float = 5.0 * 0.55**2 / 12.0   # link inertias about COM, kg m^2
    I2: float = 2.5 * 0.35**2 / 12.0
    b1: float = 0.1    # viscous joint friction, N m s/rad
    b2: float = 0.1
    g: float = 9.81    # gravity, m/s^2, acting along -y

    def __post_init__(self) -> None:
        for name in ("l1", "l2", "m1", "m2", "lc1", "lc2", "I1", "I2"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"ArmParams.{name} must be > 0")
        if self.lc1 > self.l1 or self.lc2 > self.l2:
            raise ValueError("ArmParams: COM distance must not exceed link length")
        if self.b1 < 0.0 or self.b2 < 0.0:
            raise ValueError("ArmParams: friction must be >= 0")

    @property
    def reach_max(self) -> float:
        return self.l1 + self.l2

    @property
    def reach_min(self) -> float:
        return abs(self.l1 - self.l2)


@dataclass
class JointState:
    """Joint angles (rad) and velocities (rad/s)."""

    q: np.ndarray
    qdot: np.ndarray

    def __post_init__(self) -> None:
        self.q = np.asarray(self.q, dtype=float).reshape(2)
        self.qdot = np.asarray(self.qdot, dtype=float).reshape(2)
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.qdot))):
            raise ValueError("JointState must be finite")

    def copy(self) -> "JointState":
        return JointState(self.q.copy(), self.qdot.copy())


@dataclass
class PdGains:
    """Diagonal PD gains.  Zero by default: pure gravity compensation."""

    p: np.ndarray = field(default_factory=lambda: np.zeros(2))
    d: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self) -> None:
        self.p = np.asarray(self.p, dtype=float).reshape(2)
        self.d = np.asarray(self.d, dtype=float).reshape(2)
        if np.any(self.p < 0.0) or np.any(self.d < 0.0):
            raise ValueError("PdGains must be >= 0")


def forward_kinematics(params: ArmParams, q: np.ndarray) -> np.ndarray:
    """End-effector position for joint angles q."""
    q1, q2 = float(q[0]), float(q[1])
    x = params.l1 * math.cos(q1) + params.l2 * math.cos(q1 + q2)
    y = params.l1 * math.sin(q1) + params.l2 * math.sin(q1 + q2)
    return np.array([x, y])


def inverse_kinematics(params: ArmParams, p: np.ndarray) -> np.ndarray:
    """Joint angles reaching p, elbow branch with q2 in [0, pi).

    Raises UnreachablePointError outside the annulus
    |l1 - l2| <= ||p|| <= l1 + l2.
    """
    x, y = float(p[0]), float(p[1])
    r2 = x * x + y * y
    l1, l2 = params.l1, params.l2
    c2 = (r2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
    if c2 > 1.0 + 1e-12 or c2 < -1.0 - 1e-12:
        raise UnreachablePointError(
            f"point ({x:.4f}, {y:.4f}) outside reachable annulus "
            f"[{params.reach_min:.4f}, {params.reach_max:.4f}]"
        )
    c2 = min(1.0, max(-1.0, c2))
    q2 = math.acos(c2)
    q1 = math.atan2(y, x) - math.atan2(l2 * math.sin(q2), l1 + l2 * c2)
    return np.array([q1, q2])


def jacobian(params: ArmParams, q: np.ndarray) -> np.ndarray:
    """End-effector Jacobian dP/dq, 2x2."""
    q1, q2 = float(q[0]), float(q[1])
    s1, c1 = math.sin(q1), math.cos(q1)
    s12, c12 = math.sin(q1 + q2), math.cos(q1 + q2)
    l1, l2 = params.l1, params.l2
    return np.array(
        [
            [-l1 * s1 - l2 * s12, -l2 * s12],
            [l1 * c1 + l2 * c12, l2 * c12],
        ]
    )


def inertia_matrix(params: ArmParams, q: np.ndarray) -> np.ndarray:
    """Joint-space inertia matrix D(q); symmetric positive definite."""
    c2 = math.cos(float(q[1]))
    a = params.I1 + params.I2 + params.m1 * params.lc1**2 + params.m2 * (
        params.l1**2 + params.lc2**2
    )
    b = params.m2 * params.l1 * params.lc2
    d = params.I2 + params.m2 * params.lc2**2
    d11 = a + 2.0 * b * c2
    d12 = d + b * c2
    return np.array([[d11, d12], [d12, d]])


def coriolis_matrix(params: ArmParams, q: np.ndarray, qdot: np.ndarray) -> np.ndarray:
    """C(q, qd) from Christoffel symbols; C @ qd gives the velocity torques."""
    h = -params.m2 * params.l1 * params.lc2 * math.sin(float(q[1]))
    qd1, qd2 = float(qdot[0]), float(qdot[1])
    return np.array([[h * qd2, h * (qd1 + qd2)], [-h * qd1, 0.0]])


def _gravity_terms(params: ArmParams, q1: float, q2: float) -> tuple[float, float]:
    c1 = math.cos(q1)
    c12 = math.cos(q1 + q2)
    g1 = (params.m1 * params.lc1 + params.m2 * params.l1) * params.g * c1 \
        + params.m2 * params.lc2 * params.g * c12
    g2 = params.m2 * params.lc2 * params.g * c12
    return g1, g2


def gravity_vector(params: ArmParams, q: np.ndarray) -> np.ndarray:
    """Gravity torques g(q) for the vertical plane (gravity along -y)."""
    return np.array(_gravity_terms(params, float(q[0]), float(q[1])))


def pd_gravity_torque(
    params: ArmParams, gains: PdGains, state: JointState, q_des: np.ndarray
) -> np.ndarray:
    """tau = P e + D edot + g(q), with e = q_des - q and edot = -qdot."""
    e = np.asarray(q_des, dtype=float) - state.q
    return gains.p * e - gains.d * state.qdot + gravity_vector(params, state.q)


def joint_accel(
    params: ArmParams, state: JointState, tau: np.ndarray, f_ext: np.ndarray
) -> np.ndarray:
    """qdd = D^-1 (tau + J^T F_ext - C qd - g - B qd)."""
    qdd1, qdd2 = _accel(
        params,
        state.q[0], state.q[1], state.qdot[0], state.qdot[1],
        float(tau[0]), float(tau[1]), float(f_ext[0]), float(f_ext[1]),
    )
    return np.array([qdd1, qdd2])


def dynamics_step(
    params: ArmParams,
    state: JointState,
    tau: np.ndarray,
    f_ext: np.ndarray,
    dt: float,
) -> JointState:
    """One RK4 step with tau and F_ext held constant over the interval."""
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    q1, q2, qd1, qd2 = _rk4(
        params,
        float(state.q[0]), float(state.q[1]),
        float(state.qdot[0]), float(state.qdot[1]),
        float(tau[0]), float(tau[1]), float(f_ext[0]), float(f_ext[1]),
        dt,
    )
    return JointState(np.array([q1, q2]), np.array([qd1, qd2]))


def total_energy(params: ArmParams, state: JointState) -> float:
    """Kinetic plus gravitational potential energy (datum: y = 0 plane)."""
    d = inertia_matrix(params, state.q)
    kinetic = 0.5 * float(state.qdot @ d @ state.qdot)
    q1, q2 = float(state.q[0]), float(state.q[1])
    y1 = params.lc1 * math.sin(q1)
    y2 = params.l1 * math.sin(q1) + params.lc2 * math.sin(q1 + q2)
    potential = params.g * (params.m1 * y1 + params.m2 * y2)
    return kinetic + potential


# ---------------------------------------------------------------------------
# Scalar kernels.  Same physics as above, unpacked to plain floats so the
# 2 kHz loop avoids small-array overhead.  Keep in sync with the array API
# (the array functions delegate here where it matters).
# ---------------------------------------------------------------------------

def _accel(
    params: ArmParams,
    q1: float, q2: float, qd1: float, qd2: float,
    t1: float, t2: float, fx: float, fy: float,
) -> tuple[float, float]:
    s1, c1 = math.sin(q1), math.cos(q1)
    s2, c2 = math.sin(q2), math.cos(q2)
    s12 = s1 * c2 + c1 * s2
    c12 = c1 * c2 - s1 * s2
    l1, l2 = params.l1, params.l2
    m2lc2 = params.m2 * params.lc2
    b = params.m2 * l1 * params.lc2

    d22 = params.I2 + m2lc2 * params.lc2
    d12 = d22 + b * c2
    d11 = params.I1 + params.m1 * params.lc1**2 + params.m2 * l1 * l1 + d22 \
        + 2.0 * b * c2

    h = -b * s2
    cv1 = h * qd2 * qd1 + h * (qd1 + qd2) * qd2
    cv2 = -h * qd1 * qd1

    cg = params.g * m2lc2 * c12
    g1 = (params.m1 * params.lc1 + params.m2 * l1) * params.g * c1 + cg
    g2 = cg

    # J^T F_ext
    jt1 = (-l1 * s1 - l2 * s12) * fx + (l1 * c1 + l2 * c12) * fy
    jt2 = -l2 * s12 * fx + l2 * c12 * fy

    r1 = t1 + jt1 - cv1 - g1 - params.b1 * qd1
    r2 = t2 + jt2 - cv2 - g2 - params.b2 * qd2

    det = d11 * d22 - d12 * d12
    if abs(det) < 1e-12:
        raise SingularInertiaError(f"det D = {det:.3e} at q2 = {q2:.4f}")
    return (d22 * r1 - d12 * r2) / det, (d11 * r2 - d12 * r1) / det


def _rk4(
    params: ArmParams,
    q1: float, q2: float, qd1: float, qd2: float,
    t1: float, t2: float, fx: float, fy: float,
    dt: float,
) -> tuple[float, float, float, float]:
    a1, a2 = _accel(params, q1, q2, qd1, qd2, t1, t2, fx, fy)

    h = 0.5 * dt
    q1b, q2b = q1 + h * qd1, q2 + h * qd2
    qd1b, qd2b = qd1 + h * a1, qd2 + h * a2
    b1, b2 = _accel(params, q1b, q2b, qd1b, qd2b, t1, t2, fx, fy)

    q1c, q2c = q1 + h * qd1b, q2 + h * qd2b
    qd1c, qd2c = qd1 + h * b1, qd2 + h * b2
    c1_, c2_ = _accel(params, q1c, q2c, qd1c, qd2c, t1, t2, fx, fy)

    q1d, q2d = q1 + dt * qd1c, q2 + dt * qd2c
    qd1d, qd2d = qd1 + dt * c1_, qd2 + dt * c2_
    d1, d2 = _accel(params, q1d, q2d, qd1d, qd2d, t1, t2, fx, fy)

    sixth = dt / 6.0
    return (
        q1 + sixth * (qd1 + 2.0 * qd1b + 2.0 * qd1c + qd1d),
        q2 + sixth * (qd2 + 2.0 * qd2b + 2.0 * qd2c + qd2d),
        qd1 + sixth * (a1 + 2.0 * b1 + 2.0 * c1_ + d1),
        qd2 + sixth * (a2 + 2.0 * b2 + 2.0 * c2_ + d2),
    )
