"""Closed-loop harness: reference -> human -> robot -> EMG -> performance
-> optimizer, plus the brute-force orientation sweep and CSV persistence.

One tick at the physics rate runs the stages in pipeline order:

    a) reference cursor on the oriented ellipse
    b) human tracking force (modeled, or live cursor in interactive mode)
    c) robot dynamics under gravity compensation + the human's force
    d) muscle activations -> raw EMG -> processed activations
    e) windowed weighted performance
    f) performance smoothing
    g) extremum-seeking update of the orientation estimate
    h) new commanded orientation feeds the next tick's reference

Everything is deterministic for a fixed (config, seed): noise comes from
per-component child generators of one seed sequence and the loop is strictly
single-threaded.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import arm as _arm
from . import esc as _esc
from .arm import ArmParams, JointState, SingularInertiaError
from .config import SimConfig
from .dsp import EmgPipeline, PerformanceSmoother, PerformanceWindow
from .esc import ConvergenceStatus, NonFiniteInputError
from .human import CursorTracker, DelayLine, EmgSynth, FatigueState, NoiseStream
from .trajectory import ellipse_point, ellipse_velocity, wrap_orientation_deg

STAGES = (
    "reference", "human", "robot", "emg", "performance", "smooth", "esc", "path",
)


class NumericDivergenceError(RuntimeError):
    """A state variable became non-finite; carries the failing record index."""

    def __init__(self, record_index: int, t: float, detail: str) -> None:
        super().__init__(f"non-finite state at t={t:.4f}s (record {record_index}): {detail}")
        self.record_index = record_index
        self.t = t


@dataclass
class SimRecord:
    """One telemetry sample of the full loop."""

    t: float
    p: np.ndarray            # end-effector position, m
    p_des: np.ndarray        # desired cursor, m
    m: np.ndarray            # measured activations (post-DSP), 4
    j_raw: float             # windowed performance
    j_smooth: float          # smoothed performance (optimizer input)
    theta_hat_deg: float     # orientation estimate, wrapped (-90, 90]
    theta_cmd_deg: float     # dithered command, wrapped
    converged: bool
    f_h: np.ndarray          # human force on the end effector, N

    CSV_HEADER = (
        "t,p_x,p_y,p_des_x,p_des_y,m1,m2,m3,m4,j_raw,j_smooth,"
        "theta_hat_deg,theta_cmd_deg,converged,f_h_x,f_h_y"
    )

    def csv_row(self) -> str:
        cols = (
            self.t, self.p[0], self.p[1], self.p_des[0], self.p_des[1],
            self.m[0], self.m[1], self.m[2], self.m[3],
            self.j_raw, self.j_smooth, self.theta_hat_deg, self.theta_cmd_deg,
            int(self.converged), self.f_h[0], self.f_h[1],
        )
        # repr of builtin float is the shortest exact round-trip form
        return ",".join(
            str(c) if isinstance(c, int) else repr(float(c)) for c in cols
        )


class ClosedLoop:
    """Owns all loop state; single-threaded, one instance per experiment.

    fixed_theta_rad pins the ellipse orientation and disables the optimizer
    (used by the sweep oracle); freeze_fatigue holds recruitment at 1.
    """

    def __init__(
        self,
        config: SimConfig,
        *,
        fixed_theta_rad: float | None = None,
        freeze_fatigue: bool = False,
        fatigue: FatigueState | None = None,
        stage_hook: Callable[[str], None] | None = None,
    ) -> None:
        self.config = config
        self.fixed_theta = fixed_theta_rad
        self.freeze_fatigue = freeze_fatigue
        self.stage_hook = stage_hook
        self.dt = config.dt
        fs = config.rates.physics_hz

        seq = np.random.SeedSequence(config.seed)
        force_seed, muscle_seed, emg_seed = seq.spawn(3)
        self._force_noise = NoiseStream(np.random.Generator(np.random.PCG64(force_seed)))
        self._muscle_noise = NoiseStream(np.random.Generator(np.random.PCG64(muscle_seed)))
        self.synth = EmgSynth(np.random.Generator(np.random.PCG64(emg_seed)), fs=fs)

        self.pipeline = EmgPipeline(
            fs=fs,
            band_low=config.dsp.band_low,
            band_high=config.dsp.band_high,
            envelope_cutoff=config.dsp.envelope_cutoff,
        )
        self._calibrate()

        theta0 = math.radians(config.theta0_deg)
        self.theta_path = theta0 if fixed_theta_rad is None else fixed_theta_rad
        self.esc_state = (theta0, 0.0, 0.0, 0.0, 0.0, 0.0, False)
        self.theta_hat = theta0 if fixed_theta_rad is None else fixed_theta_rad

        p0 = ellipse_point(config.ellipse, self.theta_path, 0.0)
        q0 = _arm.inverse_kinematics(config.arm, p0)
        v0 = ellipse_velocity(config.ellipse, self.theta_path, 0.0)
        qd0 = np.linalg.solve(_arm.jacobian(config.arm, q0), v0)
        self.q1, self.q2 = float(q0[0]), float(q0[1])
        self.qd1, self.qd2 = float(qd0[0]), float(qd0[1])

        n_delay = int(round(config.human.delay * fs))
        history = [
            ellipse_point(config.ellipse, self.theta_path, (k - n_delay) * self.dt)
            for k in range(n_delay)
        ]
        self._delay = DelayLine(history)

        self.fatigue = fatigue if fatigue is not None else FatigueState()
        self.window = PerformanceWindow.for_revolution(config.ellipse.t_rev, self.dt)
        self._muscle_windows = [
            PerformanceWindow.for_revolution(config.ellipse.t_rev, self.dt)
            for _ in range(4)
        ]
        self.smoother = PerformanceSmoother(fs=fs, fc=config.dsp.smooth_cutoff)
        self.w_m = tuple(float(w) for w in config.w_m)

        self.cursor = CursorTracker(p0)
        self.cursor_stale = False

        self.t = 0.0
        self.t_now = 0.0
        self.step_index = 0
        self.j_raw = 0.0
        self.j_smooth = 0.0
        self.m_meas = np.zeros(4)
        self.f_h = (0.0, 0.0)
        self.p = p0.copy()
        self.p_des = p0.copy()
        self.theta_cmd = self.theta_path
        self.status = ConvergenceStatus(converged=False)
        self._hist_t: list[float] = []
        self._hist_theta: list[float] = []

    def _calibrate(self) -> None:
        """Isometric MVC calibration at maximal activation before the run."""
        n = int(round(self.config.dsp.mvc_duration * self.config.rates.physics_hz))
        block = self.synth.block(np.ones(4), n)
        self.pipeline.calibrate_mvc(block)

    # -- one physics tick ---------------------------------------------------

    def step(self) -> None:
        cfg = self.config
        dt = self.dt
        t = self.step_index * dt
        self.t_now = t
        hook = self.stage_hook

        # a) reference
        if hook:
            hook("reference")
        pdx, pdy = _ellipse_xy(cfg.ellipse, self.theta_path, t)

        # b) human force toward the (delayed) target
        if hook:
            hook("human")
        px, py, vx, vy = self._ee_state()
        if cfg.mode == "interactive":
            (tx, ty), self.cursor_stale = self.cursor.target(t)
            fx = cfg.human.kp * (tx - px) - cfg.human.kd * vx
            fy = cfg.human.kp * (ty - py) - cfg.human.kd * vy
        else:
            dx, dy = self._delay.push(np.array([pdx, pdy]))
            fx = cfg.human.kp * (dx - px) - cfg.human.kd * vx
            fy = cfg.human.kp * (dy - py) - cfg.human.kd * vy
            if cfg.human.force_noise > 0.0:
                n2 = self._force_noise.next(2)
                fx += cfg.human.force_noise * n2[0]
                fy += cfg.human.force_noise * n2[1]

        # c) robot under gravity compensation plus the human's force
        if hook:
            hook("robot")
        g1, g2 = _arm._gravity_terms(cfg.arm, self.q1, self.q2)
        self.q1, self.q2, self.qd1, self.qd2 = _arm._rk4(
            cfg.arm, self.q1, self.q2, self.qd1, self.qd2, g1, g2, fx, fy, dt
        )

        # d) true activations -> raw EMG -> measured activations
        if hook:
            hook("emg")
        mdl = cfg.muscles
        m_true = self.fatigue.recruitment * np.maximum(
            mdl.directions @ (fx, fy), 0.0
        ) / mdl.f_max
        if mdl.activation_noise > 0.0:
            m_true = m_true + mdl.activation_noise * self._muscle_noise.next(4)
        np.clip(m_true, 0.0, 1.5, out=m_true)
        if not self.freeze_fatigue:
            self.fatigue.active_time += m_true * dt
            self.fatigue.recruitment = 1.0 + np.asarray(mdl.fatigue_gain) * (
                1.0 - np.exp(-self.fatigue.active_time / mdl.fatigue_tau)
            )
        raw = self.synth.step(m_true)
        m_meas = self.pipeline.process_sample(raw)

        # e) windowed weighted performance
        if hook:
            hook("performance")
        w = self.w_m
        j_raw = self.window.push(
            w[0] * m_meas[0] + w[1] * m_meas[1] + w[2] * m_meas[2] + w[3] * m_meas[3]
        )
        for i in range(4):
            self._muscle_windows[i].push(m_meas[i])

        # f) smoothing
        if hook:
            hook("smooth")
        j_smooth = self.smoother.step(j_raw)

        # g) optimizer
        if hook:
            hook("esc")
        if self.fixed_theta is None:
            e = cfg.esc
            # soft engage: hold the integrator during warmup, then ramp the
            # gain in so the demodulation filters charge on real gradient
            # before the estimate picks up speed
            if t < cfg.esc_warmup:
                gain = 0.0
            elif cfg.esc_soft_start > 0.0:
                gain = e.gain * min(1.0, (t - cfg.esc_warmup) / cfg.esc_soft_start)
            else:
                gain = e.gain
            self.esc_state, theta_cmd = _esc._core(
                self.esc_state, e.amplitude, e.dither_freq,
                e.lowpass_cutoff, e.highpass_cutoff,
                gain, e.y_scale, j_smooth, dt,
            )
            self.theta_hat = self.esc_state[0]
        else:
            theta_cmd = self.fixed_theta

        # h) the command orients the next tick's path
        if hook:
            hook("path")
        self.theta_path = theta_cmd
        self.theta_cmd = theta_cmd

        self.p_des = np.array([pdx, pdy])
        self.f_h = (fx, fy)
        self.m_meas = m_meas
        self.j_raw = j_raw
        self.j_smooth = j_smooth
        self.step_index += 1
        self.t = self.step_index * dt

    def _ee_state(self) -> tuple[float, float, float, float]:
        """End-effector position and velocity from the current joint state."""
        s1, c1 = math.sin(self.q1), math.cos(self.q1)
        s12 = math.sin(self.q1 + self.q2)
        c12 = math.cos(self.q1 + self.q2)
        l1, l2 = self.config.arm.l1, self.config.arm.l2
        px = l1 * c1 + l2 * c12
        py = l1 * s1 + l2 * s12
        self.p = np.array([px, py])
        vx = (-l1 * s1 - l2 * s12) * self.qd1 - l2 * s12 * self.qd2
        vy = (l1 * c1 + l2 * c12) * self.qd1 + l2 * c12 * self.qd2
        return px, py, vx, vy

    # -- experiment drivers --------------------------------------------------

    def snapshot(self) -> SimRecord:
        return SimRecord(
            t=self.t_now,
            p=self.p.copy(),
            p_des=self.p_des.copy(),
            m=self.m_meas.copy(),
            j_raw=self.j_raw,
            j_smooth=self.j_smooth,
            theta_hat_deg=wrap_orientation_deg(self.theta_hat),
            theta_cmd_deg=wrap_orientation_deg(self.theta_cmd),
            converged=self.status.converged,
            f_h=np.array(self.f_h),
        )

    def record_telemetry(self) -> SimRecord:
        """Snapshot the loop and log the estimate for convergence checks."""
        rec = self.snapshot()
        if not (
            math.isfinite(rec.j_smooth)
            and math.isfinite(rec.p[0])
            and math.isfinite(rec.theta_hat_deg)
        ):
            raise NumericDivergenceError(len(self._hist_t), rec.t, "telemetry non-finite")
        self._hist_t.append(rec.t)
        self._hist_theta.append(math.degrees(self.theta_hat))
        return rec

    def run(self, duration: float | None = None) -> tuple[list[SimRecord], ConvergenceStatus]:
        """Run for duration seconds, recording telemetry and convergence."""
        cfg = self.config
        duration = cfg.duration if duration is None else duration
        fs = cfg.rates.physics_hz
        n_steps = int(round(duration * fs))
        tel_period = 1.0 / cfg.rates.telemetry_hz
        check_every = int(round(fs))
        records: list[SimRecord] = []
        next_tel = 0.0

        for i in range(n_steps):
            t = i * self.dt
            try:
                self.step()
            except (NonFiniteInputError, SingularInertiaError) as exc:
                raise NumericDivergenceError(len(records), t, str(exc)) from exc

            if t + 1e-12 >= next_tel:
                records.append(self.record_telemetry())
                next_tel += tel_period

            if (i + 1) % check_every == 0 and not self.status.converged:
                self._check_convergence((i + 1) * self.dt)

        return records, self.status

    def _check_convergence(self, now: float) -> None:
        if now < 10.0:
            return
        times = np.asarray(self._hist_t)
        thetas = np.asarray(self._hist_theta)
        ok, median = _esc._window_ok(times, thetas, now, 10.0, 10.0)
        if ok:
            self.status = ConvergenceStatus(
                converged=True,
                solution_deg=wrap_orientation_deg(math.radians(median)),
                convergence_time=now,
            )

    def muscle_window_means(self) -> np.ndarray:
        """Per-muscle mean measured activation over the last revolution."""
        return np.array([w.value for w in self._muscle_windows])


def _ellipse_xy(spec, theta: float, t: float) -> tuple[float, float]:
    phi = 2.0 * math.pi * t / spec.t_rev + spec.phase0
    ex = spec.a_x * math.cos(phi)
    ey = spec.a_y * math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    return spec.center[0] + ct * ex - st * ey, spec.center[1] + st * ex + ct * ey


def run_simulation(
    config: SimConfig,
    *,
    stage_hook: Callable[[str], None] | None = None,
    fatigue: FatigueState | None = None,
) -> tuple[list[SimRecord], ConvergenceStatus]:
    """Run the full closed loop headless for config.duration seconds."""
    loop = ClosedLoop(config, stage_hook=stage_hook, fatigue=fatigue)
    return loop.run()


# -- brute-force orientation sweep (ground-truth oracle) ---------------------

@dataclass
class SweepResult:
    """Static performance landscape over orientation.

    j_ss is the steady-state windowed performance with the optimizer off and
    fatigue frozen; muscle_means are the per-muscle window means so the
    landscape can be re-weighted without re-running (performance is linear
    in the weights).  maxima lists strict local maxima on the wrapped grid.
    """

    theta_deg: np.ndarray
    j_ss: np.ndarray
    muscle_means: np.ndarray
    maxima: list[tuple[float, float]]

    def j_for_weights(self, w_m) -> np.ndarray:
        return self.muscle_means @ np.asarray(w_m, dtype=float)

    def maxima_for_weights(self, w_m) -> list[tuple[float, float]]:
        return _local_maxima(self.theta_deg, self.j_for_weights(w_m))


def _local_maxima(theta: np.ndarray, j: np.ndarray) -> list[tuple[float, float]]:
    """Strict local maxima treating the grid as circular (orientation mod 180)."""
    n = j.size
    out = []
    for k in range(n):
        if j[k] > j[(k - 1) % n] and j[k] > j[(k + 1) % n]:
            out.append((float(theta[k]), float(j[k])))
    return out


def _sweep_point(args: tuple[SimConfig, float]) -> np.ndarray:
    config, theta_deg = args
    loop = ClosedLoop(
        config, fixed_theta_rad=math.radians(theta_deg), freeze_fatigue=True
    )
    loop.run(duration=3.0 * config.ellipse.t_rev)
    return loop.muscle_window_means()


def oracle_sweep(
    config: SimConfig, grid_step: float = 1.0, *, n_jobs: int | None = 1
) -> SweepResult:
    """Measure the true landscape by holding each grid orientation fixed.

    Each point runs the identical plant for 3 revolutions with the same
    noise seed, the optimizer disabled, and fatigue frozen, then records the
    final one-revolution window means.
    """
    if not 0.5 <= grid_step <= 5.0:
        raise ValueError("grid_step must be in [0.5, 5] degrees")
    n = int(round(180.0 / grid_step))
    thetas = -90.0 + grid_step * np.arange(1, n + 1)
    jobs = [(config, float(th)) for th in thetas]
    if n_jobs is None:
        n_jobs = os.cpu_count() or 1
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            means = list(pool.map(_sweep_point, jobs, chunksize=4))
    else:
        means = [_sweep_point(job) for job in jobs]
    muscle_means = np.array(means)
    j_ss = muscle_means @ config.w_m_array()
    return SweepResult(
        theta_deg=thetas,
        j_ss=j_ss,
        muscle_means=muscle_means,
        maxima=_local_maxima(thetas, j_ss),
    )


# -- CSV persistence ----------------------------------------------------------

def write_csv(records: list[SimRecord], dest) -> None:
    """Write telemetry records; full float precision, LF endings."""
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="\n") as f:
            write_csv(records, f)
        return
    dest.write(SimRecord.CSV_HEADER + "\n")
    for rec in records:
        dest.write(rec.csv_row() + "\n")


def read_csv(source) -> list[SimRecord]:
    """Read records written by write_csv (floats round-trip exactly)."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as f:
            return read_csv(f)
    header = source.readline().strip()
    if header != SimRecord.CSV_HEADER:
        raise ValueError(f"unexpected CSV header: {header!r}")
    records = []
    for line in source:
        v = line.strip().split(",")
        if not line.strip():
            continue
        records.append(
            SimRecord(
                t=float(v[0]),
                p=np.array([float(v[1]), float(v[2])]),
                p_des=np.array([float(v[3]), float(v[4])]),
                m=np.array([float(v[5]), float(v[6]), float(v[7]), float(v[8])]),
                j_raw=float(v[9]),
                j_smooth=float(v[10]),
                theta_hat_deg=float(v[11]),
                theta_cmd_deg=float(v[12]),
                converged=bool(int(v[13])),
                f_h=np.array([float(v[14]), float(v[15])]),
            )
        )
    return records


def records_csv_bytes(records: list[SimRecord]) -> bytes:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue().encode()


def write_sweep_csv(result: SweepResult, dest) -> None:
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="\n") as f:
            write_sweep_csv(result, f)
        return
    max_thetas = {th for th, _ in result.maxima}
    dest.write("theta_deg,j_ss,m1_mean,m2_mean,m3_mean,m4_mean,local_max\n")
    for k in range(result.theta_deg.size):
        mm = result.muscle_means[k]
        dest.write(
            f"{result.theta_deg[k]!r},{result.j_ss[k]!r},"
            f"{mm[0]!r},{mm[1]!r},{mm[2]!r},{mm[3]!r},"
            f"{int(result.theta_deg[k] in max_thetas)}\n"
        )
