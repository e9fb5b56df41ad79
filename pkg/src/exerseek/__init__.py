"""Closed-loop simulator and extremum-seeking optimizer for robot-assisted
exercise: a 2-link arm tracks a revolving ellipse whose orientation is tuned
online to maximize a weighted muscle-activation objective."""

from .arm import (
    ArmParams,
    JointState,
    PdGains,
    SingularInertiaError,
    UnreachablePointError,
    dynamics_step,
    forward_kinematics,
    gravity_vector,
    inertia_matrix,
    coriolis_matrix,
    inverse_kinematics,
    jacobian,
    joint_accel,
    pd_gravity_torque,
    total_energy,
)
from .config import ConfigError, SimConfig, default_config, load_config, load_config_file
from .dsp import (
    Biquad,
    BiquadCoeffs,
    DegenerateCalibrationError,
    EmgPipeline,
    InvalidCutoffError,
    PerformanceSmoother,
    PerformanceWindow,
    design_butterworth,
    frequency_response,
    performance,
)
from .esc import (
    ConvergenceStatus,
    EscParams,
    EscState,
    NonFiniteInputError,
    check_convergence,
    esc_step,
    reset,
)
from .human import (
    CursorTracker,
    EmgSynth,
    FatigueState,
    HumanParams,
    MuscleModel,
    MUSCLE_NAMES,
    external_cursor_force,
    fatigue_update,
    muscle_activation,
    tracking_force,
)
from .sim import (
    ClosedLoop,
    NumericDivergenceError,
    SimRecord,
    SweepResult,
    oracle_sweep,
    read_csv,
    run_simulation,
    write_csv,
    write_sweep_csv,
)
from .trajectory import EllipseSpec, ellipse_path, ellipse_point, wrap_orientation_deg

__version__ = "0.1.0"
