"""Experiment configuration: JSON loading, defaults, validation."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .arm import ArmParams
from .esc import EscParams
from .human import HumanParams, MuscleModel
from .trajectory import EllipseSpec

MODES = ("simulated-human", "interactive")

# Default performance normalization for the optimizer: the weighted
# activation sum is O(sum(w_m)), and the published integrator gain assumes a
# normalized, gently scaled objective.  The factor is calibrated so the
# optimizer's outer loop stays well below the dither frequency.
Y_SCALE_FACTOR = 40.0


def default_y_scale(w_m) -> float:
    return Y_SCALE_FACTOR * float(sum(w_m))


class ConfigError(ValueError):
    """Malformed or invalid configuration document."""


@dataclass(frozen=True)
class DspSettings:
    band_low: float = 30.0         # analysis bandpass lower edge, Hz
    band_high: float = 900.0       # upper edge; 950 from the hardware chain is allowed
    envelope_cutoff: float = 50.0  # envelope low-pass, Hz
    smooth_cutoff: float = 4.0     # performance smoothing low-pass, Hz
    mvc_duration: float = 3.0      # isometric calibration length, s

    def __post_init__(self) -> None:
        if not 0.0 < self.band_low < self.band_high:
            raise ValueError("DspSettings: requires 0 < band_low < band_high")
        if self.envelope_cutoff <= 0.0 or self.smooth_cutoff <= 0.0:
            raise ValueError("DspSettings: cutoffs must be > 0")
        if self.mvc_duration < 3.0:
            raise ValueError("DspSettings.mvc_duration must be >= 3 s")


@dataclass(frozen=True)
class Rates:
    physics_hz: float = 2000.0
    telemetry_hz: float = 60.0

    def __post_init__(self) -> None:
        if self.physics_hz <= 0.0:
            raise ValueError("Rates.physics_hz must be > 0")
        if not 0.0 < self.telemetry_hz <= self.physics_hz:
            raise ValueError("Rates.telemetry_hz must be in (0, physics_hz]")


@dataclass(frozen=True)
class SimConfig:
    arm: ArmParams = field(default_factory=ArmParams)
    ellipse: EllipseSpec = field(default_factory=EllipseSpec)
    human: HumanParams = field(default_factory=HumanParams)
    muscles: MuscleModel = field(default_factory=MuscleModel)
    esc: EscParams = field(
        default_factory=lambda: EscParams(y_scale=default_y_scale((1, 5, 3, 5)))
    )
    dsp: DspSettings = field(default_factory=DspSettings)
    rates: Rates = field(default_factory=Rates)
    w_m: tuple[float, float, float, float] = (1.0, 5.0, 3.0, 5.0)
    theta0_deg: float = 0.0
    duration: float = 120.0
    seed: int = 0
    mode: str = "simulated-human"
    esc_warmup: float = 3.0       # signal-chain settling before the optimizer engages
    esc_soft_start: float = 12.0  # gain ramp-in after warmup, s (0 = hard engage)

    def __post_init__(self) -> None:
        problems = validate(self)
        if problems:
            raise ConfigError("; ".join(problems))

    @property
    def dt(self) -> float:
        return 1.0 / self.rates.physics_hz

    def w_m_array(self) -> np.ndarray:
        return np.asarray(self.w_m, dtype=float)


def validate(config: SimConfig) -> list[str]:
    """Cross-field invariant checks; returns a list of violations."""
    problems: list[str] = []
    if config.duration <= 0.0:
        problems.append("SimConfig.duration must be > 0")
    if config.mode not in MODES:
        problems.append(f"SimConfig.mode must be one of {MODES}")
    if len(config.w_m) != 4 or any(w <= 0.0 for w in config.w_m):
        problems.append("SimConfig.w_m must be 4 positive weights")
    if config.esc_warmup < 0.0:
        problems.append("SimConfig.esc_warmup must be >= 0")
    if config.esc_soft_start < 0.0:
        problems.append("SimConfig.esc_soft_start must be >= 0")
    if not isinstance(config.seed, int):
        problems.append("SimConfig.seed must be an integer")
    # ellipse must fit the reachable annulus with 2 cm margin for every
    # orientation: check radial extremes from the shoulder
    cx, cy = config.ellipse.center
    r_center = float(np.hypot(cx, cy))
    r_outer = r_center + config.ellipse.a_x
    r_inner = r_center - config.ellipse.a_x
    margin = 0.02
    if r_outer > config.arm.reach_max - margin:
        problems.append(
            "EllipseSpec: path exceeds outer reach "
            f"({r_outer:.3f} > {config.arm.reach_max - margin:.3f})"
        )
    if r_inner < config.arm.reach_min + margin:
        problems.append(
            "EllipseSpec: path enters inner unreachable disk "
            f"({r_inner:.3f} < {config.arm.reach_min + margin:.3f})"
        )
    return problems


_SECTIONS: dict[str, type] = {
    "arm": ArmParams,
    "ellipse": EllipseSpec,
    "human": HumanParams,
    "muscles": MuscleModel,
    "esc": EscParams,
    "dsp": DspSettings,
    "rates": Rates,
}

_SCALARS = (
    "w_m", "theta0_deg", "duration", "seed", "mode", "esc_warmup", "esc_soft_start",
)


def _build_section(cls: type, data: Any, path: str) -> Any:
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: expected an object")
    known = {f.name for f in dataclasses.fields(cls) if f.init}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    kwargs = {}
    for key, value in data.items():
        if isinstance(value, list):
            value = tuple(value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def load_config(text: str) -> SimConfig:
    """Parse a JSON config; omitted fields get defaults, unknown keys fail."""
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")

    unknown = set(data) - set(_SECTIONS) - set(_SCALARS)
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")

    kwargs: dict[str, Any] = {}
    for name, cls in _SECTIONS.items():
        if name in data:
            section = dict(data[name]) if isinstance(data[name], dict) else data[name]
            if name == "esc" and isinstance(section, dict):
                # null/omitted y_scale means "derive from the weight vector"
                if section.get("y_scale") is None:
                    w = data.get("w_m", SimConfig.__dataclass_fields__["w_m"].default)
                    section["y_scale"] = default_y_scale(w)
            kwargs[name] = _build_section(cls, section, name)
        elif name == "esc" and "w_m" in data:
            kwargs[name] = EscParams(y_scale=default_y_scale(data["w_m"]))
    for name in _SCALARS:
        if name in data:
            value = data[name]
            if isinstance(value, list):
                value = tuple(value)
            kwargs[name] = value

    try:
        return SimConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config_file(path: str) -> SimConfig:
    with open(path, encoding="utf-8") as f:
        return load_config(f.read())


def to_dict(config: SimConfig) -> dict[str, Any]:
    """JSON-serializable view (used for the hello echo and round-trips)."""

    def plain(obj: Any) -> Any:
        if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            return {
                f.name: plain(getattr(obj, f.name))
                for f in dataclasses.fields(obj)
                if f.init
            }
        if isinstance(obj, tuple):
            return [plain(v) for v in obj]
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        return obj

    return plain(config)


def default_config(**overrides: Any) -> SimConfig:
    """Default config, optionally overridden via keyword replacement."""
    return dataclasses.replace(SimConfig(), **overrides) if overrides else SimConfig()
