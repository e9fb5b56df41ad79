"""Config loading: defaults, unknown-key rejection, invariant diagnostics."""

import dataclasses
import json

import pytest

from exerseek.config import (
    ConfigError,
    SimConfig,
    default_config,
    default_y_scale,
    load_config,
    to_dict,
)


class TestLoadConfig:
    def test_empty_document_gives_defaults(self):
        assert load_config("") == SimConfig()
        assert load_config("{}") == SimConfig()

    def test_weight_vector_only(self):
        cfg = load_config('{"w_m": [1, 5, 3, 5]}')
        assert cfg.w_m == (1, 5, 3, 5)
        assert cfg.arm == SimConfig().arm
        assert cfg.duration == SimConfig().duration

    def test_y_scale_follows_weights(self):
        cfg = load_config('{"w_m": [3, 5, 1, 1]}')
        assert cfg.esc.y_scale == default_y_scale((3, 5, 1, 1))
        explicit = load_config('{"w_m": [3, 5, 1, 1], "esc": {"y_scale": 77.0}}')
        assert explicit.esc.y_scale == 77.0
        null = load_config('{"w_m": [3, 5, 1, 1], "esc": {"y_scale": null}}')
        assert null.esc.y_scale == default_y_scale((3, 5, 1, 1))

    def test_negative_revolution_period_names_field(self):
        with pytest.raises(ConfigError, match="t_rev"):
            load_config('{"ellipse": {"t_rev": -1}}')

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="unknown"):
            load_config('{"robot": {}}')

    def test_unknown_nested_key(self):
        with pytest.raises(ConfigError, match="arm"):
            load_config('{"arm": {"l3": 0.2}}')

    def test_invalid_json_diagnostics(self):
        with pytest.raises(ConfigError, match="JSON"):
            load_config("{not json")

    def test_non_object_root(self):
        with pytest.raises(ConfigError):
            load_config("[1, 2, 3]")

    def test_mode_validation(self):
        with pytest.raises(ConfigError, match="mode"):
            load_config('{"mode": "hardware"}')

    def test_bad_duration(self):
        with pytest.raises(ConfigError, match="duration"):
            load_config('{"duration": 0}')

    def test_bad_weights(self):
        with pytest.raises(ConfigError, match="w_m"):
            load_config('{"w_m": [1, 0, 3, 5]}')

    def test_non_integer_seed(self):
        with pytest.raises(ConfigError, match="seed"):
            load_config('{"seed": 1.5}')

    def test_ellipse_must_fit_workspace(self):
        with pytest.raises(ConfigError, match="reach"):
            load_config('{"ellipse": {"center": [0.75, 0.0]}}')
        with pytest.raises(ConfigError, match="unreachable"):
            load_config('{"ellipse": {"center": [0.30, 0.0], "a_x": 0.25}}')

    def test_roundtrip_through_dict(self):
        cfg = default_config(theta0_deg=12.0, seed=42)
        again = load_config(json.dumps(to_dict(cfg)))
        assert again == cfg

    def test_partial_sections_merge(self):
        cfg = load_config('{"human": {"kp": 555.0}, "duration": 30}')
        assert cfg.human.kp == 555.0
        assert cfg.human.kd == SimConfig().human.kd
        assert cfg.duration == 30

    def test_telemetry_rate_bounded_by_physics(self):
        with pytest.raises(ConfigError, match="telemetry"):
            load_config('{"rates": {"physics_hz": 100.0, "telemetry_hz": 200.0}}')


class TestDefaults:
    def test_default_config_overrides(self):
        cfg = default_config(duration=5.0)
        assert cfg.duration == 5.0
        assert cfg == dataclasses.replace(SimConfig(), duration=5.0)

    def test_dt(self):
        assert SimConfig().dt == pytest.approx(5e-4)
