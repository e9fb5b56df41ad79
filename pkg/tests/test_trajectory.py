"""Ellipse reference path: geometry, periodicity, reachability."""

import math

import numpy as np
import pytest

from exerseek.arm import ArmParams, forward_kinematics, inverse_kinematics
from exerseek.trajectory import (
    EllipseSpec,
    ellipse_path,
    ellipse_point,
    ellipse_velocity,
    wrap_orientation_deg,
)

SPEC = EllipseSpec()


class TestEllipsePoint:
    def test_identity_rotation(self):
        p = ellipse_point(SPEC, 0.0, 0.0)
        assert p == pytest.approx(
            [SPEC.center[0] + SPEC.a_x, SPEC.center[1]], abs=1e-12
        )

    def test_quarter_turn(self):
        p = ellipse_point(SPEC, math.pi / 2, 0.0)
        assert p == pytest.approx(
            [SPEC.center[0], SPEC.center[1] + SPEC.a_x], abs=1e-12
        )

    def test_periodicity(self):
        rng = np.random.default_rng(2)
        for theta, t in rng.uniform(0, 10, size=(50, 2)):
            a = ellipse_point(SPEC, theta, t)
            b = ellipse_point(SPEC, theta, t + SPEC.t_rev)
            assert np.max(np.abs(a - b)) < 1e-12

    def test_radius_between_axes(self):
        rng = np.random.default_rng(3)
        for theta, t in rng.uniform(-5, 5, size=(200, 2)):
            r = np.linalg.norm(ellipse_point(SPEC, theta, t) - SPEC.center)
            assert SPEC.a_y - 1e-12 <= r <= SPEC.a_x + 1e-12

    def test_velocity_matches_finite_difference(self):
        eps = 1e-7
        for t in (0.0, 0.3, 1.1):
            v = ellipse_velocity(SPEC, 0.4, t)
            fd = (ellipse_point(SPEC, 0.4, t + eps) - ellipse_point(SPEC, 0.4, t - eps)) / (2 * eps)
            assert v == pytest.approx(fd, abs=1e-5)


class TestEllipsePath:
    def test_four_axis_endpoints(self):
        pts = ellipse_path(SPEC, 0.0, 4)
        cx, cy = SPEC.center
        expected = np.array([
            [cx + SPEC.a_x, cy],
            [cx, cy + SPEC.a_y],
            [cx - SPEC.a_x, cy],
            [cx, cy - SPEC.a_y],
        ])
        assert np.max(np.abs(pts - expected)) < 1e-12

    def test_half_turn_same_point_set(self):
        n = 36
        a = ellipse_path(SPEC, 0.3, n)
        b = ellipse_path(SPEC, 0.3 + math.pi, n)
        # same set, index-shifted by n/2
        assert np.allclose(np.roll(a, n // 2, axis=0), b, atol=1e-12)

    def test_all_points_reachable(self):
        params = ArmParams()
        for theta in np.linspace(-math.pi / 2, math.pi / 2, 13):
            for p in ellipse_path(SPEC, theta, 360):
                q = inverse_kinematics(params, p)
                assert np.linalg.norm(forward_kinematics(params, q) - p) < 1e-9

    def test_rejects_tiny_n(self):
        with pytest.raises(ValueError):
            ellipse_path(SPEC, 0.0, 1)


class TestSpecValidation:
    def test_rejects_axis_order(self):
        with pytest.raises(ValueError):
            EllipseSpec(a_x=0.1, a_y=0.2)

    def test_rejects_bad_period(self):
        with pytest.raises(ValueError):
            EllipseSpec(t_rev=-1.0)


class TestWrapOrientation:
    @pytest.mark.parametrize(
        "deg,expected",
        [(0, 0), (45, 45), (90, 90), (91, -89), (-90, 90), (180, 0),
         (135, -45), (-135, 45), (270, 90), (361, 1)],
    )
    def test_wrapping(self, deg, expected):
        assert wrap_orientation_deg(math.radians(deg)) == pytest.approx(
            expected, abs=1e-9
        )

    def test_range(self):
        for deg in np.linspace(-1000, 1000, 777):
            w = wrap_orientation_deg(math.radians(deg))
            assert -90.0 < w <= 90.0
