import math
import random

import pytest

from minidrive.core import (
    Pose2D,
    VehicleGeometry,
    body_to_world,
    world_to_body,
    wrap_angle,
)


def test_wrap_angle_examples():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2, abs=1e-15)
    # boundary maps to the inclusive end of (-pi, pi]
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(math.pi) == math.pi


def test_wrap_angle_range_and_idempotence():
    rng = random.Random(7)
    for _ in range(2000):
        theta = rng.uniform(-50.0, 50.0)
        w = wrap_angle(theta)
        assert -math.pi < w <= math.pi
        assert wrap_angle(w) == w
        # equal to theta modulo 2*pi
        assert math.isclose(
            math.remainder(theta - w, math.tau), 0.0, abs_tol=1e-9
        )


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_wrap_angle_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        wrap_angle(bad)


def test_body_to_world_examples():
    assert body_to_world(Pose2D(0, 0, 0), (1.0, 0.0)) == pytest.approx((1.0, 0.0))
    assert body_to_world(Pose2D(0, 0, math.pi / 2), (1.0, 0.0)) == pytest.approx(
        (0.0, 1.0), abs=1e-15
    )
    # hand-computed: R(pi) @ (1,1) = (-1,-1), plus (2,3) -> (1,2)
    assert body_to_world(Pose2D(2, 3, math.pi), (1.0, 1.0)) == pytest.approx(
        (1.0, 2.0), abs=1e-12
    )


def test_round_trip_and_norm_preservation():
    rng = random.Random(21)
    for _ in range(500):
        pose = Pose2D(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-10, 10))
        v = (rng.uniform(-3, 3), rng.uniform(-3, 3))
        w = body_to_world(pose, v)
        back = world_to_body(pose, w)
        assert back[0] == pytest.approx(v[0], abs=1e-12)
        assert back[1] == pytest.approx(v[1], abs=1e-12)
        # rotation part preserves norms once the translation is removed
        rot = (w[0] - pose.x, w[1] - pose.y)
        assert math.hypot(*rot) == pytest.approx(math.hypot(*v), abs=1e-12)


def test_pose_wraps_yaw_at_construction():
    assert Pose2D(0, 0, 3 * math.pi).yaw == pytest.approx(math.pi)
    assert Pose2D(0, 0, -math.pi).yaw == math.pi


def test_geometry_validation():
    geom = VehicleGeometry()
    assert geom.wheelbase == 0.30
    assert geom.wheel_radius == 0.0325
    with pytest.raises(ValueError):
        VehicleGeometry(wheelbase=-0.1)
    with pytest.raises(ValueError):
        VehicleGeometry(body_length=0.2)  # shorter than the wheelbase
