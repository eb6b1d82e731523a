"""Planar geometry foundations shared by every other module.

The world frame is right-handed with Z up; yaw is CCW-positive about Z.
There is no left-handed representation anywhere in the simulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Vec2 = tuple[float, float]


def wrap_angle(theta: float) -> float:
    """Wrap an angle in radians to (-pi, pi]. Rejects non-finite input."""
    if not math.isfinite(theta):
        raise ValueError(f"angle must be finite, got {theta!r}")
    wrapped = math.remainder(theta, math.tau)
    if wrapped <= -math.pi:
        wrapped += math.tau
    return wrapped


@dataclass(frozen=True)
class Pose2D:
    """Planar pose in meters/radians; yaw is stored wrapped to (-pi, pi]."""

    x: float = 0.0
    y: float = 0.0
    yaw: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))

    def heading(self) -> Vec2:
        """Unit vector along the body +X axis expressed in world coordinates."""
        return (math.cos(self.yaw), math.sin(self.yaw))


class BodyFrame:
    """Convention marker for body-frame quantities.

    X points to the front of the vehicle, Y to the left, Z up; right-handed.
    IMU rates/accelerations and LIDAR ray directions use this frame exclusively.
    """

    AXES = ("forward", "left", "up")


def body_to_world(pose: Pose2D, v: Vec2) -> Vec2:
    """Rotate a body-frame vector by pose.yaw and translate by (pose.x, pose.y)."""
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    return (pose.x + c * v[0] - s * v[1], pose.y + s * v[0] + c * v[1])


def world_to_body(pose: Pose2D, p: Vec2) -> Vec2:
    """Inverse of body_to_world: express a world point in the body frame."""
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    dx, dy = p[0] - pose.x, p[1] - pose.y
    return (c * dx + s * dy, -s * dx + c * dy)


def rotate(v: Vec2, angle: float) -> Vec2:
    """Rotate a 2-vector CCW by angle radians."""
    c, s = math.cos(angle), math.sin(angle)
    return (c * v[0] - s * v[1], s * v[0] + c * v[1])


@dataclass(frozen=True)
class VehicleGeometry:
    """Physical dimensions of the scaled vehicle, in meters.

    The 0.30 m wheelbase doubles as the bicycle-model reference length so the
    stock turning-radius arithmetic (R = L/tan delta) holds exactly.
    """

    wheelbase: float = 0.30
    track: float = 0.16
    body_length: float = 0.30
    body_width: float = 0.16
    wheel_radius: float = 0.0325
    lidar_height: float = 0.15

    def __post_init__(self) -> None:
        for name in (
            "wheelbase",
            "track",
            "body_length",
            "body_width",
            "wheel_radius",
            "lidar_height",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.body_length < self.wheelbase:
            raise ValueError("body_length must be >= wheelbase")
