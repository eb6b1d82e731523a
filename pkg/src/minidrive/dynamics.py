"""Vehicle motion model.

Kinematic bicycle advanced at a fixed timestep, with actuator saturation,
first-order actuator lag, automatic braking at zero throttle and automatic
steering re-centering at zero steering input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .core import Pose2D, Vec2, VehicleGeometry, wrap_angle


def clamp(value: float, lo: float, hi: float) -> float:
    return max(lo, min(hi, value))


class Gear(str, Enum):
    DRIVE = "D"
    REVERSE = "R"


@dataclass(frozen=True)
class ActuatorCommand:
    """Normalized control inputs, clamped to [-1, 1] at construction.

    throttle > 0 drives forward, < 0 reverse; steering > 0 turns right,
    < 0 left.
    """

    throttle: float = 0.0
    steering: float = 0.0

    def __post_init__(self) -> None:
        for name in ("throttle", "steering"):
            value = float(getattr(self, name))
            if math.isnan(value):
                raise ValueError(f"{name} must not be NaN")
            object.__setattr__(self, name, clamp(value, -1.0, 1.0))


@dataclass(frozen=True)
class ActuatorLimits:
    """Saturation limits and response time constants of the actuators."""

    steering_max: float = math.radians(30.0)
    drive_max_rpm: float = 130.0
    tau_drive: float = 0.25
    tau_steer: float = 0.10
    brake_decel: float = 2.0

    def __post_init__(self) -> None:
        if not 0.0 < self.steering_max < math.pi / 2:
            raise ValueError("steering_max must lie in (0, pi/2)")
        if not self.drive_max_rpm > 0:
            raise ValueError("drive_max_rpm must be positive")
        if self.tau_drive < 0 or self.tau_steer < 0:
            raise ValueError("time constants must be >= 0")
        if self.brake_decel <= 0:
            raise ValueError("brake_decel must be positive")

    @property
    def max_wheel_omega(self) -> float:
        """Wheel angular speed at full throttle, rad/s."""
        return self.drive_max_rpm * math.tau / 60.0

    def max_speed(self, geom: VehicleGeometry) -> float:
        """Ground speed at full throttle, m/s."""
        return self.max_wheel_omega * geom.wheel_radius


@dataclass(frozen=True)
class VehicleState:
    """Single source of truth advanced each tick.

    pose locates the rear-axle reference point; v is the signed forward
    speed; steer_angle is the physical front-wheel angle, CCW-positive.
    """

    pose: Pose2D = field(default_factory=Pose2D)
    v: float = 0.0
    yaw_rate: float = 0.0
    steer_angle: float = 0.0
    wheel_angle_left: float = 0.0
    wheel_angle_right: float = 0.0
    commanded: ActuatorCommand = field(default_factory=ActuatorCommand)
    gear: Gear = Gear.DRIVE
    braking: bool = True
    accel_body: Vec2 = (0.0, 0.0)


def turning_radius(wheelbase: float, delta: float) -> float:
    """Rear-axle turning radius for a steer angle, math.inf when straight."""
    if not abs(delta) < math.pi / 2:
        raise ValueError("steer angle must satisfy |delta| < pi/2")
    if delta == 0.0:
        return math.inf
    return wheelbase / math.tan(abs(delta))


def apply_limits(cmd: ActuatorCommand, limits: ActuatorLimits) -> tuple[float, float]:
    """Map a normalized command onto actuator targets.

    Returns (target steer angle in rad, target wheel angular speed in rad/s).
    A positive steering command means a right turn, which is a negative
    (clockwise) angle in the CCW-positive convention, hence the negation.
    """
    target_delta = -cmd.steering * limits.steering_max
    target_wheel_omega = cmd.throttle * limits.max_wheel_omega
    return target_delta, target_wheel_omega


def _lag(current: float, target: float, dt: float, tau: float) -> float:
    # Exact discretization of a first-order response over one step.
    if tau <= 0.0:
        return target
    return current + (target - current) * (1.0 - math.exp(-dt / tau))


def step(
    state: VehicleState,
    cmd: ActuatorCommand,
    dt: float,
    geom: VehicleGeometry,
    limits: ActuatorLimits,
) -> VehicleState:
    """Advance the vehicle state by one fixed timestep.

    Pure function: identical inputs always produce the identical new state.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")

    target_delta, target_wheel_omega = apply_limits(cmd, limits)
    if cmd.steering == 0.0:
        target_delta = 0.0
    delta = _lag(state.steer_angle, target_delta, dt, limits.tau_steer)

    v_prev = state.v
    braking = cmd.throttle == 0.0
    if braking:
        v = math.copysign(max(0.0, abs(v_prev) - limits.brake_decel * dt), v_prev)
    else:
        v = _lag(v_prev, target_wheel_omega * geom.wheel_radius, dt, limits.tau_drive)

    yaw_rate = v * math.tan(delta) / geom.wheelbase
    pose = state.pose
    new_pose = Pose2D(
        pose.x + v * math.cos(pose.yaw) * dt,
        pose.y + v * math.sin(pose.yaw) * dt,
        wrap_angle(pose.yaw + yaw_rate * dt),
    )

    # Ackermann-differential ground truth: the inner wheel of a turn covers
    # less ground than the outer one.
    half_track = 0.5 * geom.track
    omega_left = (v - yaw_rate * half_track) / geom.wheel_radius
    omega_right = (v + yaw_rate * half_track) / geom.wheel_radius

    return VehicleState(
        pose=new_pose,
        v=v,
        yaw_rate=yaw_rate,
        steer_angle=delta,
        wheel_angle_left=state.wheel_angle_left + omega_left * dt,
        wheel_angle_right=state.wheel_angle_right + omega_right * dt,
        commanded=cmd,
        gear=Gear.REVERSE if cmd.throttle < 0.0 else Gear.DRIVE,
        braking=braking,
        accel_body=((v - v_prev) / dt, v * yaw_rate),
    )
