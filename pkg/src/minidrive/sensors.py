"""Sensor suite synthesized from ground-truth state.

Throttle, steering, incremental encoders, IPS, IMU and the 2D LIDAR. With
all noise disabled every reading is a pure function of vehicle state and
world, which is what makes record/replay bit-exact.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from .core import body_to_world
from .dynamics import ActuatorLimits, Gear, VehicleState
from .environment import WorldMap, raycast_batch
from .signals import SignalState

ENCODER_PPR = 16
GRAVITY = 9.81

LIDAR_RAY_COUNT = 360  # one ray per degree
LIDAR_RATE_HZ = 7.0
LIDAR_MIN_RANGE = 0.15
LIDAR_MAX_RANGE = 12.0


@dataclass(frozen=True)
class EncoderState:
    """Incremental wheel encoders; ticks derive from accumulated angle."""

    ppr: int = ENCODER_PPR
    ticks_left: int = 0
    ticks_right: int = 0
    angle_left: float = 0.0
    angle_right: float = 0.0


def update_encoders(enc: EncoderState, wheel_angles: tuple[float, float]) -> EncoderState:
    """Recompute tick counts from ground-truth wheel angles (floor semantics)."""
    angle_left, angle_right = wheel_angles
    tick_size = math.tau / enc.ppr
    return EncoderState(
        ppr=enc.ppr,
        ticks_left=math.floor(angle_left / tick_size),
        ticks_right=math.floor(angle_right / tick_size),
        angle_left=angle_left,
        angle_right=angle_right,
    )


@dataclass(frozen=True)
class ImuReading:
    orientation_quat: tuple[float, float, float, float]  # [x, y, z, w]
    orientation_euler: tuple[float, float, float]  # [roll, pitch, yaw]
    angular_velocity: tuple[float, float, float]  # body frame, rad/s
    linear_acceleration: tuple[float, float, float]  # body frame, m/s^2


@dataclass(frozen=True)
class LidarScan:
    """One full 360-degree snapshot scan."""

    ranges: tuple[float, ...]
    intensities: tuple[float, ...]
    angular_resolution_deg: float = 1.0
    rate_hz: float = LIDAR_RATE_HZ
    min_range: float = LIDAR_MIN_RANGE
    max_range: float = LIDAR_MAX_RANGE

    def __post_init__(self) -> None:
        if len(self.ranges) != LIDAR_RAY_COUNT or len(self.intensities) != LIDAR_RAY_COUNT:
            raise ValueError(f"scan must hold exactly {LIDAR_RAY_COUNT} rays")


class GaussianNoise:
    """Seed-deterministic additive noise source for the IPS."""

    def __init__(self, std: float, seed: int = 0):
        self.std = std
        self._rng = random.Random(seed)

    def sample(self) -> float:
        if self.std == 0.0:
            return 0.0
        return self._rng.gauss(0.0, self.std)


def read_throttle(state: VehicleState) -> float:
    """Instantaneous throttle value in [-1, 1]; zero means auto-brake hold."""
    return state.commanded.throttle


def read_steering(state: VehicleState, limits: ActuatorLimits) -> float:
    """Post-lag steering angle renormalized to [-1, 1], positive = right turn."""
    return -state.steer_angle / limits.steering_max


def read_ips(state: VehicleState, noise: GaussianNoise | None = None) -> tuple[float, float, float]:
    """Position vector of the rear reference point; z is 0 in the plane."""
    x, y = state.pose.x, state.pose.y
    if noise is not None:
        x += noise.sample()
        y += noise.sample()
    return (x, y, 0.0)


def read_imu(state: VehicleState) -> ImuReading:
    """Orientation, body rates and proper acceleration (gravity included)."""
    half = 0.5 * state.pose.yaw
    ax, ay = state.accel_body
    return ImuReading(
        orientation_quat=(0.0, 0.0, math.sin(half), math.cos(half)),
        orientation_euler=(0.0, 0.0, state.pose.yaw),
        angular_velocity=(0.0, 0.0, state.yaw_rate),
        linear_acceleration=(ax, ay, GRAVITY),
    )


def lidar_scan(state: VehicleState, world: WorldMap, forward_offset: float = 0.15) -> LidarScan:
    """Cast all 360 rays at the same simulation instant.

    Ray i leaves the scan origin at azimuth i degrees CCW from body +X.
    Hits closer than the minimum range clamp to it with intensity 0; misses
    report the maximum range with intensity 0.
    """
    origin = body_to_world(state.pose, (forward_offset, 0.0))
    azimuths = state.pose.yaw + np.radians(np.arange(LIDAR_RAY_COUNT, dtype=float))
    directions = np.column_stack((np.cos(azimuths), np.sin(azimuths)))
    distances, _ = raycast_batch(world, origin, directions, LIDAR_MAX_RANGE)

    hit = np.isfinite(distances)
    too_close = hit & (distances < LIDAR_MIN_RANGE)
    ranges = np.where(hit, np.maximum(distances, LIDAR_MIN_RANGE), LIDAR_MAX_RANGE)
    intensities = np.where(
        hit & ~too_close, 1.0 - np.minimum(distances, LIDAR_MAX_RANGE) / LIDAR_MAX_RANGE, 0.0
    )
    return LidarScan(
        ranges=tuple(float(r) for r in ranges),
        intensities=tuple(float(i) for i in intensities),
    )


@dataclass(frozen=True)
class Telemetry:
    """Timestamped snapshot of every sensor output, emitted at telemetry rate."""

    sim_time: float
    throttle: float
    steering: float
    gear: Gear
    speed: float  # magnitude of forward velocity
    encoder: EncoderState
    ips: tuple[float, float, float]
    imu: ImuReading
    lidar: LidarScan
    lamps: SignalState
    mode: str  # "manual" | "autonomous"
    scene_light: bool = True
