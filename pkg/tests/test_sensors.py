import json
import math
import random

import pytest

from minidrive.core import Pose2D, VehicleGeometry
from minidrive.dynamics import ActuatorCommand, ActuatorLimits, VehicleState, step
from minidrive.environment import load_map
from minidrive.sensors import (
    EncoderState,
    GaussianNoise,
    LIDAR_MAX_RANGE,
    LIDAR_MIN_RANGE,
    LidarScan,
    lidar_scan,
    read_imu,
    read_ips,
    read_steering,
    read_throttle,
    update_encoders,
)

from helpers import box_segments, oracle_scene_ranges

GEOM = VehicleGeometry()
LIMITS = ActuatorLimits()
DT = 0.005
V_MAX = LIMITS.max_speed(GEOM)


def drive(state, throttle, steering, seconds):
    cmd = ActuatorCommand(throttle, steering)
    for _ in range(int(round(seconds / DT))):
        state = step(state, cmd, DT, GEOM, LIMITS)
    return state


def lawn_world(boxes=(), bounds_wall=False, tiles=2):
    return load_map(
        json.dumps(
            {
                "tile_size": 1.8,
                "grid": [["lawn:0"] * tiles for _ in range(tiles)],
                "boxes": list(boxes),
                "bounds_wall": bounds_wall,
            }
        )
    )


# --- encoders ------------------------------------------------------------------


def test_encoder_tick_examples():
    enc = EncoderState()
    assert update_encoders(enc, (math.tau, math.tau)).ticks_left == 16
    assert update_encoders(enc, (-math.pi, 0.0)).ticks_left == -8  # floor semantics
    assert update_encoders(enc, (0.0, 0.0)) == enc


def test_encoder_consistency_invariant_during_driving():
    state = VehicleState()
    enc = EncoderState()
    tick_size = math.tau / enc.ppr
    cmd = ActuatorCommand(1.0, 0.4)
    for _ in range(600):
        state = step(state, cmd, DT, GEOM, LIMITS)
        enc = update_encoders(enc, (state.wheel_angle_left, state.wheel_angle_right))
        assert enc.ticks_left == math.floor(enc.angle_left / tick_size)
        assert enc.ticks_right == math.floor(enc.angle_right / tick_size)


# --- throttle / steering sensors ------------------------------------------------


def test_idle_vehicle_reads_zero():
    state = VehicleState()
    assert read_throttle(state) == 0.0
    assert read_steering(state, LIMITS) == 0.0


def test_full_reverse_settles_to_minus_one():
    state = drive(VehicleState(), -1.0, 0.0, 3.0)
    assert read_throttle(state) == -1.0
    assert state.v == pytest.approx(-V_MAX, abs=1e-4)


def test_steering_sign_map():
    # physical right turn (negative CCW angle) reads positive
    state = VehicleState(steer_angle=-LIMITS.steering_max / 2)
    assert read_steering(state, LIMITS) == pytest.approx(0.5, abs=1e-12)
    state = drive(VehicleState(), 0.5, 1.0, 2.0)
    assert read_steering(state, LIMITS) == pytest.approx(1.0, abs=1e-6)


# --- IPS -----------------------------------------------------------------------


def test_ips_at_origin_and_planar_z():
    assert read_ips(VehicleState()) == (0.0, 0.0, 0.0)


def test_ips_tracks_integrated_distance():
    state = VehicleState()
    cmd = ActuatorCommand(1.0, 0.0)
    distance = 0.0  # independent integration oracle
    while distance < 1.0:
        state = step(state, cmd, DT, GEOM, LIMITS)
        distance += state.v * DT
    ips = read_ips(state)
    assert ips[0] == pytest.approx(distance, abs=1e-6)
    assert ips[1] == pytest.approx(0.0, abs=1e-9)
    assert ips[2] == 0.0


def test_ips_noise_is_seed_deterministic_and_bounded():
    state = VehicleState(pose=Pose2D(2.0, 3.0, 0.0))
    a = GaussianNoise(0.005, seed=42)
    b = GaussianNoise(0.005, seed=42)
    readings_a = [read_ips(state, a) for _ in range(100)]
    readings_b = [read_ips(state, b) for _ in range(100)]
    assert readings_a == readings_b
    for x, y, _ in readings_a:
        assert abs(x - 2.0) < 4 * 0.005
        assert abs(y - 3.0) < 4 * 0.005
    assert len({r[0] for r in readings_a}) > 1  # it actually varies


# --- IMU -----------------------------------------------------------------------


def test_imu_at_rest():
    imu = read_imu(VehicleState())
    assert imu.orientation_quat == (0.0, 0.0, 0.0, 1.0)
    assert imu.orientation_euler == (0.0, 0.0, 0.0)
    assert imu.angular_velocity == (0.0, 0.0, 0.0)
    assert imu.linear_acceleration == (0.0, 0.0, 9.81)


def test_imu_steady_left_circle():
    # steering command -1 is a left (CCW) turn
    state = drive(VehicleState(), 1.0, -1.0, 5.0)
    radius = GEOM.wheelbase / math.tan(LIMITS.steering_max)
    imu = read_imu(state)
    assert imu.angular_velocity[2] == pytest.approx(abs(state.v) / radius, rel=1e-3)
    assert imu.angular_velocity[2] == pytest.approx(0.8514, abs=2e-3)
    assert imu.linear_acceleration[1] == pytest.approx(state.v**2 / radius, rel=1e-3)
    assert imu.linear_acceleration[1] == pytest.approx(0.3766, abs=2e-3)


def test_imu_steady_right_circle_sign():
    state = drive(VehicleState(), 1.0, 1.0, 5.0)
    imu = read_imu(state)
    assert imu.angular_velocity[2] < -0.8
    assert imu.linear_acceleration[1] < -0.3


def _quat_to_matrix(x, y, z, w):
    return [
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ]


def _yaw_to_matrix(yaw):
    c, s = math.cos(yaw), math.sin(yaw)
    return [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]


def test_imu_quaternion_euler_cross_check():
    rng = random.Random(17)
    for _ in range(200):
        state = VehicleState(pose=Pose2D(0, 0, rng.uniform(-math.pi, math.pi)))
        imu = read_imu(state)
        assert math.hypot(*imu.orientation_quat) == pytest.approx(1.0, abs=1e-9)
        mq = _quat_to_matrix(*imu.orientation_quat)
        me = _yaw_to_matrix(imu.orientation_euler[2])
        for row_q, row_e in zip(mq, me):
            for a, b in zip(row_q, row_e):
                assert a == pytest.approx(b, abs=1e-9)


# --- LIDAR ---------------------------------------------------------------------


def test_lidar_empty_world_all_misses():
    scan = lidar_scan(VehicleState(pose=Pose2D(1.8, 1.8, 0.0)), lawn_world())
    assert scan.ranges == (12.0,) * 360
    assert scan.intensities == (0.0,) * 360


def test_lidar_wall_two_meters_ahead():
    pose = Pose2D(0.5, 1.8, 0.0)
    # box face perpendicular to ray 0, exactly 2 m from the scan origin
    world = lawn_world(boxes=[{"x": 0.5 + 0.15 + 2.0 + 0.1, "y": 1.8, "yaw": 0.0}])
    scan = lidar_scan(VehicleState(pose=pose), world)
    assert scan.ranges[0] == pytest.approx(2.0, abs=1e-9)
    assert scan.intensities[0] == pytest.approx(1.0 - 2.0 / 12.0, abs=1e-12)
    assert scan.intensities[0] == pytest.approx(0.8333, abs=1e-4)


def test_lidar_minimum_range_clamp():
    pose = Pose2D(0.9, 1.8, 0.0)
    world = lawn_world(boxes=[{"x": 0.9 + 0.15 + 0.10 + 0.1, "y": 1.8, "yaw": 0.0}])
    scan = lidar_scan(VehicleState(pose=pose), world)
    assert scan.ranges[0] == LIDAR_MIN_RANGE
    assert scan.intensities[0] == 0.0


def test_lidar_scan_length_and_bounds():
    with pytest.raises(ValueError):
        LidarScan(ranges=(1.0,) * 359, intensities=(0.0,) * 359)
    world = lawn_world(
        boxes=[{"x": 1.2, "y": 1.8, "yaw": 0.3}, {"x": 2.6, "y": 2.0, "yaw": -0.7}],
        bounds_wall=True,
    )
    scan = lidar_scan(VehicleState(pose=Pose2D(1.9, 1.5, 0.7)), world)
    assert len(scan.ranges) == len(scan.intensities) == 360
    assert all(LIDAR_MIN_RANGE <= r <= LIDAR_MAX_RANGE for r in scan.ranges)
    assert all(0.0 <= i <= 1.0 for i in scan.intensities)


def test_lidar_matches_brute_force_oracle():
    boxes = [
        {"x": 1.2, "y": 1.8, "yaw": 0.3},
        {"x": 2.6, "y": 2.0, "yaw": -0.7},
        {"x": 2.2, "y": 0.8, "yaw": 1.1},
    ]
    world = lawn_world(boxes=boxes, bounds_wall=True)
    pose = Pose2D(1.9, 1.5, 0.7)
    scan = lidar_scan(VehicleState(pose=pose), world)

    origin = (pose.x + 0.15 * math.cos(pose.yaw), pose.y + 0.15 * math.sin(pose.yaw))
    segments = []
    for b in boxes:
        segments += box_segments((b["x"], b["y"]), 0.1, b["yaw"])
    corners = [(0, 0), (3.6, 0), (3.6, 3.6), (0, 3.6)]
    segments += [(corners[i], corners[(i + 1) % 4]) for i in range(4)]
    directions = [
        (math.cos(pose.yaw + math.radians(i)), math.sin(pose.yaw + math.radians(i)))
        for i in range(360)
    ]
    expected = oracle_scene_ranges(origin, directions, segments, LIDAR_MAX_RANGE)
    for i in range(360):
        if expected[i] == math.inf:
            assert scan.ranges[i] == LIDAR_MAX_RANGE
            assert scan.intensities[i] == 0.0
        elif expected[i] < LIDAR_MIN_RANGE:
            assert scan.ranges[i] == LIDAR_MIN_RANGE
            assert scan.intensities[i] == 0.0
        else:
            assert abs(scan.ranges[i] - expected[i]) < 1e-9
            assert scan.intensities[i] == pytest.approx(
                1.0 - expected[i] / LIDAR_MAX_RANGE, abs=1e-9
            )


def test_sensors_are_pure_replay_identical():
    world = lawn_world(boxes=[{"x": 1.2, "y": 1.8, "yaw": 0.3}], bounds_wall=True)
    state = drive(VehicleState(pose=Pose2D(1.0, 1.0, 0.4)), 0.8, -0.3, 1.0)
    assert lidar_scan(state, world) == lidar_scan(state, world)
    assert read_imu(state) == read_imu(state)
    assert read_ips(state) == read_ips(state)


def test_odometry_closure_straight_run():
    state = VehicleState()
    enc = EncoderState()
    cmd = ActuatorCommand(1.0, 0.0)
    while state.pose.x < 5.0:
        state = step(state, cmd, DT, GEOM, LIMITS)
        enc = update_encoders(enc, (state.wheel_angle_left, state.wheel_angle_right))
    per_tick = math.tau * GEOM.wheel_radius / enc.ppr
    encoder_distance = 0.5 * (enc.ticks_left + enc.ticks_right) * per_tick
    ips = read_ips(state)
    displacement = math.hypot(ips[0], ips[1])
    assert abs(encoder_distance - displacement) / displacement < 0.005
