"""Deterministic fixed-timestep scheduler and top-level simulator.

Owns all mutable simulation state on a single thread. Other threads (the
bridge) interact through two hand-off points: latest-command cells written
by the network side and telemetry snapshots pushed to registered sinks.
Sensor rates are realized by simulated-time thresholds (emission on the
first tick at or after k/rate), so they never drift against sim time.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Callable, IO

from . import dynamics, sensors
from .core import Pose2D, VehicleGeometry
from .dynamics import ActuatorCommand, ActuatorLimits, VehicleState
from .environment import (
    DynamicBox,
    WorldMap,
    load_map,
    resolve_collisions,
    vehicle_rect,
)
from .sensors import EncoderState, GaussianNoise, Telemetry
from .signals import HeadlightMode, IndicatorMode, LightRequest, SignalState, update_signals


class Mode(str, Enum):
    MANUAL = "manual"
    AUTONOMOUS = "autonomous"


DEFAULT_MAP_NAME = "tinytown"


def bundled_map_text(name: str = DEFAULT_MAP_NAME) -> str:
    return (resources.files("minidrive") / "maps" / f"{name}.map").read_text("utf-8")


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.005
    lidar_rate: float = 7.0
    telemetry_rate: float = 30.0
    map_path: str | None = None  # None selects the bundled Tiny Town map
    geometry: VehicleGeometry = field(default_factory=VehicleGeometry)
    limits: ActuatorLimits = field(default_factory=ActuatorLimits)
    ips_noise_std: float = 0.0
    noise_seed: int = 0
    initial_pose: Pose2D = field(default_factory=lambda: Pose2D(1.05, 6.3, math.pi / 2))
    lidar_offset: float = 0.15  # scan origin forward of the rear reference
    vehicle_mass: float = 2.0

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not (self.lidar_rate > 0 and self.telemetry_rate > 0):
            raise ValueError("sensor rates must be positive")


@dataclass
class SimClock:
    """Integer tick accounting; sim_time is always tick_count * dt."""

    dt: float
    tick_count: int = 0
    fps_estimate: float = 0.0  # wall-clock ticks/s, set by the run loop only

    @property
    def sim_time(self) -> float:
        return self.tick_count * self.dt


def _world_fingerprint(world: WorldMap) -> str:
    doc = {
        "tile_size": world.tile_size,
        "bounds_wall": world.bounds_wall,
        "require_loop": world.require_loop,
        "grid": [[f"{t.type.value}:{t.rotation}" for t in row] for row in world.grid],
        "boxes": [
            {"x": b.center[0], "y": b.center[1], "yaw": b.yaw} for b in world.boxes
        ],
    }
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode()).hexdigest()


class RecordingError(ValueError):
    """Raised when a replay source is unusable or mismatched."""


class _Recorder:
    def __init__(self, sink: IO[str], fingerprint: dict):
        self._sink = sink
        self._last: tuple | None = None
        self._ticks = 0
        sink.write(json.dumps({"type": "header", "v": 1, "fingerprint": fingerprint}) + "\n")

    def capture(
        self,
        index: int,
        was_reset: bool,
        mode: Mode,
        scene_light: bool,
        lights: LightRequest,
        cmd: ActuatorCommand,
    ) -> None:
        snapshot = (
            mode.value,
            scene_light,
            int(lights.headlights),
            int(lights.indicators),
            cmd.throttle,
            cmd.steering,
        )
        if was_reset or snapshot != self._last:
            event = {
                "type": "input",
                "i": index,
                "mode": snapshot[0],
                "scene": snapshot[1],
                "headlights": snapshot[2],
                "indicators": snapshot[3],
                "throttle": snapshot[4],
                "steering": snapshot[5],
            }
            if was_reset:
                event["reset"] = True
            self._sink.write(json.dumps(event) + "\n")
            self._last = snapshot
        self._ticks = index + 1

    def close(self) -> None:
        self._sink.write(json.dumps({"type": "end", "ticks": self._ticks}) + "\n")
        self._sink.flush()


class _Replayer:
    def __init__(self, source: IO[str], fingerprint: dict):
        self.events: dict[int, dict] = {}
        self.total_ticks = 0
        header = None
        for line in source:
            line = line.strip()
            if not line:
                continue
            doc = json.loads(line)
            kind = doc.get("type")
            if kind == "header":
                header = doc
            elif kind == "input":
                self.events[int(doc["i"])] = doc
            elif kind == "end":
                self.total_ticks = int(doc["ticks"])
        if header is None:
            raise RecordingError("recording has no header line")
        if header.get("fingerprint") != fingerprint:
            raise RecordingError("recording was made with a different configuration")


class Simulator:
    """Headless simulator: vehicle + environment + sensors + signal lamps."""

    def __init__(self, config: SimConfig | None = None, world: WorldMap | None = None):
        self.config = config or SimConfig()
        if world is None:
            if self.config.map_path is None:
                text = bundled_map_text()
            else:
                text = Path(self.config.map_path).read_text("utf-8")
            world = load_map(text)
        self.world = world
        self._initial_boxes = [
            DynamicBox(b.center, b.yaw, b.half_extent, b.mass, b.velocity)
            for b in world.boxes
        ]
        self.clock = SimClock(self.config.dt)
        self.mode = Mode.MANUAL
        self.scene_light = True

        # Network->sim hand-off cells; each holds (value, writer connection id).
        self._manual_cell: tuple[ActuatorCommand, object] = (ActuatorCommand(), None)
        self._auto_cell: tuple[ActuatorCommand, object] = (ActuatorCommand(), None)
        self._light_request = LightRequest()
        self._controls: deque[str] = deque()
        self._telemetry_sinks: list[Callable[[Telemetry], None]] = []

        self._recorder: _Recorder | None = None
        self._record_handle: IO[str] | None = None
        self._replayer: _Replayer | None = None
        self._ticks_executed = 0
        self._reset_pending_capture = False

        self._init_state()

    # -- lifecycle ----------------------------------------------------------

    def _init_state(self) -> None:
        self.state = VehicleState(pose=self.config.initial_pose)
        self.encoders = EncoderState()
        self.signals = SignalState()
        self._light_request = LightRequest()
        self.world.boxes = [
            DynamicBox(b.center, b.yaw, b.half_extent, b.mass, b.velocity)
            for b in self._initial_boxes
        ]
        self.clock.tick_count = 0
        self.scene_light = True
        self._ips_noise = GaussianNoise(self.config.ips_noise_std, self.config.noise_seed)
        self._lidar_emitted = 0
        self._telemetry_emitted = 0
        self.lidar_scan_count = 0
        self._latest_scan = sensors.lidar_scan(
            self.state, self.world, self.config.lidar_offset
        )

    def reset(self) -> None:
        """Back to initial conditions; driving mode and connections persist."""
        self._init_state()
        self._reset_pending_capture = True

    def fingerprint(self) -> dict:
        cfg = self.config
        pristine = replace(self.world, boxes=self._initial_boxes)
        return {
            "dt": cfg.dt,
            "lidar_rate": cfg.lidar_rate,
            "telemetry_rate": cfg.telemetry_rate,
            "map": _world_fingerprint(pristine),
            "geometry": vars(cfg.geometry).copy(),
            "limits": vars(cfg.limits).copy(),
            "ips_noise_std": cfg.ips_noise_std,
            "noise_seed": cfg.noise_seed,
            "initial_pose": [cfg.initial_pose.x, cfg.initial_pose.y, cfg.initial_pose.yaw],
            "lidar_offset": cfg.lidar_offset,
            "vehicle_mass": cfg.vehicle_mass,
        }

    # -- external inputs (safe to call from bridge threads) ------------------

    def submit_command(
        self,
        cmd: ActuatorCommand,
        headlights: HeadlightMode | None = None,
        indicators: IndicatorMode | None = None,
        manual: bool = False,
        conn_id: object = None,
    ) -> None:
        """Latest-wins command hand-off; lamp requests apply in both modes."""
        cell = (cmd, conn_id)
        if manual:
            self._manual_cell = cell
        else:
            self._auto_cell = cell
        if headlights is not None or indicators is not None:
            current = self._light_request
            self._light_request = LightRequest(
                headlights if headlights is not None else current.headlights,
                indicators if indicators is not None else current.indicators,
            )

    def submit_control(self, action: str) -> None:
        """Queue a control-of-simulation action for the next tick."""
        self._controls.append(action)

    def clear_commands_from(self, conn_id: object) -> None:
        """Zero any command cell last written by a departed connection."""
        if self._manual_cell[1] == conn_id:
            self._manual_cell = (ActuatorCommand(), None)
        if self._auto_cell[1] == conn_id:
            self._auto_cell = (ActuatorCommand(), None)

    def set_mode(self, mode: Mode) -> None:
        self.mode = Mode(mode)

    def set_scene_light(self, on: bool) -> None:
        self.scene_light = bool(on)

    def add_telemetry_sink(self, sink: Callable[[Telemetry], None]) -> None:
        self._telemetry_sinks.append(sink)

    # -- record / replay ------------------------------------------------------

    def record(self, sink: str | Path | IO[str]) -> None:
        if self._ticks_executed != 0:
            raise RecordingError("recording must start on a freshly initialized simulator")
        if isinstance(sink, (str, Path)):
            self._record_handle = open(sink, "w", encoding="utf-8")
            sink = self._record_handle
        self._recorder = _Recorder(sink, self.fingerprint())

    def stop_recording(self) -> None:
        if self._recorder is not None:
            self._recorder.close()
            self._recorder = None
        if self._record_handle is not None:
            self._record_handle.close()
            self._record_handle = None

    def replay(self, source: str | Path | IO[str]) -> None:
        if self._ticks_executed != 0:
            raise RecordingError("replay must start on a freshly initialized simulator")
        if isinstance(source, (str, Path)):
            with open(source, "r", encoding="utf-8") as handle:
                self._replayer = _Replayer(handle, self.fingerprint())
        else:
            self._replayer = _Replayer(source, self.fingerprint())

    @property
    def replay_active(self) -> bool:
        return (
            self._replayer is not None
            and self._ticks_executed < self._replayer.total_ticks
        )

    # -- the tick -------------------------------------------------------------

    def _apply_control(self, action: str) -> None:
        if action == "reset":
            self.reset()
        elif action == "mode_manual":
            self.mode = Mode.MANUAL
        elif action == "mode_autonomous":
            self.mode = Mode.AUTONOMOUS
        elif action == "scene_light_on":
            self.scene_light = True
        elif action == "scene_light_off":
            self.scene_light = False

    def _apply_replay_event(self, event: dict) -> None:
        if event.get("reset"):
            self._init_state()
        self.mode = Mode(event["mode"])
        self.scene_light = bool(event["scene"])
        self._light_request = LightRequest(
            HeadlightMode(event["headlights"]), IndicatorMode(event["indicators"])
        )
        cmd = ActuatorCommand(event["throttle"], event["steering"])
        self._manual_cell = (cmd, None)
        self._auto_cell = (cmd, None)

    def tick(self) -> None:
        """Advance the simulation by exactly one dt."""
        if self._replayer is not None:
            event = self._replayer.events.get(self._ticks_executed)
            if event is not None:
                self._apply_replay_event(event)
        else:
            while self._controls:
                self._apply_control(self._controls.popleft())

        cmd = (self._manual_cell if self.mode is Mode.MANUAL else self._auto_cell)[0]
        lights = self._light_request

        if self._recorder is not None:
            self._recorder.capture(
                self._ticks_executed,
                self._reset_pending_capture,
                self.mode,
                self.scene_light,
                lights,
                cmd,
            )
        self._reset_pending_capture = False

        cfg = self.config
        state = dynamics.step(self.state, cmd, cfg.dt, cfg.geometry, cfg.limits)

        heading = state.pose.heading()
        result = resolve_collisions(
            self.world,
            vehicle_rect(state.pose, cfg.geometry),
            (state.v * heading[0], state.v * heading[1]),
            cfg.dt,
            vehicle_mass=cfg.vehicle_mass,
        )
        dx, dy = result.displacement
        if dx != 0.0 or dy != 0.0 or result.contact:
            pose = Pose2D(state.pose.x + dx, state.pose.y + dy, state.pose.yaw)
            v = result.velocity[0] * heading[0] + result.velocity[1] * heading[1]
            state = replace(state, pose=pose, v=v, yaw_rate=v * math.tan(state.steer_angle) / cfg.geometry.wheelbase)
        self.state = state

        self.clock.tick_count += 1
        self._ticks_executed += 1
        now = self.clock.sim_time

        self.signals = update_signals(self.signals, lights, state.gear, state.braking, now)
        self.encoders = update_encoders_from(self.encoders, state)

        while now >= (self._lidar_emitted + 1) / cfg.lidar_rate:
            self._latest_scan = sensors.lidar_scan(self.state, self.world, cfg.lidar_offset)
            self._lidar_emitted += 1
            self.lidar_scan_count += 1

        while now >= (self._telemetry_emitted + 1) / cfg.telemetry_rate:
            self._telemetry_emitted += 1
            frame = self.build_telemetry()
            for sink in self._telemetry_sinks:
                sink(frame)

    def run(self, sim_seconds: float) -> None:
        """Advance by a sim-time duration (rounded to whole ticks)."""
        for _ in range(int(round(sim_seconds / self.config.dt))):
            self.tick()

    # -- outputs ---------------------------------------------------------------

    @property
    def latest_scan(self):
        return self._latest_scan

    def build_telemetry(self) -> Telemetry:
        state = self.state
        noise = self._ips_noise if self.config.ips_noise_std > 0 else None
        return Telemetry(
            sim_time=self.clock.sim_time,
            throttle=sensors.read_throttle(state),
            steering=sensors.read_steering(state, self.config.limits),
            gear=state.gear,
            speed=abs(state.v),
            encoder=self.encoders,
            ips=sensors.read_ips(state, noise),
            imu=sensors.read_imu(state),
            lidar=self._latest_scan,
            lamps=self.signals,
            mode=self.mode.value,
            scene_light=self.scene_light,
        )


def update_encoders_from(enc: EncoderState, state: VehicleState) -> EncoderState:
    return sensors.update_encoders(enc, (state.wheel_angle_left, state.wheel_angle_right))
