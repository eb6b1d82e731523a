"""Scripting client for the minidrive simulator.

Talks the bridge's JSON-over-WebSocket schema directly, no middleware in
between. Two topologies:

- ``connect(...)`` dials a simulator that is listening (``sim run --listen``).
- ``serve(...)`` acts as the server and waits for a simulator started with
  ``--connect`` to dial in (the stock script-is-server topology).

Either way you get a :class:`ClientSession`: register a telemetry callback
or block on :meth:`ClientSession.wait_for_telemetry`, and drive with
:meth:`ClientSession.send_command`.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass
from typing import Callable

from websockets.sync.client import connect as _ws_connect

__all__ = [
    "ClientError",
    "ClientSession",
    "Telemetry",
    "clamp_unit",
    "connect",
    "serve",
]

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 4567

CONTROL_ACTIONS = (
    "reset",
    "mode_manual",
    "mode_autonomous",
    "scene_light_on",
    "scene_light_off",
)


class ClientError(ConnectionError):
    """Connection could not be established or was required but is down."""


def clamp_unit(value: float) -> float:
    """Clamp to [-1, 1]; same rule the simulator applies server-side."""
    value = float(value)
    if math.isnan(value):
        raise ValueError("command values must not be NaN")
    return max(-1.0, min(1.0, value))


def encode_command(throttle: float, steering: float, headlights: int = 0,
                   indicators: int = 0) -> str:
    doc = {
        "type": "command",
        "throttle": clamp_unit(throttle),
        "steering": clamp_unit(steering),
        "headlights": min(2, max(0, int(headlights))),
        "indicators": min(3, max(0, int(indicators))),
    }
    return json.dumps(doc, separators=(",", ":"))


@dataclass(frozen=True)
class Telemetry:
    """One decoded telemetry frame (wire fields, pythonic names)."""

    sim_time: float
    mode: str
    gear: str
    speed: float
    throttle: float
    steering: float
    encoder_ticks: tuple[int, int]
    encoder_angles: tuple[float, float]
    ips: tuple[float, float, float]
    imu_quat: tuple[float, float, float, float]
    imu_euler: tuple[float, float, float]
    imu_angular_velocity: tuple[float, float, float]
    imu_linear_acceleration: tuple[float, float, float]
    lidar_ranges: tuple[float, ...]
    lidar_intensities: tuple[float, ...]
    headlights: int
    indicators: int
    taillight: int
    reverse: bool
    scene_light: bool

    @classmethod
    def from_frame(cls, doc: dict) -> "Telemetry":
        imu, lamps = doc["imu"], doc["lamps"]
        return cls(
            sim_time=float(doc["time"]),
            mode=doc["mode"],
            gear=doc["gear"],
            speed=float(doc["speed"]),
            throttle=float(doc["throttle"]),
            steering=float(doc["steering"]),
            encoder_ticks=tuple(doc["encoder_ticks"]),
            encoder_angles=tuple(doc["encoder_angles"]),
            ips=tuple(doc["ips"]),
            imu_quat=tuple(imu["quat"]),
            imu_euler=tuple(imu["euler"]),
            imu_angular_velocity=tuple(imu["ang_vel"]),
            imu_linear_acceleration=tuple(imu["lin_acc"]),
            lidar_ranges=tuple(doc["lidar"]["ranges"]),
            lidar_intensities=tuple(doc["lidar"]["intensities"]),
            headlights=int(lamps["headlights"]),
            indicators=int(lamps["indicators"]),
            taillight=int(lamps["taillight"]),
            reverse=bool(lamps["reverse"]),
            scene_light=bool(doc["scene_light"]),
        )


class ClientSession:
    """Live session with a simulator.

    A background thread receives frames; ``latest`` always holds the newest
    telemetry (monotone in sim_time within a connection). User callbacks run
    on the receive thread, so keep them quick.
    """

    def __init__(self, endpoint: str, reconnect: bool = True):
        self.endpoint = endpoint
        self.connected = False
        self.latest: Telemetry | None = None
        self.map: dict | None = None
        self._reconnect = reconnect
        self._ws = None
        self._lock = threading.Lock()
        self._update = threading.Condition(self._lock)
        self._closed = threading.Event()
        self._handlers: list[Callable[[Telemetry], None]] = []
        self._disconnect_handlers: list[Callable[[], None]] = []
        self._thread: threading.Thread | None = None
        self._server = None  # set when this session owns a listening socket
        self._watermark = -math.inf

    # -- wiring (used by connect()/serve())

    def _attach(self, ws) -> None:
        with self._lock:
            self._ws = ws
            self.connected = True
            self._watermark = -math.inf  # a restarted simulator starts at t=0

    def _detach(self) -> None:
        with self._lock:
            self._ws = None
            self.connected = False
        for handler in list(self._disconnect_handlers):
            handler()

    def _receive_loop(self) -> None:
        while not self._closed.is_set():
            ws = self._ws
            if ws is None:
                if not self._reconnect:
                    return
                try:
                    self._attach(_ws_connect(self.endpoint, open_timeout=2.0))
                except Exception:
                    self._closed.wait(0.5)
                continue
            try:
                message = ws.recv()
            except Exception:
                self._detach()
                if not self._reconnect:
                    return
                continue
            self._handle_frame(message)

    def _handle_frame(self, message) -> None:
        try:
            doc = json.loads(message)
        except (TypeError, ValueError):
            return
        kind = doc.get("type")
        if kind == "map":
            self.map = doc
            return
        if kind != "telemetry":
            return
        telemetry = Telemetry.from_frame(doc)
        with self._update:
            if telemetry.sim_time <= self._watermark:
                return
            self._watermark = telemetry.sim_time
            self.latest = telemetry
            self._update.notify_all()
        for handler in list(self._handlers):
            handler(telemetry)

    # -- public API

    def on_telemetry(self, handler: Callable[[Telemetry], None]) -> None:
        self._handlers.append(handler)

    def on_disconnect(self, handler: Callable[[], None]) -> None:
        self._disconnect_handlers.append(handler)

    def wait_for_telemetry(self, timeout: float | None = 10.0) -> Telemetry:
        """Block until a frame newer than the current one arrives."""
        with self._update:
            current = self.latest
            ok = self._update.wait_for(
                lambda: self.latest is not current and self.latest is not None,
                timeout,
            )
            if not ok:
                raise TimeoutError("no telemetry received in time")
            return self.latest

    def _send(self, text: str) -> None:
        ws = self._ws
        if ws is None:
            raise ClientError("session is not connected")
        try:
            ws.send(text)
        except Exception as exc:
            raise ClientError(f"send failed: {exc}") from exc

    def send_command(self, throttle: float, steering: float,
                     headlights: int = 0, indicators: int = 0) -> None:
        """Send one drive/lamp command frame (values clamped client-side)."""
        self._send(encode_command(throttle, steering, headlights, indicators))

    def send_control(self, action: str) -> None:
        if action not in CONTROL_ACTIONS:
            raise ValueError(f"unknown control action {action!r}")
        self._send(json.dumps({"type": "control", "action": action},
                              separators=(",", ":")))

    def set_mode(self, mode: str) -> None:
        self.send_control("mode_autonomous" if mode == "autonomous" else "mode_manual")

    def reset(self) -> None:
        self.send_control("reset")

    def set_scene_light(self, on: bool) -> None:
        self.send_control("scene_light_on" if on else "scene_light_off")

    def close(self) -> None:
        self._closed.set()
        ws = self._ws
        if ws is not None:
            try:
                ws.close()
            except Exception:
                pass
        self._detach()
        if self._server is not None:
            self._server.shutdown()
        if self._thread is not None and self._thread is not threading.current_thread():
            self._thread.join(timeout=2.0)

    def __enter__(self) -> "ClientSession":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def connect(host: str = DEFAULT_HOST, port: int = DEFAULT_PORT,
            reconnect: bool = True, open_timeout: float = 5.0) -> ClientSession:
    """Dial a listening simulator; raises ClientError if nothing answers."""
    endpoint = f"ws://{host}:{port}"
    session = ClientSession(endpoint, reconnect=reconnect)
    try:
        ws = _ws_connect(endpoint, open_timeout=open_timeout)
    except Exception as exc:
        raise ClientError(f"cannot connect to {endpoint}: {exc}") from exc
    session._attach(ws)
    session._thread = threading.Thread(target=session._receive_loop, daemon=True)
    session._thread.start()
    return session


def serve(host: str = DEFAULT_HOST, port: int = DEFAULT_PORT,
          accept_timeout: float | None = 30.0) -> ClientSession:
    """Run as the server and wait for a simulator in connect role to dial in."""
    from websockets.sync.server import serve as _ws_serve

    endpoint = f"ws://{host}:{port}"
    session = ClientSession(endpoint, reconnect=False)
    ready = threading.Event()

    def handler(ws):
        session._attach(ws)
        ready.set()
        while not session._closed.is_set():
            try:
                message = ws.recv()
            except Exception:
                break
            session._handle_frame(message)
        session._detach()

    server = _ws_serve(handler, host, port)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    session._server = server
    if not ready.wait(accept_timeout):
        session.close()
        raise ClientError(f"no simulator dialed {endpoint} in {accept_timeout}s")
    return session
