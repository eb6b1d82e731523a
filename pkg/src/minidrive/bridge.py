"""WebSocket communication bridge.

One JSON object per text frame. Frame types: "telemetry" and "map" flow
simulator -> peer; "command" and "control" flow peer -> simulator. The
encoding is deterministic (fixed key order, shortest round-trip floats) so
identical telemetry always serializes to identical bytes.

Command frames carrying "source": "teleop" feed the manual-mode input cell
(the browser UI uses this); plain command frames are autonomy input and
their drive fields only take effect in autonomous mode. Lamp fields apply
in both modes. Unknown top-level keys are ignored for forward compatibility.
"""

from __future__ import annotations

import itertools
import json
import logging
import threading
from dataclasses import dataclass

from .dynamics import ActuatorCommand, Gear
from .environment import WorldMap
from .sensors import EncoderState, ImuReading, LidarScan, Telemetry
from .signals import HeadlightMode, IndicatorMode, SignalState, TaillightLevel, blink_phase

log = logging.getLogger("minidrive.bridge")

SCHEMA_VERSION = 1
DEFAULT_IP = "127.0.0.1"
DEFAULT_PORT = 4567

CONTROL_ACTIONS = (
    "reset",
    "mode_manual",
    "mode_autonomous",
    "scene_light_on",
    "scene_light_off",
)


class FrameError(ValueError):
    """Raised when an inbound frame cannot be accepted."""


def _is_ipv4(text: str) -> bool:
    parts = text.split(".")
    if len(parts) != 4:
        return False
    for part in parts:
        if not part.isdigit() or not 0 <= int(part) <= 255:
            return False
    return True


@dataclass(frozen=True)
class BridgeConfig:
    ip: str = DEFAULT_IP
    port: int = DEFAULT_PORT
    role: str = "listen"  # "listen" | "connect"

    def __post_init__(self) -> None:
        if not _is_ipv4(self.ip):
            raise ValueError(f"ip must be an IPv4 dotted quad, got {self.ip!r}")
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port must be in [1, 65535], got {self.port}")
        if self.role not in ("listen", "connect"):
            raise ValueError(f"role must be 'listen' or 'connect', got {self.role!r}")


def parse_endpoint(text: str, role: str) -> BridgeConfig:
    """Parse 'ip:port' (or bare ':port' / 'port' for loopback)."""
    if ":" in text:
        host, _, port_str = text.rpartition(":")
        host = host or DEFAULT_IP
    else:
        host, port_str = DEFAULT_IP, text
    try:
        port = int(port_str)
    except ValueError:
        raise ValueError(f"invalid endpoint {text!r}") from None
    return BridgeConfig(ip=host, port=port, role=role)


# --- encoding ---------------------------------------------------------------


def _dumps(doc: dict) -> str:
    return json.dumps(doc, separators=(",", ":"), allow_nan=False)


def encode_telemetry(t: Telemetry) -> str:
    doc = {
        "type": "telemetry",
        "v": SCHEMA_VERSION,
        "time": t.sim_time,
        "mode": t.mode,
        "gear": t.gear.value,
        "speed": t.speed,
        "throttle": t.throttle,
        "steering": t.steering,
        "encoder_ticks": [t.encoder.ticks_left, t.encoder.ticks_right],
        "encoder_angles": [t.encoder.angle_left, t.encoder.angle_right],
        "ips": list(t.ips),
        "imu": {
            "quat": list(t.imu.orientation_quat),
            "euler": list(t.imu.orientation_euler),
            "ang_vel": list(t.imu.angular_velocity),
            "lin_acc": list(t.imu.linear_acceleration),
        },
        "lidar": {
            "ranges": list(t.lidar.ranges),
            "intensities": list(t.lidar.intensities),
        },
        "lamps": {
            "headlights": int(t.lamps.headlights),
            "indicators": int(t.lamps.indicators),
            "taillight": int(t.lamps.taillight_level),
            "reverse": t.lamps.reverse_on,
        },
        "scene_light": t.scene_light,
    }
    return _dumps(doc)


def decode_telemetry(text: str) -> Telemetry:
    doc = json.loads(text)
    if doc.get("type") != "telemetry":
        raise FrameError("not a telemetry frame")
    imu = doc["imu"]
    lamps = doc["lamps"]
    sim_time = float(doc["time"])
    return Telemetry(
        sim_time=sim_time,
        throttle=float(doc["throttle"]),
        steering=float(doc["steering"]),
        gear=Gear(doc["gear"]),
        speed=float(doc["speed"]),
        encoder=EncoderState(
            ticks_left=int(doc["encoder_ticks"][0]),
            ticks_right=int(doc["encoder_ticks"][1]),
            angle_left=float(doc["encoder_angles"][0]),
            angle_right=float(doc["encoder_angles"][1]),
        ),
        ips=tuple(float(v) for v in doc["ips"]),
        imu=ImuReading(
            orientation_quat=tuple(float(v) for v in imu["quat"]),
            orientation_euler=tuple(float(v) for v in imu["euler"]),
            angular_velocity=tuple(float(v) for v in imu["ang_vel"]),
            linear_acceleration=tuple(float(v) for v in imu["lin_acc"]),
        ),
        lidar=LidarScan(
            ranges=tuple(float(v) for v in doc["lidar"]["ranges"]),
            intensities=tuple(float(v) for v in doc["lidar"]["intensities"]),
        ),
        lamps=SignalState(
            headlights=HeadlightMode(int(lamps["headlights"])),
            indicators=IndicatorMode(int(lamps["indicators"])),
            taillight_level=TaillightLevel(int(lamps["taillight"])),
            reverse_on=bool(lamps["reverse"]),
            blink_phase_on=blink_phase(sim_time),
        ),
        mode=str(doc["mode"]),
        scene_light=bool(doc["scene_light"]),
    )


def encode_command(
    throttle: float,
    steering: float,
    headlights: int = 0,
    indicators: int = 0,
    teleop: bool = False,
) -> str:
    doc = {
        "type": "command",
        "throttle": float(throttle),
        "steering": float(steering),
        "headlights": int(headlights),
        "indicators": int(indicators),
    }
    if teleop:
        doc["source"] = "teleop"
    return _dumps(doc)


def encode_control(action: str) -> str:
    if action not in CONTROL_ACTIONS:
        raise ValueError(f"unknown control action {action!r}")
    return _dumps({"type": "control", "action": action})


def encode_map(world: WorldMap, geometry) -> str:
    doc = {
        "type": "map",
        "v": SCHEMA_VERSION,
        "tile_size": world.tile_size,
        "bounds_wall": world.bounds_wall,
        "require_loop": world.require_loop,
        "grid": [[f"{t.type.value}:{t.rotation}" for t in row] for row in world.grid],
        "boxes": [
            {"x": b.center[0], "y": b.center[1], "yaw": b.yaw, "half_extent": b.half_extent}
            for b in world.boxes
        ],
        "vehicle": {
            "wheelbase": geometry.wheelbase,
            "track": geometry.track,
            "body_length": geometry.body_length,
            "body_width": geometry.body_width,
        },
    }
    return _dumps(doc)


@dataclass(frozen=True)
class DecodedCommand:
    cmd: ActuatorCommand
    headlights: HeadlightMode | None
    indicators: IndicatorMode | None
    teleop: bool


@dataclass(frozen=True)
class DecodedControl:
    action: str


def _clamped_enum(value, enum_cls, hi: int):
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FrameError(f"lamp field must be numeric, got {value!r}")
    return enum_cls(min(hi, max(0, int(value))))


def decode_message(text: str) -> DecodedCommand | DecodedControl:
    """Decode one inbound frame; raises FrameError on anything unusable."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FrameError(f"frame is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise FrameError("frame must be a JSON object")
    kind = doc.get("type")
    if kind is None:
        raise FrameError("frame has no type")
    if kind == "command":
        throttle = doc.get("throttle", 0.0)
        steering = doc.get("steering", 0.0)
        if isinstance(throttle, bool) or not isinstance(throttle, (int, float)):
            raise FrameError("throttle must be numeric")
        if isinstance(steering, bool) or not isinstance(steering, (int, float)):
            raise FrameError("steering must be numeric")
        try:
            cmd = ActuatorCommand(float(throttle), float(steering))
        except ValueError as exc:
            raise FrameError(str(exc)) from None
        return DecodedCommand(
            cmd=cmd,
            headlights=_clamped_enum(doc.get("headlights"), HeadlightMode, 2),
            indicators=_clamped_enum(doc.get("indicators"), IndicatorMode, 3),
            teleop=doc.get("source") == "teleop",
        )
    if kind == "control":
        action = doc.get("action")
        if action not in CONTROL_ACTIONS:
            raise FrameError(f"unknown control action {action!r}")
        return DecodedControl(action=action)
    raise FrameError(f"unknown frame type {kind!r}")


# --- connection hub -----------------------------------------------------------


class _Peer:
    """One connected endpoint with a latest-wins outbound slot."""

    def __init__(self, ws, conn_id: int):
        self.ws = ws
        self.conn_id = conn_id
        self._cond = threading.Condition()
        self._pending: str | None = None
        self._closed = False
        self._sender = threading.Thread(target=self._send_loop, daemon=True)
        self._sender.start()

    def offer(self, text: str) -> None:
        with self._cond:
            self._pending = text
            self._cond.notify()

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify()
        try:
            self.ws.close()
        except Exception:
            pass

    def _send_loop(self) -> None:
        while True:
            with self._cond:
                while self._pending is None and not self._closed:
                    self._cond.wait()
                if self._closed:
                    return
                text, self._pending = self._pending, None
            try:
                self.ws.send(text)
            except Exception:
                return


class Bridge:
    """Connection hub tying WebSocket peers to a simulator.

    listen role accepts clients (UI, scripting APIs); connect role dials out
    to a user's server and retries with backoff while unreachable. Both may
    be active at once.
    """

    RETRY_INITIAL = 0.2
    RETRY_MAX = 2.0

    def __init__(self, sim, listen: BridgeConfig | None = None,
                 connect: BridgeConfig | None = None):
        self.sim = sim
        self.listen_config = listen
        self.connect_config = connect
        self._ids = itertools.count(1)
        self._peers: dict[int, _Peer] = {}
        self._peers_lock = threading.Lock()
        self._server = None
        self._threads: list[threading.Thread] = []
        self._stopping = threading.Event()
        sim.add_telemetry_sink(self._broadcast)

    # -- lifecycle

    def start(self) -> None:
        if self.listen_config is not None:
            from websockets.sync.server import serve

            self._server = serve(
                self._serve_connection, self.listen_config.ip, self.listen_config.port
            )
            thread = threading.Thread(target=self._server.serve_forever, daemon=True)
            thread.start()
            self._threads.append(thread)
        if self.connect_config is not None:
            thread = threading.Thread(target=self._dial_loop, daemon=True)
            thread.start()
            self._threads.append(thread)

    def stop(self) -> None:
        self._stopping.set()
        with self._peers_lock:
            peers = list(self._peers.values())
        for peer in peers:
            peer.close()
        if self._server is not None:
            self._server.shutdown()

    @property
    def listen_port(self) -> int | None:
        """Actual bound port (handy when configured with port 0 in tests)."""
        if self._server is None:
            return None
        return self._server.socket.getsockname()[1]

    @property
    def connected(self) -> bool:
        with self._peers_lock:
            return bool(self._peers)

    @property
    def status(self) -> str:
        return "Connected" if self.connected else "Disconnected"

    # -- telemetry out

    def _broadcast(self, telemetry: Telemetry) -> None:
        with self._peers_lock:
            peers = list(self._peers.values())
        if not peers:
            return
        text = encode_telemetry(telemetry)
        for peer in peers:
            peer.offer(text)

    # -- inbound handling

    def _serve_connection(self, ws) -> None:
        conn_id = next(self._ids)
        peer = _Peer(ws, conn_id)
        with self._peers_lock:
            self._peers[conn_id] = peer
        log.info("peer %d connected", conn_id)
        try:
            ws.send(encode_map(self.sim.world, self.sim.config.geometry))
            for message in ws:
                if isinstance(message, bytes):
                    message = message.decode("utf-8", "replace")
                self._dispatch(message, conn_id)
        except Exception as exc:
            log.debug("peer %d receive loop ended: %s", conn_id, exc)
        finally:
            with self._peers_lock:
                self._peers.pop(conn_id, None)
            peer.close()
            self.sim.clear_commands_from(conn_id)
            log.info("peer %d disconnected", conn_id)

    def _dispatch(self, message: str, conn_id: int) -> None:
        try:
            decoded = decode_message(message)
        except FrameError as exc:
            log.warning("dropping bad frame from peer %d: %s", conn_id, exc)
            return
        if isinstance(decoded, DecodedCommand):
            self.sim.submit_command(
                decoded.cmd,
                headlights=decoded.headlights,
                indicators=decoded.indicators,
                manual=decoded.teleop,
                conn_id=conn_id,
            )
        else:
            self.sim.submit_control(decoded.action)

    def _dial_loop(self) -> None:
        from websockets.sync.client import connect as ws_connect

        cfg = self.connect_config
        url = f"ws://{cfg.ip}:{cfg.port}"
        backoff = self.RETRY_INITIAL
        while not self._stopping.is_set():
            try:
                ws = ws_connect(url, open_timeout=2.0)
            except Exception:
                self._stopping.wait(backoff)
                backoff = min(backoff * 2.0, self.RETRY_MAX)
                continue
            backoff = self.RETRY_INITIAL
            self._serve_connection(ws)
            self._stopping.wait(self.RETRY_INITIAL)
