import json
import math
import socket
import threading
import time
from pathlib import Path

import pytest
from websockets.sync.server import serve

from minidrive_client import (
    ClientError,
    Telemetry,
    clamp_unit,
    connect,
    encode_command,
)

GOLDEN = Path(__file__).parent / "golden"


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


# --- clamp parity with the simulator (golden vectors) ---------------------------


@pytest.mark.parametrize(
    "raw, clamped",
    [
        (0.5, 0.5),
        (-0.2, -0.2),
        (7.0, 1.0),
        (-3.0, -1.0),
        (2.0, 1.0),
        (1.0, 1.0),
        (0.0, 0.0),
    ],
)
def test_clamp_parity_vectors(raw, clamped):
    assert clamp_unit(raw) == clamped


def test_clamp_rejects_nan():
    with pytest.raises(ValueError):
        clamp_unit(math.nan)


def test_command_frame_matches_bridge_golden_bytes():
    want = (GOLDEN / "command_frame.json").read_text().strip()
    assert encode_command(0.5, -0.2, headlights=1, indicators=3) == want
    # out-of-range values are clamped before they hit the wire
    doc = json.loads(encode_command(2.0, -3.0, headlights=9, indicators=-1))
    assert doc["throttle"] == 1.0 and doc["steering"] == -1.0
    assert doc["headlights"] == 2 and doc["indicators"] == 0


# --- session behavior against a fake simulator ----------------------------------


def telemetry_frame(sim_time: float, front: float = 12.0, speed: float = 0.0) -> str:
    ranges = [12.0] * 360
    ranges[0] = front
    return json.dumps(
        {
            "type": "telemetry",
            "v": 1,
            "time": sim_time,
            "mode": "autonomous",
            "gear": "D",
            "speed": speed,
            "throttle": 0.0,
            "steering": 0.0,
            "encoder_ticks": [0, 0],
            "encoder_angles": [0.0, 0.0],
            "ips": [0.0, 0.0, 0.0],
            "imu": {
                "quat": [0.0, 0.0, 0.0, 1.0],
                "euler": [0.0, 0.0, 0.0],
                "ang_vel": [0.0, 0.0, 0.0],
                "lin_acc": [0.0, 0.0, 9.81],
            },
            "lidar": {"ranges": ranges, "intensities": [0.0] * 360},
            "lamps": {"headlights": 0, "indicators": 0, "taillight": 2, "reverse": False},
            "scene_light": True,
        }
    )


class FakeSimulator:
    """Minimal listen-role peer speaking the wire schema."""

    def __init__(self):
        self.port = free_port()
        self.received = []
        self.clients = []
        self._server = serve(self._handler, "127.0.0.1", self.port)
        threading.Thread(target=self._server.serve_forever, daemon=True).start()

    def _handler(self, ws):
        self.clients.append(ws)
        ws.send(json.dumps({"type": "map", "tile_size": 1.8, "grid": [["lawn:0"]]}))
        for message in ws:
            self.received.append(json.loads(message))

    def push(self, frame: str):
        for ws in list(self.clients):
            try:
                ws.send(frame)
            except Exception:
                pass

    def stop(self):
        self._server.shutdown()


@pytest.fixture
def fake_sim():
    sim = FakeSimulator()
    yield sim
    sim.stop()


def test_connect_refused_raises():
    with pytest.raises(ClientError):
        connect(port=free_port(), reconnect=False, open_timeout=0.5)


def test_session_receives_map_and_telemetry(fake_sim):
    with connect(port=fake_sim.port) as session:
        seen = []
        session.on_telemetry(seen.append)
        fake_sim.push(telemetry_frame(0.1, front=3.0))
        t = session.wait_for_telemetry(timeout=5)
        assert isinstance(t, Telemetry)
        assert t.sim_time == 0.1
        assert t.lidar_ranges[0] == 3.0
        assert t.taillight == 2
        assert session.map["tile_size"] == 1.8
        assert seen and seen[-1].sim_time == 0.1


def test_latest_only_moves_forward(fake_sim):
    with connect(port=fake_sim.port) as session:
        fake_sim.push(telemetry_frame(0.5))
        session.wait_for_telemetry(timeout=5)
        fake_sim.push(telemetry_frame(0.4))  # stale, must be ignored
        fake_sim.push(telemetry_frame(0.6))
        t = session.wait_for_telemetry(timeout=5)
        assert t.sim_time == 0.6
        assert session.latest.sim_time == 0.6


def test_send_command_and_controls_reach_the_wire(fake_sim):
    with connect(port=fake_sim.port) as session:
        session.set_mode("autonomous")
        session.send_command(0.3, 0.0)
        session.send_command(2.0, -3.0, indicators=3)
        session.reset()
        deadline = time.monotonic() + 5
        while len(fake_sim.received) < 4 and time.monotonic() < deadline:
            time.sleep(0.01)
        kinds = [m["type"] for m in fake_sim.received]
        assert kinds == ["control", "command", "command", "control"]
        assert fake_sim.received[0]["action"] == "mode_autonomous"
        assert fake_sim.received[1]["throttle"] == 0.3
        assert fake_sim.received[2]["throttle"] == 1.0  # clamp parity
        assert fake_sim.received[2]["steering"] == -1.0
        assert fake_sim.received[2]["indicators"] == 3
        assert fake_sim.received[3]["action"] == "reset"


def test_reconnect_after_simulator_restart(fake_sim):
    session = connect(port=fake_sim.port)
    try:
        fake_sim.push(telemetry_frame(5.0))
        assert session.wait_for_telemetry(timeout=5).sim_time == 5.0

        drops = []
        session.on_disconnect(lambda: drops.append(True))
        for ws in fake_sim.clients:
            ws.close()
        deadline = time.monotonic() + 5
        while not session.connected or len(fake_sim.clients) < 2:
            assert time.monotonic() < deadline, "did not reconnect"
            time.sleep(0.02)
        assert drops  # handler notified

        # a restarted simulator begins again at t=0 and must not be dropped
        fake_sim.push(telemetry_frame(0.05))
        assert session.wait_for_telemetry(timeout=5).sim_time == 0.05
    finally:
        session.close()


def test_send_when_disconnected_raises():
    from minidrive_client import ClientSession

    dangling = ClientSession("ws://127.0.0.1:1", reconnect=False)
    with pytest.raises(ClientError):
        dangling.send_command(0.1, 0.0)
