"""Closed-loop demo: drive straight until the front LIDAR ray sees an
obstacle closer than a threshold, then stop.

Run a simulator first, e.g. `sim run --listen 127.0.0.1:4567`, then:

    python -m minidrive_client.stop_demo
"""

from __future__ import annotations

import argparse

from . import ClientSession, connect

DRIVE_THROTTLE = 0.5
STOP_DISTANCE = 0.45  # m on ray 0 (straight ahead)


def run(session: ClientSession, stop_distance: float = STOP_DISTANCE,
        throttle: float = DRIVE_THROTTLE, max_frames: int = 5000) -> float:
    """Drive until ray 0 < stop_distance, brake, wait for standstill.

    Returns the final front range reading.
    """
    session.set_mode("autonomous")
    for _ in range(max_frames):
        telemetry = session.wait_for_telemetry()
        front = telemetry.lidar_ranges[0]
        if front < stop_distance:
            session.send_command(0.0, 0.0)  # zero throttle engages auto-brake
            break
        session.send_command(throttle, 0.0)
    else:
        raise RuntimeError("never reached the obstacle")

    while True:
        telemetry = session.wait_for_telemetry()
        session.send_command(0.0, 0.0)
        if telemetry.speed < 1e-6:
            return telemetry.lidar_ranges[0]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=4567)
    parser.add_argument("--stop-distance", type=float, default=STOP_DISTANCE)
    args = parser.parse_args(argv)

    with connect(args.host, args.port) as session:
        front = run(session, stop_distance=args.stop_distance)
    print(f"stopped with front range {front:.3f} m")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
