"""Command-line entry points.

`sim run` starts the simulator with its WebSocket bridge; `map validate`
checks a map file and prints one violation per line. A JSON config file
(path from --config or the MINIDRIVE_CONFIG environment variable) supplies
defaults which individual flags override.
"""

from __future__ import annotations

import argparse
import functools
import http.server
import json
import logging
import os
import threading
import time
from pathlib import Path

from .bridge import Bridge, BridgeConfig, parse_endpoint
from .core import Pose2D
from .environment import MapError, load_map, validate
from .simcore import SimConfig, Simulator

log = logging.getLogger("minidrive.cli")

CONFIG_ENV_VAR = "MINIDRIVE_CONFIG"


def map_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="map", description="Map-file tools.")
    sub = parser.add_subparsers(dest="command", required=True)
    check = sub.add_parser("validate", help="validate a map file")
    check.add_argument("file", help="path to a .map file")
    args = parser.parse_args(argv)
    return _validate_map(args.file)


def _validate_map(path: str) -> int:
    try:
        world = load_map(Path(path).read_text("utf-8"))
    except OSError as exc:
        print(f"cannot read map: {exc}")
        return 1
    except MapError as exc:
        print(f"structural error: {exc}")
        return 1
    violations = validate(world)
    for violation in violations:
        print(violation)
    return 1 if violations else 0


def sim_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="sim", description="Vehicle simulator.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the simulator")
    run.add_argument("--map", dest="map_path", help="map file (default: bundled tinytown)")
    run.add_argument("--listen", help="accept bridge clients on ip:port")
    run.add_argument("--connect", help="dial out to a bridge server at ip:port")
    run.add_argument("--speed", type=float, help="real-time multiplier (default 1.0)")
    run.add_argument(
        "--headless-fast", action="store_true", help="run as fast as possible"
    )
    run.add_argument("--record", help="record inputs to this file")
    run.add_argument("--replay", help="replay inputs from this file")
    run.add_argument("--duration", type=float, help="stop after this many sim seconds")
    run.add_argument(
        "--config", default=os.environ.get(CONFIG_ENV_VAR), help="JSON config file"
    )
    run.add_argument("--ui-dir", help="serve this directory of static UI assets")
    run.add_argument("--ui-port", type=int, help="port for --ui-dir (default 8000)")
    args = parser.parse_args(argv)
    return _run(args)


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(f"cannot load config {path}: {exc}")
    if not isinstance(doc, dict):
        raise SystemExit(f"config {path} must hold a JSON object")
    return doc


def _build_sim_config(args, file_cfg: dict) -> SimConfig:
    def pick(flag_value, key, fallback):
        if flag_value is not None:
            return flag_value
        return file_cfg.get(key, fallback)

    defaults = SimConfig()
    kwargs = dict(
        dt=float(file_cfg.get("dt", defaults.dt)),
        lidar_rate=float(file_cfg.get("lidar_rate", defaults.lidar_rate)),
        telemetry_rate=float(file_cfg.get("telemetry_rate", defaults.telemetry_rate)),
        map_path=pick(args.map_path, "map", None),
        ips_noise_std=float(file_cfg.get("ips_noise_std", 0.0)),
        noise_seed=int(file_cfg.get("noise_seed", 0)),
        lidar_offset=float(file_cfg.get("lidar_offset", defaults.lidar_offset)),
        vehicle_mass=float(file_cfg.get("vehicle_mass", defaults.vehicle_mass)),
    )
    pose = file_cfg.get("initial_pose")
    if pose is not None:
        kwargs["initial_pose"] = Pose2D(float(pose[0]), float(pose[1]), float(pose[2]))
    return SimConfig(**kwargs)


def _start_ui_server(directory: str, port: int) -> http.server.ThreadingHTTPServer:
    handler = functools.partial(
        http.server.SimpleHTTPRequestHandler, directory=directory
    )
    server = http.server.ThreadingHTTPServer(("0.0.0.0", port), handler)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    log.info("serving UI assets from %s at http://localhost:%d/", directory, port)
    return server


def _run(args) -> int:
    logging.basicConfig(level=logging.INFO, format="%(name)s: %(message)s")
    file_cfg = _load_config_file(args.config)
    config = _build_sim_config(args, file_cfg)
    sim = Simulator(config)

    listen_arg = args.listen or file_cfg.get("listen")
    connect_arg = args.connect or file_cfg.get("connect")
    listen_cfg = parse_endpoint(listen_arg, "listen") if listen_arg else None
    connect_cfg = parse_endpoint(connect_arg, "connect") if connect_arg else None
    if listen_cfg is None and connect_cfg is None:
        connect_cfg = BridgeConfig(role="connect")  # stock script-is-server topology
    bridge = Bridge(sim, listen=listen_cfg, connect=connect_cfg)

    speed = args.speed if args.speed is not None else float(file_cfg.get("speed", 1.0))
    headless_fast = args.headless_fast or bool(file_cfg.get("headless_fast", False))
    duration = args.duration if args.duration is not None else file_cfg.get("duration")
    record_path = args.record or file_cfg.get("record")
    replay_path = args.replay or file_cfg.get("replay")

    if record_path:
        sim.record(record_path)
    if replay_path:
        sim.replay(replay_path)

    ui_server = None
    ui_dir = args.ui_dir or file_cfg.get("ui_dir")
    if ui_dir:
        ui_server = _start_ui_server(ui_dir, args.ui_port or int(file_cfg.get("ui_port", 8000)))

    bridge.start()
    log.info(
        "running: map=%s dt=%s speed=%s%s",
        config.map_path or "tinytown (bundled)",
        config.dt,
        "max" if headless_fast else speed,
        " [replay]" if replay_path else "",
    )

    start = time.monotonic()
    window_start, window_ticks = start, 0
    ticks = 0
    try:
        while True:
            sim.tick()
            ticks += 1
            window_ticks += 1
            if replay_path and not sim.replay_active:
                break
            if duration is not None and ticks * config.dt >= float(duration):
                break
            if not headless_fast:
                target = start + ticks * config.dt / speed
                delay = target - time.monotonic()
                if delay > 0:
                    time.sleep(delay)
            now = time.monotonic()
            if now - window_start >= 0.5:
                sim.clock.fps_estimate = window_ticks / (now - window_start)
                window_start, window_ticks = now, 0
    except KeyboardInterrupt:
        log.info("interrupted")
    finally:
        sim.stop_recording()
        bridge.stop()
        if ui_server is not None:
            ui_server.shutdown()
    log.info("stopped after %d ticks (%.3f sim seconds)", ticks, ticks * config.dt)
    return 0
