import json
import subprocess
import sys

import pytest

from minidrive.cli import map_main, sim_main
from minidrive.simcore import bundled_map_text


@pytest.fixture
def tinytown_file(tmp_path):
    path = tmp_path / "town.map"
    path.write_text(bundled_map_text())
    return path


def test_map_validate_ok(tinytown_file, capsys):
    assert map_main(["validate", str(tinytown_file)]) == 0
    assert capsys.readouterr().out == ""


def test_map_validate_reports_violations(tmp_path, capsys):
    doc = json.loads(bundled_map_text())
    doc["grid"][1][0] = "lawn:0"
    bad = tmp_path / "bad.map"
    bad.write_text(json.dumps(doc))
    assert map_main(["validate", str(bad)]) == 1
    out = capsys.readouterr().out.strip().splitlines()
    assert out and all("connectivity" in line or "loop" in line for line in out)


def test_map_validate_structural_error(tmp_path, capsys):
    bad = tmp_path / "broken.map"
    bad.write_text("{nope")
    assert map_main(["validate", str(bad)]) == 1
    assert "structural error" in capsys.readouterr().out


def test_sim_run_headless_fast_with_record_and_replay(tmp_path):
    recording = tmp_path / "drive.rec"
    assert (
        sim_main(
            [
                "run",
                "--headless-fast",
                "--duration",
                "2.0",
                "--listen",
                "127.0.0.1:45991",
                "--record",
                str(recording),
            ]
        )
        == 0
    )
    lines = [json.loads(l) for l in recording.read_text().splitlines()]
    assert lines[0]["type"] == "header"
    assert lines[-1] == {"type": "end", "ticks": 400}

    assert (
        sim_main(["run", "--headless-fast", "--replay", str(recording)]) == 0
    )


def test_module_entry_point(tinytown_file):
    proc = subprocess.run(
        [sys.executable, "-m", "minidrive", "map", "validate", str(tinytown_file)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0

    proc = subprocess.run(
        [sys.executable, "-m", "minidrive"], capture_output=True, text=True
    )
    assert proc.returncode == 2
    assert "usage" in proc.stderr


def test_config_file_and_env_var(tmp_path, monkeypatch):
    cfg = tmp_path / "sim.json"
    cfg.write_text(
        json.dumps(
            {
                "duration": 0.5,
                "headless_fast": True,
                "listen": "127.0.0.1:45992",
                "initial_pose": [1.05, 6.3, 1.5707963267948966],
            }
        )
    )
    monkeypatch.setenv("MINIDRIVE_CONFIG", str(cfg))
    assert sim_main(["run"]) == 0
