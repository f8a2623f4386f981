from __future__ import annotations

import json
import os
import socket
import struct
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

import pytest

from iftt_pin.cli import main
from iftt_pin.rng import SplitMix64
from iftt_pin.session import Mode, SessionConfig, SessionStatus, export_transcript
from iftt_pin.simulation import SimulatedUser, drive_session, random_valid_mapping

from conftest import figure_transcript_json

PKG_ROOT = Path(__file__).resolve().parent.parent


def run_cli(*args: str, stdin: str = "") -> subprocess.CompletedProcess:
    env = dict(os.environ)
    env.setdefault("PYTHONPATH", str(PKG_ROOT / "src"))
    return subprocess.run(
        [sys.executable, "-m", "iftt_pin.cli", *args],
        input=stdin,
        capture_output=True,
        text=True,
        timeout=120,
        env=env,
    )


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


# --- usage errors -----------------------------------------------------------


def test_no_subcommand_is_usage_error():
    result = run_cli()
    assert result.returncode == 2


def test_demo_rejects_single_button():
    result = run_cli("demo", "--buttons", "1")
    assert result.returncode == 2
    assert "--buttons" in result.stderr


def test_classic_with_nine_buttons_is_usage_error():
    result = run_cli("simulate", "--mode", "classic", "--buttons", "9", "--trials", "5")
    assert result.returncode == 2


def test_simulate_rejects_zero_trials():
    result = run_cli("simulate", "--trials", "0")
    assert result.returncode == 2


def test_unknown_flag_is_usage_error():
    result = run_cli("simulate", "--frobnicate")
    assert result.returncode == 2


# --- simulate ----------------------------------------------------------------


def test_simulate_classic_bisect_histogram():
    result = run_cli(
        "simulate", "--mode", "classic", "--policy", "bisect",
        "--trials", "200", "--seed", "6",
    )
    assert result.returncode == 0
    lines = result.stdout.splitlines()
    assert lines[0] == "trial,digit,identified,clicks,capped"
    assert len(lines) == 201
    clicks = {int(line.split(",")[3]) for line in lines[1:]}
    assert clicks == {3, 4}
    assert "success_rate=1.0000" in result.stderr
    assert "wrong_digit_rate=0.0000" in result.stderr


def test_simulate_is_byte_identical_across_runs():
    args = ("simulate", "--trials", "300", "--seed", "1", "--reuse-bias", "0.5")
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout
    assert first.stdout.endswith("\n")


def test_simulate_env_seed_default():
    env_run_a = run_cli_with_env_seed("31")
    env_run_b = run_cli_with_env_seed("31")
    env_run_c = run_cli_with_env_seed("32")
    assert env_run_a.stdout == env_run_b.stdout
    assert env_run_a.stdout != env_run_c.stdout


def run_cli_with_env_seed(seed: str) -> subprocess.CompletedProcess:
    env = dict(os.environ)
    env.setdefault("PYTHONPATH", str(PKG_ROOT / "src"))
    env["IFTT_PIN_SEED"] = seed
    return subprocess.run(
        [sys.executable, "-m", "iftt_pin.cli", "simulate", "--trials", "50"],
        capture_output=True, text=True, timeout=120, env=env,
    )


def test_simulate_out_file(tmp_path):
    out = tmp_path / "runs.csv"
    result = run_cli(
        "simulate", "--trials", "20", "--seed", "2", "--out", str(out)
    )
    assert result.returncode == 0
    text = out.read_text()
    assert text.startswith("trial,digit,identified,clicks,capped\n")
    assert "success_rate" in result.stdout  # summary goes to stdout with --out


# --- crack -------------------------------------------------------------------


def write_complete_transcript(path: Path, seed: int = 30) -> str:
    config = SessionConfig(mode=Mode.SELFCAL, n_buttons=9, pin_length=2, seed=seed)
    rng = SplitMix64(seed)
    user = SimulatedUser(rng.below(10), random_valid_mapping(9, rng))
    session = drive_session(config, user, rng)
    assert session.status is SessionStatus.COMPLETE
    path.write_text(export_transcript(session).to_json())
    return "".join(str(d) for d in session.committed_digits)


def test_crack_unique_exits_zero(tmp_path):
    path = tmp_path / "session.json"
    pin = write_complete_transcript(path)
    result = run_cli("crack", str(path))
    assert result.returncode == 0
    report = json.loads(result.stdout)
    assert report["unique"] is True
    assert report["pin_candidates"] == [pin]


def test_crack_ambiguous_exits_three(tmp_path):
    path = tmp_path / "short.json"
    doc = json.loads(figure_transcript_json())
    doc["phases"][0]["clicks"] = doc["phases"][0]["clicks"][:1]
    doc["phases"][0]["committed"] = None
    path.write_text(json.dumps(doc))
    result = run_cli("crack", str(path))
    assert result.returncode == 3
    report = json.loads(result.stdout)
    assert report["unique"] is False


def test_crack_corrupt_file_exits_four(tmp_path):
    path = tmp_path / "corrupt.json"
    path.write_text("{definitely not json")
    result = run_cli("crack", str(path))
    assert result.returncode == 4
    assert "parse error" in result.stderr


def test_crack_missing_field_names_it(tmp_path):
    path = tmp_path / "truncated.json"
    doc = json.loads(figure_transcript_json())
    del doc["phases"]
    path.write_text(json.dumps(doc))
    result = run_cli("crack", str(path))
    assert result.returncode == 4
    assert "phases" in result.stderr


def test_crack_unreadable_file_exits_four(tmp_path):
    result = run_cli("crack", str(tmp_path / "nope.json"))
    assert result.returncode == 4


# --- demo --------------------------------------------------------------------


def test_demo_classic_scripted_round():
    # scripted classic entry: answer with the digit's color until committed
    result = run_cli(
        "demo", "--mode", "classic", "--pin-length", "1", "--seed", "5",
        "--no-color",
        stdin="1\n2\n1\n2\n1\n1\n2\n1\n2\n1\n2\n1\nq\n",
    )
    assert result.returncode == 0
    assert "buttons [1:Y] [2:G]" in result.stdout
    assert "PIN:" in result.stdout or "status" in result.stdout


def test_demo_selfcal_reproducible_grid():
    a = run_cli("demo", "--seed", "7", "--no-color", stdin="q\n")
    b = run_cli("demo", "--seed", "7", "--no-color", stdin="q\n")
    assert a.stdout == b.stdout
    assert a.returncode == 0


def test_demo_dashboard_toggle():
    result = run_cli(
        "demo", "--seed", "7", "--no-color", stdin="d\n1\nq\n"
    )
    assert result.returncode == 0
    assert "dashboard" in result.stdout


# --- serve -------------------------------------------------------------------


def wait_for_port(port: int, timeout: float = 10.0) -> None:
    deadline = time.time() + timeout
    while time.time() < deadline:
        try:
            with socket.create_connection(("127.0.0.1", port), timeout=0.5):
                return
        except OSError:
            time.sleep(0.05)
    raise TimeoutError(f"port {port} never opened")


@pytest.fixture()
def served():
    port = free_port()
    http_port = free_port()
    env = dict(os.environ)
    env.setdefault("PYTHONPATH", str(PKG_ROOT / "src"))
    proc = subprocess.Popen(
        [
            sys.executable, "-m", "iftt_pin.cli", "serve",
            "--port", str(port), "--http-port", str(http_port),
            "--seed", "7",
        ],
        stdout=subprocess.PIPE, stderr=subprocess.PIPE, env=env,
    )
    try:
        wait_for_port(port)
        wait_for_port(http_port)
        yield port, http_port
    finally:
        proc.terminate()
        proc.wait(timeout=10)


def test_serve_ndjson_protocol(served):
    port, _ = served
    with socket.create_connection(("127.0.0.1", port), timeout=5) as sock:
        file = sock.makefile("rw", encoding="utf-8", newline="\n")
        hello = json.loads(file.readline())
        assert hello == {"type": "hello", "version": 1}
        file.write(json.dumps({"type": "configure", "pin_length": 1}) + "\n")
        file.flush()
        state = json.loads(file.readline())
        assert state["type"] == "state"
        assert state["pin"]["length"] == 1


def test_serve_port_busy_exits_five(served):
    port, _ = served
    result = run_cli("serve", "--port", str(port), "--no-http")
    assert result.returncode == 5
    assert "cannot bind" in result.stderr


def test_serve_http_crack_endpoint(served, tmp_path):
    _, http_port = served
    path = tmp_path / "t.json"
    pin = write_complete_transcript(path, seed=61)
    body = path.read_bytes()
    req = urllib.request.Request(
        f"http://127.0.0.1:{http_port}/crack", data=body, method="POST"
    )
    with urllib.request.urlopen(req, timeout=5) as resp:
        report = json.loads(resp.read())
    assert report["unique"] is True
    assert report["pin_candidates"] == [pin]


def test_serve_http_crack_rejects_garbage(served):
    _, http_port = served
    req = urllib.request.Request(
        f"http://127.0.0.1:{http_port}/crack", data=b"{bad", method="POST"
    )
    with pytest.raises(urllib.error.HTTPError) as err:
        urllib.request.urlopen(req, timeout=5)
    assert err.value.code == 400


class WsTestClient:
    """Just enough of a WebSocket client to talk to the bridge."""

    def __init__(self, port: int):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=5)
        self.buffer = b""
        request = (
            "GET /ws HTTP/1.1\r\n"
            f"Host: 127.0.0.1:{port}\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            "Sec-WebSocket-Key: dGhlIHNhbXBsZSBub25jZQ==\r\n"
            "Sec-WebSocket-Version: 13\r\n"
            "\r\n"
        )
        self.sock.sendall(request.encode())
        while b"\r\n\r\n" not in self.buffer:
            self.buffer += self.sock.recv(4096)
        head, _, self.buffer = self.buffer.partition(b"\r\n\r\n")
        assert b"101" in head.split(b"\r\n", 1)[0]

    def _exact(self, n: int) -> bytes:
        while len(self.buffer) < n:
            chunk = self.sock.recv(4096)
            if not chunk:
                raise ConnectionError("eof")
            self.buffer += chunk
        out, self.buffer = self.buffer[:n], self.buffer[n:]
        return out

    def send_text(self, text: str) -> None:
        payload = text.encode()
        mask = b"\x12\x34\x56\x78"
        masked = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        header = bytes([0x81])
        n = len(payload)
        if n < 126:
            header += bytes([0x80 | n])
        else:
            header += bytes([0x80 | 126]) + struct.pack(">H", n)
        self.sock.sendall(header + mask + masked)

    def read_text(self) -> str:
        header = self._exact(2)
        length = header[1] & 0x7F
        if length == 126:
            length = struct.unpack(">H", self._exact(2))[0]
        elif length == 127:
            length = struct.unpack(">Q", self._exact(8))[0]
        return self._exact(length).decode()

    def close(self) -> None:
        self.sock.close()


def test_serve_websocket_speaks_the_protocol(served):
    _, http_port = served
    client = WsTestClient(http_port)
    try:
        hello = json.loads(client.read_text())
        assert hello == {"type": "hello", "version": 1}
        client.send_text(json.dumps({"type": "configure", "pin_length": 2}))
        state = json.loads(client.read_text())
        assert state["type"] == "state"
        client.send_text(json.dumps({"type": "click", "button": 3}))
        state = json.loads(client.read_text())
        assert state["type"] == "state"
        assert any(row["dots"][3] for row in state["dashboard"])
    finally:
        client.close()
