"""Session-hosting service for UI clients.

Speaks newline-delimited JSON over a plain TCP connection: the server
greets with ``{"type": "hello", "version": 1}``, then answers every
client message with one or more server messages.  One session per
connection; the session dies with the connection.

For browsers (which cannot open raw TCP sockets) the same message
protocol is also exposed over a minimal WebSocket endpoint on a
companion HTTP listener, which additionally serves the static UI and a
``POST /crack`` endpoint for the challenge view.
"""

from __future__ import annotations

import base64
import hashlib
import json
import socket
import socketserver
import struct
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Any

from .cracker import crack_transcript
from .errors import InvalidConfigError, PinEntryError, TranscriptParseError
from .policies import PolicyKind
from .session import (
    Mode,
    PinSession,
    SessionConfig,
    SessionStatus,
    current_view,
    export_transcript,
    import_transcript,
    reset_phase,
    session_click,
    start_session,
)

PROTOCOL_VERSION = 1


def hello_message() -> dict[str, Any]:
    return {"type": "hello", "version": PROTOCOL_VERSION}


def _error(code: str, text: str) -> dict[str, Any]:
    return {"type": "error", "code": code, "text": text}


def _state_message(session: PinSession) -> dict[str, Any]:
    return {"type": "state", **current_view(session).to_dict()}


@dataclass
class SessionSlot:
    """One connection's session plus the server-side config defaults."""

    defaults: SessionConfig
    click_cap: int = 200
    session: PinSession | None = None
    extra: dict[str, Any] = field(default_factory=dict)


_CONFIGURE_FIELDS = {
    "mode",
    "n_buttons",
    "pin_length",
    "seed",
    "policy",
    "carryover",
}


def _plain_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _configure(slot: SessionSlot, msg: dict[str, Any]) -> list[dict[str, Any]]:
    unknown = sorted(set(msg) - _CONFIGURE_FIELDS - {"type"})
    if unknown:
        return [_error("bad-config", f"unknown field {unknown[0]!r}")]
    for key in ("mode", "policy"):
        if key in msg and not isinstance(msg[key], str):
            return [_error("bad-config", f"{key} must be a string")]
    for key in ("n_buttons", "pin_length", "seed"):
        if key in msg and not _plain_int(msg[key]):
            return [_error("bad-config", f"{key} must be an integer")]
    if "carryover" in msg and not isinstance(msg["carryover"], bool):
        return [_error("bad-config", "carryover must be a boolean")]
    d = slot.defaults
    try:
        mode = Mode.from_name(msg["mode"]) if "mode" in msg else d.mode
        policy = PolicyKind.from_name(msg["policy"]) if "policy" in msg else d.policy
        config = SessionConfig(
            mode=mode,
            n_buttons=msg.get("n_buttons", 2 if mode is Mode.CLASSIC else d.n_buttons),
            pin_length=msg.get("pin_length", d.pin_length),
            policy=policy,
            seed=msg.get("seed", d.seed),
            carryover=msg.get("carryover", d.carryover),
            click_cap=slot.click_cap,
        )
    except InvalidConfigError as exc:
        return [_error("bad-config", str(exc))]
    slot.session = start_session(config)
    return [_state_message(slot.session)]


def _click(slot: SessionSlot, msg: dict[str, Any]) -> list[dict[str, Any]]:
    if slot.session is None:
        return [_error("not-configured", "send configure before click")]
    session = slot.session
    if session.status is SessionStatus.COMPLETE:
        return [_error("finished", "session is complete; configure a new one")]
    if session.status is not SessionStatus.IN_PROGRESS:
        return [
            _error(
                "not-active",
                f"session is {session.status.value}; send reset to continue",
            )
        ]
    button = msg.get("button")
    if (
        isinstance(button, bool)
        or not isinstance(button, int)
        or not 0 <= button < session.config.n_buttons
    ):
        return [_error("bad-button", f"button must be in 0..{session.config.n_buttons - 1}")]
    before = len(session.committed_digits)
    session = session_click(session, button)
    slot.session = session
    out = [_state_message(session)]
    if len(session.committed_digits) > before:
        out.append({"type": "committed", "index": len(session.committed_digits) - 1})
    if session.status is SessionStatus.COMPLETE:
        out.append(
            {
                "type": "complete",
                "pin": "".join(str(d) for d in session.committed_digits),
                "mapping": [
                    c.symbol if c is not None else None
                    for c in session.learned_mapping.colors
                ],
            }
        )
    return out


def _reset(slot: SessionSlot) -> list[dict[str, Any]]:
    if slot.session is None:
        return [_error("not-configured", "send configure before reset")]
    if slot.session.status is SessionStatus.COMPLETE:
        return [_error("finished", "session is complete; configure a new one")]
    slot.session = reset_phase(slot.session)
    return [_state_message(slot.session)]


def _export(slot: SessionSlot) -> list[dict[str, Any]]:
    if slot.session is None:
        return [_error("not-configured", "send configure before export")]
    return [
        {
            "type": "transcript",
            "document": export_transcript(slot.session).to_json_obj(),
        }
    ]


def handle_message(slot: SessionSlot, msg: dict[str, Any]) -> list[dict[str, Any]]:
    """Process one client message; always returns at least one reply."""
    if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
        return [_error("bad-message", "expected an object with a 'type' field")]
    kind = msg["type"]
    if kind == "configure":
        return _configure(slot, msg)
    if kind == "click":
        return _click(slot, msg)
    if kind == "reset":
        return _reset(slot)
    if kind == "export":
        return _export(slot)
    return [_error("bad-message", f"unknown message type {kind!r}")]


def handle_line(slot: SessionSlot, line: str) -> list[dict[str, Any]]:
    """Parse one NDJSON line and dispatch it."""
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        return [_error("bad-message", f"invalid JSON: {exc.msg}")]
    return handle_message(slot, msg)


# ---------------------------------------------------------------------------
# NDJSON TCP transport


class ProtocolServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address: tuple[str, int], defaults: SessionConfig, click_cap: int):
        self.session_defaults = defaults
        self.session_click_cap = click_cap
        super().__init__(address, _ProtocolHandler)


class _ProtocolHandler(socketserver.StreamRequestHandler):
    def handle(self) -> None:
        server: ProtocolServer = self.server  # type: ignore[assignment]
        slot = SessionSlot(server.session_defaults, server.session_click_cap)
        self._send(hello_message())
        while True:
            raw = self.rfile.readline()
            if not raw:
                return
            line = raw.decode("utf-8", errors="replace").strip()
            if not line:
                continue
            for reply in handle_line(slot, line):
                self._send(reply)

    def _send(self, msg: dict[str, Any]) -> None:
        self.wfile.write((json.dumps(msg) + "\n").encode("utf-8"))
        self.wfile.flush()


# ---------------------------------------------------------------------------
# WebSocket + static file companion (for the browser UI)

_WS_MAGIC = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".map": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


def _ws_accept_key(key: str) -> str:
    digest = hashlib.sha1((key + _WS_MAGIC).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def _ws_read_frame(reader) -> tuple[int, bytes] | None:
    """Read one frame off a buffered file object.

    Reading through the handler's ``rfile`` (not the raw socket) keeps
    any bytes the HTTP parser read ahead.  Returns (opcode, payload) or
    None on EOF.
    """
    header = _read_exact(reader, 2)
    if header is None:
        return None
    opcode = header[0] & 0x0F
    masked = header[1] & 0x80
    length = header[1] & 0x7F
    if length == 126:
        ext = _read_exact(reader, 2)
        if ext is None:
            return None
        length = struct.unpack(">H", ext)[0]
    elif length == 127:
        ext = _read_exact(reader, 8)
        if ext is None:
            return None
        length = struct.unpack(">Q", ext)[0]
    mask = b"\x00\x00\x00\x00"
    if masked:
        mask_read = _read_exact(reader, 4)
        if mask_read is None:
            return None
        mask = mask_read
    payload = _read_exact(reader, length) if length else b""
    if payload is None:
        return None
    if masked:
        payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
    return opcode, payload


def _read_exact(reader, n: int) -> bytes | None:
    buf = b""
    while len(buf) < n:
        chunk = reader.read(n - len(buf))
        if not chunk:
            return None
        buf += chunk
    return buf


def _ws_send_frame(sock: socket.socket, opcode: int, payload: bytes) -> None:
    header = bytes([0x80 | opcode])
    n = len(payload)
    if n < 126:
        header += bytes([n])
    elif n < 1 << 16:
        header += bytes([126]) + struct.pack(">H", n)
    else:
        header += bytes([127]) + struct.pack(">Q", n)
    sock.sendall(header + payload)


class UiHttpServer(ThreadingHTTPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(
        self,
        address: tuple[str, int],
        defaults: SessionConfig,
        click_cap: int,
        ui_dir: Path | None,
    ):
        self.session_defaults = defaults
        self.session_click_cap = click_cap
        self.ui_dir = ui_dir
        super().__init__(address, _UiHandler)


class _UiHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt: str, *args: Any) -> None:  # quiet by default
        pass

    def do_GET(self) -> None:
        if self.path == "/ws" and "websocket" in self.headers.get("Upgrade", "").lower():
            self._websocket()
            return
        self._static()

    def do_POST(self) -> None:
        if self.path != "/crack":
            self._respond(404, {"error": "not found"})
            return
        length = int(self.headers.get("Content-Length", "0"))
        body = self.rfile.read(length)
        try:
            transcript = import_transcript(body)
            report = crack_transcript(transcript)
        except TranscriptParseError as exc:
            self._respond(400, {"error": str(exc), "field": exc.field})
            return
        except PinEntryError as exc:
            self._respond(400, {"error": str(exc)})
            return
        self._respond(200, report.to_json_obj())

    def _respond(self, status: int, obj: dict[str, Any]) -> None:
        payload = (json.dumps(obj) + "\n").encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _static(self) -> None:
        server: UiHttpServer = self.server  # type: ignore[assignment]
        if server.ui_dir is None:
            self._respond(404, {"error": "no UI directory configured; use --ui-dir"})
            return
        rel = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (server.ui_dir / rel).resolve()
        try:
            target.relative_to(server.ui_dir.resolve())
        except ValueError:
            self._respond(404, {"error": "not found"})
            return
        if not target.is_file():
            self._respond(404, {"error": "not found"})
            return
        payload = target.read_bytes()
        self.send_response(200)
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _websocket(self) -> None:
        key = self.headers.get("Sec-WebSocket-Key")
        if not key:
            self._respond(400, {"error": "missing Sec-WebSocket-Key"})
            return
        self.send_response(101, "Switching Protocols")
        self.send_header("Upgrade", "websocket")
        self.send_header("Connection", "Upgrade")
        self.send_header("Sec-WebSocket-Accept", _ws_accept_key(key))
        self.end_headers()
        self.close_connection = True

        sock = self.connection
        server: UiHttpServer = self.server  # type: ignore[assignment]
        slot = SessionSlot(server.session_defaults, server.session_click_cap)

        def send(msg: dict[str, Any]) -> None:
            _ws_send_frame(sock, 0x1, json.dumps(msg).encode("utf-8"))

        send(hello_message())
        while True:
            frame = _ws_read_frame(self.rfile)
            if frame is None:
                return
            opcode, payload = frame
            if opcode == 0x8:  # close
                _ws_send_frame(sock, 0x8, b"")
                return
            if opcode == 0x9:  # ping
                _ws_send_frame(sock, 0xA, payload)
                continue
            if opcode != 0x1:
                continue
            text = payload.decode("utf-8", errors="replace").strip()
            if not text:
                continue
            for reply in handle_line(slot, text):
                send(reply)
