"""In-memory and TCP transports driving the handshake state machines."""
from __future__ import annotations

import socket
import socketserver
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .. import kem
from ..errors import PqkexError, ProtocolError
from . import protocol
from .wire import HEADER_LEN, parse_header

# tamper(direction, wire_bytes) -> wire_bytes; direction is the message name
Tamper = Callable[[str, bytes], bytes]


@dataclass
class HandshakeResult:
    client: protocol.SessionSecrets
    server: Optional[protocol.SessionSecrets]  # None over TCP; see HandshakeServer.secrets
    timings: dict = field(default_factory=dict)
    state: Optional[protocol.ClientState] = None


def _pass(_direction: str, data: bytes) -> bytes:
    return data


def handshake_in_memory(
    kem_id: int,
    rng: kem.Rng | None = None,
    server_rng: kem.Rng | None = None,
    pool: protocol.KeyPool | None = None,
    backend: str | None = None,
    tamper: Tamper | None = None,
) -> HandshakeResult:
    """One full handshake with every message passed as encoded bytes."""
    tamper = tamper or _pass
    t0 = time.perf_counter()
    hello, state = protocol.client_init(kem_id, rng, pool, backend)
    timings: dict = {}
    reply, session = protocol.server_respond(tamper("client_hello", hello.encode()), server_rng, backend, timings)
    client = protocol.client_complete(tamper("server_hello", reply.encode()), state, backend)
    fin = protocol.client_finish(state)
    server = protocol.server_finish(tamper("finished", fin.encode()), session)
    timings.update(state.timings)
    timings["total"] = time.perf_counter() - t0
    return HandshakeResult(client, server, timings, state)


# -- TCP ----------------------------------------------------------------------

def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ProtocolError(f"connection closed after {len(buf)} of {n} bytes")
        buf += chunk
    return bytes(buf)


def recv_message(sock: socket.socket) -> bytes:
    """Read one framed message; the header is validated before the body is read."""
    header = _recv_exact(sock, HEADER_LEN)
    _, _, _, body_len = parse_header(header)
    return header + _recv_exact(sock, body_len)


class _Handler(socketserver.BaseRequestHandler):
    server: "HandshakeServer"

    def handle(self) -> None:
        sock = self.request
        timings: dict = {}
        try:
            hello = recv_message(sock)
            reply, session = protocol.server_respond(hello, self.server.rng, self.server.backend, timings)
            sock.sendall(reply.encode())
            protocol.server_finish(recv_message(sock), session)
        except (PqkexError, OSError) as exc:
            self.server.record_failure(exc)
            return
        self.server.record_success(session.secrets, timings)


class HandshakeServer(socketserver.ThreadingTCPServer):
    """Accepts one handshake per connection and closes after the finished message."""

    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address: tuple[str, int] = ("127.0.0.1", 0), backend: str | None = None, rng: kem.Rng | None = None):
        try:
            super().__init__(address, _Handler)
        except OSError as exc:
            raise OSError(exc.errno, f"cannot bind {address[0]}:{address[1]}: {exc.strerror}") from None
        self.backend = backend
        self.rng = rng or kem.SystemRng()
        self.completed = 0
        self.failures: list[Exception] = []
        self.secrets: list[protocol.SessionSecrets] = []
        self.keep_secrets = False
        self.encaps_time = 0.0
        self._lock = threading.Lock()
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self.server_address[:2]

    def record_success(self, secrets: protocol.SessionSecrets, timings: dict) -> None:
        with self._lock:
            self.completed += 1
            self.encaps_time += timings.get("encaps", 0.0)
            if self.keep_secrets:
                self.secrets.append(secrets)

    def record_failure(self, exc: Exception) -> None:
        with self._lock:
            self.failures.append(exc)

    def start(self) -> "HandshakeServer":
        self._thread = threading.Thread(target=self.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join()

    def __enter__(self) -> "HandshakeServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def handshake_tcp(
    address: tuple[str, int],
    kem_id: int,
    rng: kem.Rng | None = None,
    pool: protocol.KeyPool | None = None,
    backend: str | None = None,
    timeout: float = 10.0,
    tamper: Tamper | None = None,
) -> HandshakeResult:
    """Client side of one TCP handshake."""
    tamper = tamper or _pass
    t0 = time.perf_counter()
    hello, state = protocol.client_init(kem_id, rng, pool, backend)
    try:
        sock = socket.create_connection(address, timeout=timeout)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot connect to {address[0]}:{address[1]}: {exc.strerror or exc}") from None
    with sock:
        sock.sendall(tamper("client_hello", hello.encode()))
        reply = tamper("server_hello", recv_message(sock))
        secrets = protocol.client_complete(reply, state, backend)
        sock.sendall(tamper("finished", protocol.client_finish(state).encode()))
        try:
            sock.shutdown(socket.SHUT_WR)
            sock.recv(1)  # wait for the server to close
        except OSError:
            pass
    timings = dict(state.timings)
    timings["total"] = time.perf_counter() - t0
    return HandshakeResult(secrets, None, timings, state)


__all__ = [
    "HandshakeResult",
    "HandshakeServer",
    "handshake_in_memory",
    "handshake_tcp",
    "recv_message",
]
