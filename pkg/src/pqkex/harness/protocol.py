"""Client and server state machines for the ephemeral key exchange.

    client                                server
    client_init  -- client_hello(ek) -->  server_respond
                 <-- server_hello(ct || mac_s) --
    client_complete
    client_finish -- finished(mac_c) -->  server_finish

transcript_hash = SHA3-256(client_hello || server_hello header || ct), i.e. the
server_hello without its MAC.  The client's ephemeral dk is released after
exactly one decapsulation.
"""
from __future__ import annotations

import hmac
import threading
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .. import keccak, kem
from ..errors import HandshakeFailure, MalformedInputError, ProtocolError
from .wire import MAC_LEN, HandshakeMessage, KemSpec, MsgType, decode, lookup

TRAFFIC_LABEL = b"pqkex traffic"
FINISHED_LABEL = b"pqkex finished"
CLIENT_FINISHED_LABEL = b"pqkex client finished"

_TOY_DH = kem.ToyDhKem()


@dataclass(frozen=True)
class SessionSecrets:
    shared_secret: bytes
    transcript_hash: bytes
    traffic_secret: bytes
    finished_mac: bytes


def derive_secrets(shared_secret: bytes, transcript_hash: bytes) -> SessionSecrets:
    traffic = keccak.shake256(TRAFFIC_LABEL + shared_secret + transcript_hash, 32)
    mac = keccak.shake256(FINISHED_LABEL + traffic + transcript_hash, 32)
    return SessionSecrets(shared_secret, transcript_hash, traffic, mac)


def client_finished_mac(secrets: SessionSecrets) -> bytes:
    return keccak.shake256(CLIENT_FINISHED_LABEL + secrets.traffic_secret + secrets.transcript_hash, 32)


def _transcript(client_hello: bytes, server_header: bytes, ct: bytes) -> bytes:
    return keccak.sha3_256(client_hello + server_header + ct)


# -- per-kem_id key operations ------------------------------------------------

class Suite:
    """Key operations for one kem_id: ML-KEM alone or ML-KEM + toy DH."""

    def __init__(self, spec: KemSpec, backend: str | None = None):
        self.spec = spec
        self.backend = backend
        self.pq = kem.MlKem(spec.transform, spec.params, backend)

    def keygen_batch(self, rng: kem.Rng) -> list[tuple[bytes, bytes]]:
        seeds = [(rng.random_bytes(32), rng.random_bytes(32)) for _ in range(keccak.BATCH_WIDTH)]
        pairs = kem.batch_keygen(self.spec.params, seeds, transform=self.spec.transform, backend=self.backend)
        return [self._with_dh((kp.ek, kp.dk), rng) for kp in pairs]

    def keygen(self, rng: kem.Rng) -> tuple[bytes, bytes]:
        return self._with_dh(self.pq.keygen(rng), rng)

    def _with_dh(self, pq: tuple[bytes, bytes], rng: kem.Rng) -> tuple[bytes, bytes]:
        if not self.spec.hybrid:
            return pq
        ek_b, dk_b = _TOY_DH.keygen(rng)
        return pq[0] + ek_b, pq[1] + dk_b

    def encaps(self, ek: bytes, rng: kem.Rng) -> tuple[bytes, bytes]:
        if not self.spec.hybrid:
            return self.pq.encaps(ek, rng)
        split = self.spec.params.ek_len
        return kem.hybrid_encaps(self.pq, _TOY_DH, ek[:split], ek[split:], rng)

    def decaps(self, dk: bytes, ct: bytes) -> Optional[bytes]:
        if not self.spec.hybrid:
            return self.pq.decaps(dk, ct)
        split = len(dk) - 2 * _TOY_DH.ELEM
        return kem.hybrid_decaps(self.pq, _TOY_DH, dk[:split], dk[split:], ct)


class KeyPool:
    """Ephemeral keypairs made eight at a time by ``batch_keygen``, handed out FIFO."""

    def __init__(self, suite: Suite, rng: kem.Rng | None = None):
        self.suite = suite
        self.rng = rng or kem.SystemRng()
        self.batch_calls = 0
        self._keys: deque[tuple[bytes, bytes]] = deque()
        self._lock = threading.Lock()

    def take(self) -> tuple[bytes, bytes]:
        with self._lock:
            if not self._keys:
                self._keys.extend(self.suite.keygen_batch(self.rng))
                self.batch_calls += 1
            return self._keys.popleft()

    def __len__(self) -> int:
        return len(self._keys)


# -- state machines -----------------------------------------------------------

@dataclass
class ClientState:
    kem_id: int
    client_hello: bytes
    dk: Optional[bytes]
    decaps_count: int = 0
    secrets: Optional[SessionSecrets] = None
    timings: dict = field(default_factory=dict)


@dataclass
class ServerSession:
    kem_id: int
    secrets: SessionSecrets
    done: bool = False


def _as_message(msg: HandshakeMessage | bytes, expect: int) -> tuple[HandshakeMessage, bytes]:
    if isinstance(msg, HandshakeMessage):
        raw = msg.encode()
    else:
        raw = bytes(msg)
    return decode(raw, expect), raw


def client_init(
    kem_id: int,
    rng: kem.Rng | None = None,
    pool: KeyPool | None = None,
    backend: str | None = None,
) -> tuple[HandshakeMessage, ClientState]:
    spec = lookup(kem_id)
    t0 = time.perf_counter()
    if pool is not None:
        if pool.suite.spec.kem_id != kem_id:
            raise ProtocolError("key pool belongs to a different kem_id")
        ek, dk = pool.take()
    else:
        ek, dk = Suite(spec, backend).keygen(rng or kem.SystemRng())
    hello = HandshakeMessage(MsgType.CLIENT_HELLO, kem_id, ek)
    state = ClientState(kem_id, hello.encode(), dk)
    state.timings["keygen"] = time.perf_counter() - t0
    return hello, state


def server_respond(
    msg: HandshakeMessage | bytes,
    rng: kem.Rng | None = None,
    backend: str | None = None,
    timings: dict | None = None,
) -> tuple[HandshakeMessage, ServerSession]:
    hello, raw = _as_message(msg, MsgType.CLIENT_HELLO)
    spec = lookup(hello.kem_id)
    t0 = time.perf_counter()
    try:
        ct, key = Suite(spec, backend).encaps(hello.body, rng or kem.SystemRng())
    except MalformedInputError as exc:
        raise ProtocolError(str(exc)) from None
    if timings is not None:
        timings["encaps"] = time.perf_counter() - t0
    header = HandshakeMessage(MsgType.SERVER_HELLO, hello.kem_id, bytes(len(ct) + MAC_LEN)).header
    secrets = derive_secrets(key, _transcript(raw, header, ct))
    reply = HandshakeMessage(MsgType.SERVER_HELLO, hello.kem_id, ct + secrets.finished_mac)
    return reply, ServerSession(hello.kem_id, secrets)


def client_complete(
    msg: HandshakeMessage | bytes,
    state: ClientState,
    backend: str | None = None,
) -> SessionSecrets:
    """Decapsulate (once), derive the secrets and check the server's MAC."""
    reply, raw = _as_message(msg, MsgType.SERVER_HELLO)
    if reply.kem_id != state.kem_id:
        raise ProtocolError(f"server answered with kem_id 0x{reply.kem_id:04x}, offered 0x{state.kem_id:04x}")
    if state.dk is None:
        raise ProtocolError("ephemeral key already consumed")
    spec = lookup(reply.kem_id)
    ct, mac = reply.body[:-MAC_LEN], reply.body[-MAC_LEN:]
    dk, state.dk = state.dk, None
    t0 = time.perf_counter()
    key = Suite(spec, backend).decaps(dk, ct)
    state.timings["decaps"] = time.perf_counter() - t0
    state.decaps_count += 1
    del dk
    if key is None:
        raise HandshakeFailure("key confirmation tag rejected")
    secrets = derive_secrets(key, _transcript(state.client_hello, raw[:8], ct))
    if not hmac.compare_digest(secrets.finished_mac, mac):
        raise HandshakeFailure("server finished MAC mismatch")
    state.secrets = secrets
    return secrets


def client_finish(state: ClientState) -> HandshakeMessage:
    if state.secrets is None:
        raise ProtocolError("handshake not complete")
    return HandshakeMessage(MsgType.FINISHED, state.kem_id, client_finished_mac(state.secrets))


def server_finish(msg: HandshakeMessage | bytes, session: ServerSession) -> SessionSecrets:
    fin, _ = _as_message(msg, MsgType.FINISHED)
    if session.done:
        raise ProtocolError("session already finished")
    if fin.kem_id != session.kem_id:
        raise ProtocolError("finished carries a different kem_id")
    if not hmac.compare_digest(fin.body, client_finished_mac(session.secrets)):
        raise HandshakeFailure("client finished MAC mismatch")
    session.done = True
    return session.secrets
