"""Ephemeral key-exchange handshake over ML-KEM, with a throughput benchmark."""
from .bench import BenchConfig, BenchReport, BenchRow, bench_run
from .protocol import (
    ClientState,
    KeyPool,
    ServerSession,
    SessionSecrets,
    Suite,
    client_complete,
    client_finish,
    client_init,
    derive_secrets,
    server_finish,
    server_respond,
)
from .transport import HandshakeResult, HandshakeServer, handshake_in_memory, handshake_tcp
from .wire import REGISTRY, HandshakeMessage, KemSpec, MsgType, decode, kem_id_for, lookup

__all__ = [
    "BenchConfig",
    "BenchReport",
    "BenchRow",
    "bench_run",
    "ClientState",
    "KeyPool",
    "ServerSession",
    "SessionSecrets",
    "Suite",
    "client_complete",
    "client_finish",
    "client_init",
    "derive_secrets",
    "server_finish",
    "server_respond",
    "HandshakeResult",
    "HandshakeServer",
    "handshake_in_memory",
    "handshake_tcp",
    "REGISTRY",
    "HandshakeMessage",
    "KemSpec",
    "MsgType",
    "decode",
    "kem_id_for",
    "lookup",
]
