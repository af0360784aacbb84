import hashlib
import socket
import struct

import pytest

from pqkex import kem
from pqkex.errors import HandshakeFailure, ProtocolError
from pqkex.harness import (
    REGISTRY,
    BenchConfig,
    HandshakeMessage,
    HandshakeServer,
    KeyPool,
    MsgType,
    Suite,
    bench_run,
    client_complete,
    client_init,
    decode,
    derive_secrets,
    handshake_in_memory,
    handshake_tcp,
    kem_id_for,
    lookup,
    server_respond,
)
from pqkex.harness.wire import HEADER_LEN, MAC_LEN

TCP_HANDSHAKES = 1000
KEM_512_FO = kem_id_for("ML-KEM-512", "FO")


def test_registry():
    assert len(REGISTRY) == 18
    assert kem_id_for("ML-KEM-768", "FO") == 0x0110
    assert kem_id_for("ML-KEM-1024", "TRH", hybrid=True) == 0x0222
    spec = lookup(0x0101)
    assert (spec.params.name, spec.transform, spec.hybrid) == ("ML-KEM-512", "TCH", False)
    assert spec.ct_len == 800 and spec.ek_len == 800
    assert lookup(0x0200).ek_len == 800 + kem.ToyDhKem.ELEM
    with pytest.raises(ProtocolError):
        lookup(0x0333)


def test_wire_round_trip():
    msg = HandshakeMessage(MsgType.FINISHED, 0x0112, bytes(range(32)))
    raw = msg.encode()
    assert raw[:HEADER_LEN] == struct.pack(">BBHI", 1, 3, 0x0112, 32)
    assert decode(raw) == msg
    with pytest.raises(ProtocolError):
        decode(raw, expect=MsgType.CLIENT_HELLO)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda raw: b"\x02" + raw[1:],
        lambda raw: raw[:1] + b"\x09" + raw[2:],
        lambda raw: raw[:2] + b"\x07\x77" + raw[4:],
        lambda raw: raw[:4] + struct.pack(">I", 31) + raw[8:],
        lambda raw: raw[:-1],
        lambda raw: raw + b"\x00",
    ],
    ids=["version", "type", "kem_id", "length-field", "short-body", "long-body"],
)
def test_malformed_messages(mutate):
    raw = HandshakeMessage(MsgType.FINISHED, KEM_512_FO, bytes(32)).encode()
    with pytest.raises(ProtocolError):
        decode(mutate(raw))


def test_client_hello_length_tamper():
    hello, _ = client_init(KEM_512_FO, kem.CounterRng(b"len"))
    raw = hello.encode()
    assert len(hello.body) == lookup(KEM_512_FO).ek_len
    bad = raw[:4] + struct.pack(">I", len(hello.body) - 1) + raw[8:-1]
    with pytest.raises(ProtocolError):
        server_respond(bad)


def test_two_inits_distinct():
    a, _ = client_init(KEM_512_FO)
    b, _ = client_init(KEM_512_FO)
    assert a.body != b.body


def test_server_secrets_deterministic():
    hello, _ = client_init(KEM_512_FO, kem.CounterRng(b"det"))
    r1, s1 = server_respond(hello, kem.CounterRng(b"coins"))
    r2, s2 = server_respond(hello, kem.CounterRng(b"coins"))
    assert r1 == r2 and s1 == s2
    assert len(r1.body) == lookup(KEM_512_FO).ct_len + MAC_LEN


def test_secret_derivation_labels():
    k, th = b"\x01" * 32, b"\x02" * 32
    s = derive_secrets(k, th)
    assert s.traffic_secret == hashlib.shake_256(b"pqkex traffic" + k + th).digest(32)
    assert s.finished_mac == hashlib.shake_256(b"pqkex finished" + s.traffic_secret + th).digest(32)


def test_transcript_hash():
    rng = kem.CounterRng(b"th")
    res = handshake_in_memory(KEM_512_FO, rng, rng)
    assert res.client.transcript_hash == res.server.transcript_hash
    assert len(res.client.transcript_hash) == 32


def test_flipped_mac_fails():
    hello, state = client_init(KEM_512_FO)
    reply, _ = server_respond(hello)
    raw = bytearray(reply.encode())
    raw[-1] ^= 1
    with pytest.raises(HandshakeFailure):
        client_complete(bytes(raw), state)
    assert state.dk is None and state.decaps_count == 1


@pytest.mark.parametrize("transform", ["FO", "TRH"])
def test_flipped_ct_fails(transform):
    kem_id = kem_id_for("ML-KEM-768", transform)
    hello, state = client_init(kem_id)
    reply, _ = server_respond(hello)
    raw = bytearray(reply.encode())
    raw[HEADER_LEN + 10] ^= 4
    with pytest.raises(HandshakeFailure):
        client_complete(bytes(raw), state)


def test_pool_refills_eight_at_a_time():
    kem_id = kem_id_for("ML-KEM-512", "TRH", hybrid=True)
    pool = KeyPool(Suite(lookup(kem_id)), kem.CounterRng(b"pool"))
    eks = [client_init(kem_id, pool=pool)[0].body for _ in range(8)]
    assert pool.batch_calls == 1 and len(pool) == 0
    assert len(set(eks)) == 8
    client_init(kem_id, pool=pool)
    assert pool.batch_calls == 2 and len(pool) == 7
    with pytest.raises(ProtocolError):
        client_init(KEM_512_FO, pool=pool)


def test_pool_fifo_matches_batch():
    kem_id = kem_id_for("ML-KEM-512", "FO")
    suite = Suite(lookup(kem_id))
    want = suite.keygen_batch(kem.CounterRng(b"fifo"))
    pool = KeyPool(suite, kem.CounterRng(b"fifo"))
    assert [pool.take() for _ in range(8)] == want


@pytest.mark.parametrize("kem_id", sorted(REGISTRY), ids=lambda k: f"0x{k:04x}")
def test_tcp_agreement(kem_id):
    rng = kem.CounterRng(b"tcp" + kem_id.to_bytes(2, "big"))
    pool = KeyPool(Suite(lookup(kem_id)), rng)
    with HandshakeServer(rng=kem.CounterRng(b"tcp server")) as server:
        server.keep_secrets = True
        client = [handshake_tcp(server.address, kem_id, rng, pool).client for _ in range(TCP_HANDSHAKES)]
    assert server.completed == TCP_HANDSHAKES and not server.failures
    assert client == server.secrets
    assert len({s.traffic_secret for s in client}) == TCP_HANDSHAKES


def test_tcp_malformed_closes_connection():
    with HandshakeServer() as server:
        with socket.create_connection(server.address, timeout=5) as sock:
            sock.sendall(HandshakeMessage(MsgType.CLIENT_HELLO, KEM_512_FO, bytes(5)).encode())
            assert sock.recv(1) == b""
        with pytest.raises(HandshakeFailure):
            handshake_tcp(server.address, KEM_512_FO, tamper=lambda d, b: b[:-1] + bytes([b[-1] ^ 1]) if d == "server_hello" else b)
    assert len(server.failures) == 2


def test_connect_error_names_address():
    with HandshakeServer() as server:
        address = server.address
    with pytest.raises(OSError, match=f"{address[0]}:{address[1]}"):
        handshake_tcp(address, KEM_512_FO, timeout=1)


def test_bind_error_names_address():
    with HandshakeServer() as server:
        with pytest.raises(OSError, match=str(server.address[1])):
            HandshakeServer(server.address)


@pytest.mark.parametrize("transport", ["in-memory", "tcp"])
def test_bench_counts(transport):
    cfg = BenchConfig(kem_ids=[KEM_512_FO], duration_s=0.2, runs=3, transport=transport, batch_pool=True, warmup=1)
    report = bench_run(cfg)
    row = report.row(KEM_512_FO)
    assert len(row.handshakes) == 3 and all(n > 0 for n in row.handshakes)
    assert row.p50_us <= row.p99_us
    assert set(row.phases_us) == {"keygen", "encaps", "decaps", "transport"}
    assert len(report.records()) == 1 and "conn/s" in report.table()


def test_bench_config_validation():
    with pytest.raises(ValueError):
        BenchConfig(kem_ids=[KEM_512_FO], transport="udp")
    with pytest.raises(ValueError):
        BenchConfig(kem_ids=[KEM_512_FO], runs=0)
    with pytest.raises(ProtocolError):
        BenchConfig(kem_ids=[0x0999])
