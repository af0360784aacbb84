import hashlib

import pytest

from pqkex import kem
from pqkex.errors import InvalidParameterError, MalformedInputError
from pqkex.params import PARAMETER_SETS

SETS = list(PARAMETER_SETS)
ROUND_TRIPS = 1000


@pytest.mark.parametrize("transform", kem.TRANSFORMS)
@pytest.mark.parametrize("set_name", SETS)
def test_round_trip(set_name, transform):
    rng = kem.CounterRng(f"rt {set_name} {transform}".encode())
    keys = kem.batch_keygen(set_name, [(rng.random_bytes(32), rng.random_bytes(32)) for _ in range(8)], transform=transform)
    secrets = set()
    for i in range(ROUND_TRIPS):
        kp = keys[i % 8]
        res = kem.encaps(transform, kp.ek, rng=rng)
        assert kem.decaps(transform, kp.dk, res.ct) == res.shared_secret
        secrets.add(res.shared_secret)
    assert len(secrets) == ROUND_TRIPS


@pytest.mark.parametrize("set_name", SETS)
def test_dk_layouts(set_name):
    p = PARAMETER_SETS[set_name]
    d, z = b"\x11" * 32, b"\x22" * 32
    fo = kem.keygen("FO", p, d, z)
    tch = kem.keygen("TCH", p, d, z)
    trh = kem.keygen("TRH", p, d, z)
    assert fo.ek == tch.ek == trh.ek
    assert len(fo.dk) == p.dk_len
    assert len(tch.dk) == p.dk_len - 64
    assert len(trh.dk) == p.dk_len - 32
    assert fo.dk == tch.dk + hashlib.sha3_256(fo.ek).digest() + z
    assert trh.dk == tch.dk + z
    assert tch.dk.endswith(fo.ek)


def test_encaps_deterministic_per_transform():
    kp = kem.keygen("TRH", "ML-KEM-512", bytes(32), bytes(32))
    m, r = b"\x05" * 32, b"\x06" * 32
    a = kem.encaps("TRH", kp.ek, m=m, r=r)
    assert a == kem.encaps("TRH", kp.ek, m=m, r=r)
    assert a.shared_secret == hashlib.sha3_256(b"\x02" + m + a.ct).digest()
    t = kem.encaps("TCH", kp.ek, m=m, r=r)
    assert t.ct[-32:] == hashlib.sha3_256(b"\x01" + m).digest()
    assert t.ct[:-32] == a.ct


def test_fo_flip_implicit_reject():
    kp = kem.keygen("FO", "ML-KEM-768", b"\x01" * 32, b"\x02" * 32)
    res = kem.encaps("FO", kp.ek, m=b"\x03" * 32)
    bad = bytes([res.ct[0] ^ 1]) + res.ct[1:]
    k1 = kem.decaps("FO", kp.dk, bad)
    assert k1 != res.shared_secret
    assert k1 == kem.decaps("FO", kp.dk, bad)
    assert k1 == hashlib.shake_256(b"\x02" * 32 + bad).digest(32)


def test_tch_flipped_tag_rejects():
    kp = kem.keygen("TCH", "ML-KEM-512", bytes(32))
    res = kem.encaps("TCH", kp.ek)
    bad = res.ct[:-1] + bytes([res.ct[-1] ^ 0x80])
    assert kem.decaps("TCH", kp.dk, bad) is None


def test_batch_identical_seeds():
    keys = kem.batch_keygen("ML-KEM-512", [(bytes(32), bytes(32))] * 8)
    assert len({(k.ek, k.dk) for k in keys}) == 1


def test_batch_shared_z():
    seeds = [(bytes([i]) * 32, bytes([100 + i]) * 32) for i in range(8)]
    keys = kem.batch_keygen("ML-KEM-512", seeds, shared_z=True)
    assert {k.dk[-32:] for k in keys} == {seeds[0][1]}
    for k in keys:
        res = kem.encaps("FO", k.ek)
        assert kem.decaps("FO", k.dk, res.ct) == res.shared_secret


def test_malformed_inputs():
    kp = kem.keygen("FO", "ML-KEM-512")
    with pytest.raises(InvalidParameterError):
        kem.keygen("XYZ", "ML-KEM-512")
    with pytest.raises(InvalidParameterError):
        kem.keygen("FO", "ML-KEM-512", d=bytes(16))
    with pytest.raises(InvalidParameterError):
        kem.batch_keygen("ML-KEM-512", [(bytes(32), bytes(32))] * 7)
    with pytest.raises(MalformedInputError):
        kem.encaps("FO", kp.ek[:-1])
    with pytest.raises(MalformedInputError):
        kem.decaps("FO", kp.dk, bytes(767))
    with pytest.raises(MalformedInputError):
        kem.decaps("FO", kp.dk[:-1], bytes(768))
    with pytest.raises(MalformedInputError):
        kem.decaps("TCH", kem.keygen("TCH", "ML-KEM-512").dk, bytes(768))


def test_ek_modulus_check():
    kp = kem.keygen("FO", "ML-KEM-512", bytes(32), bytes(32))
    assert kem.ek_is_valid(kp.ek)
    assert not kem.ek_is_valid(b"\xff" * 3 + kp.ek[3:])


def test_counter_rng_reproducible():
    a, b = kem.CounterRng(b"x"), kem.CounterRng(b"x")
    assert [a.random_bytes(16) for _ in range(3)] == [b.random_bytes(16) for _ in range(3)]
    assert len(kem.SystemRng().random_bytes(7)) == 7


@pytest.mark.parametrize("second", [kem.StubKem(), kem.ToyDhKem()], ids=lambda k: k.name)
def test_hybrid_round_trip(second):
    rng = kem.CounterRng(b"hybrid")
    first = kem.MlKem("TRH", "ML-KEM-512")
    ek_a, dk_a = first.keygen(rng)
    ek_b, dk_b = second.keygen(rng)
    ct, key = kem.hybrid_encaps(first, second, ek_a, ek_b, rng)
    assert len(ct) == first.ct_len + second.ct_len
    assert kem.hybrid_decaps(first, second, dk_a, dk_b, ct) == key
    with pytest.raises(MalformedInputError):
        kem.hybrid_decaps(first, second, dk_a, dk_b, ct[:-1])


def test_hybrid_avalanche():
    rng = kem.CounterRng(b"avalanche")
    first, second = kem.MlKem("FO", "ML-KEM-512"), kem.StubKem()
    ek_a, dk_a = first.keygen(rng)
    ek_b, dk_b = second.keygen(rng)
    for trial in range(100):
        ct, key = kem.hybrid_encaps(first, second, ek_a, ek_b, rng)
        pos = trial * 7919 % len(ct)
        bad = ct[:pos] + bytes([ct[pos] ^ (1 << trial % 8)]) + ct[pos + 1:]
        assert kem.hybrid_decaps(first, second, dk_a, dk_b, bad) != key


def test_hybrid_tch_reject_propagates():
    rng = kem.CounterRng(b"tch hybrid")
    first, second = kem.MlKem("TCH", "ML-KEM-512"), kem.StubKem()
    ek_a, dk_a = first.keygen(rng)
    ek_b, dk_b = second.keygen(rng)
    ct, _ = kem.hybrid_encaps(first, second, ek_a, ek_b, rng)
    pos = first.ct_len - 1
    bad = ct[:pos] + bytes([ct[pos] ^ 1]) + ct[pos + 1:]
    assert kem.hybrid_decaps(first, second, dk_a, dk_b, bad) is None
