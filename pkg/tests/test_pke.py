import numpy as np
import pytest

from conftest import Q
from pqkex import codec, keccak, pke, polyring, sampling
from pqkex.errors import InvalidParameterError, MalformedInputError
from pqkex.params import PARAMETER_SETS

SETS = list(PARAMETER_SETS.values())
TRIPLES = 1000


@pytest.mark.parametrize("p", SETS, ids=lambda p: p.name)
def test_round_trip(p):
    rng = np.random.default_rng(p.k)
    failures = 0
    for i in range(TRIPLES):
        if i % 50 == 0:
            ek, dk = pke.kpke_keygen(rng.bytes(32), p)
        m = rng.bytes(32)
        failures += pke.kpke_decrypt(dk, pke.kpke_encrypt(ek, m, rng.bytes(32), p), p) != m
    assert failures == 0


@pytest.mark.parametrize("p", SETS, ids=lambda p: p.name)
def test_key_equation(p, be):
    d = bytes(range(32))
    ek, dk = pke.kpke_keygen(d, p, be)
    t_hat, rho = codec.decode_ek(ek, p)
    s_hat = codec.decode_dk_pke(dk, p)
    g = keccak.sha3_512(d + bytes((p.k,)))
    assert rho == g[:32]
    a = polyring.to_scalar_order(sampling.expand_matrix(rho, p.k, backend=be), be)
    e = sampling.sample_noise(g[32:], range(p.k, 2 * p.k), p.eta1, be)
    # t = A s + e checked through the ring: intt(t_hat) - e = sum_j A[i][j] * s_j
    s = polyring.intt(polyring.from_scalar_order(s_hat, be), be)
    t = polyring.intt(polyring.from_scalar_order(t_hat, be), be)
    for i in range(p.k):
        acc = np.zeros(256, np.int64)
        for j in range(p.k):
            a_ij = polyring.intt(polyring.from_scalar_order(a[i, j], be), be)
            acc += polyring.ring_mul(a_ij, s[j], be)
        assert np.all((t[i].astype(np.int64) - e[i] - acc) % Q == 0)


def test_keygen_many_equals_single(be):
    p = PARAMETER_SETS["ML-KEM-768"]
    ds = [bytes([i]) * 32 for i in range(11)]
    assert pke.keygen_many(ds, p, be) == [pke.kpke_keygen(d, p, be) for d in ds]


def test_deterministic_and_distinct():
    p = PARAMETER_SETS["ML-KEM-512"]
    a = pke.kpke_keygen(bytes(32), p)
    assert a == pke.kpke_keygen(bytes(32), p)
    assert a[0] != pke.kpke_keygen(b"\x01" + bytes(31), p)[0]
    c1 = pke.kpke_encrypt(a[0], bytes(32), bytes(32), p)
    assert c1 == pke.kpke_encrypt(a[0], bytes(32), bytes(32), p)
    assert len(c1) == p.ct_len


def test_encrypt_counter():
    p = PARAMETER_SETS["ML-KEM-512"]
    ek, _ = pke.kpke_keygen(bytes(32), p)
    before = pke.encrypt_calls()
    pke.kpke_encrypt(ek, bytes(32), bytes(32), p)
    assert pke.encrypt_calls() == before + 1


def test_malformed_lengths():
    p = PARAMETER_SETS["ML-KEM-512"]
    ek, dk = pke.kpke_keygen(bytes(32), p)
    with pytest.raises(MalformedInputError):
        pke.kpke_encrypt(ek[:-1], bytes(32), bytes(32), p)
    with pytest.raises(MalformedInputError):
        pke.kpke_decrypt(dk, bytes(p.ct_len - 1), p)
    with pytest.raises(InvalidParameterError):
        pke.kpke_keygen(bytes(31), p)
