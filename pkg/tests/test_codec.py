import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import Q
from pqkex import codec
from pqkex.errors import InvalidParameterError, MalformedInputError
from pqkex.params import ML_KEM_512, ML_KEM_768, PARAMETER_SETS


def _bits_oracle(vals, d):
    bits = [(int(v) >> j) & 1 for v in vals for j in range(d)]
    return bytes(sum(bits[8 * i + j] << j for j in range(8)) for i in range(len(bits) // 8))


def test_compress_small_cases():
    for d in codec.COMPRESS_WIDTHS:
        assert codec.compress(0, d) == 0 and codec.decompress(0, d) == 0
    assert codec.compress(1665, 1) == 1
    assert codec.compress(832, 1) == 0 and codec.compress(833, 1) == 1
    assert codec.decompress(1, 1) == 1665


def test_byte_encode_layout():
    assert codec.byte_encode(np.zeros(256, int), 12) == bytes(384)
    f = np.zeros(256, int)
    f[0] = 1
    assert codec.byte_encode(f, 12)[:3] == b"\x01\x00\x00"
    f[1] = 0xABC
    assert codec.byte_encode(f, 12)[:3] == bytes([0x01, 0xC0, 0xAB])


@pytest.mark.parametrize("d", [1, 4, 5, 10, 11, 12])
def test_byte_encode_matches_oracle(d):
    vals = np.random.default_rng(d).integers(0, 1 << d, 256)
    if d == 12:
        vals %= Q
    packed = codec.byte_encode(vals, d)
    assert packed == _bits_oracle(vals, d)
    assert codec.byte_decode(packed, d).tolist() == vals.tolist()


@given(arrays(np.int64, 256, elements=st.integers(0, 4095)))
def test_decode12_reduces(vals):
    assert codec.byte_decode(codec.byte_encode(vals, 12), 12).tolist() == (vals % Q).tolist()


def test_encode_errors():
    with pytest.raises(InvalidParameterError):
        codec.byte_encode(np.full(256, 16), 4)
    with pytest.raises(InvalidParameterError):
        codec.byte_encode(np.full(256, -1), 4)
    with pytest.raises(InvalidParameterError):
        codec.byte_encode(np.zeros(255, int), 4)
    with pytest.raises(InvalidParameterError):
        codec.byte_decode(bytes(127), 4)


@given(st.binary(min_size=32, max_size=32))
def test_message_round_trip(m):
    w = codec.encode_message(m)
    assert set(np.unique(w).tolist()) <= {0, (Q + 1) // 2}
    assert codec.decode_message(w) == m


@pytest.mark.parametrize("p", list(PARAMETER_SETS.values()), ids=lambda p: p.name)
def test_role_lengths(p):
    assert codec.role_length("dk", p, "FO") == p.dk_len
    assert codec.role_length("dk", p, "TCH") == p.dk_len - 64
    assert codec.role_length("dk", p, "TRH") == p.dk_len - 32
    assert codec.role_length("ct_tagged", p) == p.ct_len + 32
    with pytest.raises(InvalidParameterError):
        codec.role_length("sig", p)


def test_serialize_round_trip():
    p = ML_KEM_768
    parts = (bytes([1]) * p.dk_pke_len, bytes([2]) * p.ek_len, bytes([3]) * 32)
    dk = codec.serialize("dk", p, *parts, transform="TRH")
    assert codec.deserialize("dk", p, dk, "TRH") == parts
    ct = codec.serialize("ct_tagged", p, bytes(p.ct_len), b"\xff" * 32)
    assert codec.deserialize("ct_tagged", p, ct) == (bytes(p.ct_len), b"\xff" * 32)


def test_wrong_length_names_role():
    with pytest.raises(MalformedInputError, match="ct"):
        codec.deserialize("ct", ML_KEM_512, bytes(767))
    with pytest.raises(MalformedInputError, match="ek"):
        codec.decode_ek(bytes(801), ML_KEM_512)


def test_ct_round_trip_within_bound():
    p = ML_KEM_512
    rng = np.random.default_rng(1)
    u = rng.integers(0, Q, (p.k, 256))
    v = rng.integers(0, Q, 256)
    u2, v2 = codec.decode_ct(codec.encode_ct(u, v, p), p)
    err_u = (u2.astype(int) - u + Q // 2) % Q - Q // 2
    err_v = (v2.astype(int) - v + Q // 2) % Q - Q // 2
    assert np.abs(err_u).max() <= codec.error_bound(p.du)
    assert np.abs(err_v).max() <= codec.error_bound(p.dv)


def test_ek_canonical_check():
    p = ML_KEM_512
    ek = codec.encode_ek(np.zeros((p.k, 256), int), bytes(32))
    assert codec.ek_is_canonical(ek, p)
    bad = b"\xff\xff\xff" + ek[3:]
    assert not codec.ek_is_canonical(bad, p)
