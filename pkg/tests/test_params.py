import dataclasses

import pytest

from pqkex.errors import InvalidParameterError
from pqkex.params import ML_KEM_512, ML_KEM_768, ML_KEM_1024, PARAMETER_SETS, get_params


@pytest.mark.parametrize(
    "name,k,eta1,eta2,du,dv",
    [
        ("ML-KEM-512", 2, 3, 2, 10, 4),
        ("ML-KEM-768", 3, 2, 2, 10, 4),
        ("ML-KEM-1024", 4, 2, 2, 11, 5),
    ],
)
def test_registry_values(name, k, eta1, eta2, du, dv):
    p = get_params(name)
    assert (p.k, p.eta1, p.eta2, p.du, p.dv) == (k, eta1, eta2, du, dv)
    assert p.n == 256 and p.q == 3329


@pytest.mark.parametrize("p", list(PARAMETER_SETS.values()), ids=lambda p: p.name)
def test_length_formulas(p):
    assert p.ek_len == 384 * p.k + 32
    assert p.dk_len == 768 * p.k + 96
    assert p.ct_len == 32 * (p.du * p.k + p.dv)
    assert p.ct_tagged_len == p.ct_len + 32


def test_published_lengths():
    assert (ML_KEM_512.ct_len, ML_KEM_512.ek_len, ML_KEM_512.dk_len) == (768, 800, 1632)
    assert ML_KEM_768.ct_len == 1088
    assert ML_KEM_1024.ct_len == 1568


def test_unknown_name():
    with pytest.raises(InvalidParameterError):
        get_params("ML-KEM-2048")


def test_immutable():
    with pytest.raises(dataclasses.FrozenInstanceError):
        ML_KEM_768.k = 5


def test_get_params_passthrough():
    assert get_params(ML_KEM_1024) is ML_KEM_1024
