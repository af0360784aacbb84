"""ML-KEM parameter sets.

This registry is the only place k, eta and the compression widths are
spelled out; everything else derives lengths from a ``ParameterSet``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameterError

N = 256
Q = 3329


@dataclass(frozen=True)
class ParameterSet:
    name: str
    k: int
    eta1: int
    eta2: int
    du: int
    dv: int
    n: int = N
    q: int = Q

    @property
    def ek_len(self) -> int:
        return 384 * self.k + 32

    @property
    def dk_pke_len(self) -> int:
        return 384 * self.k

    @property
    def dk_len(self) -> int:
        return 768 * self.k + 96

    @property
    def ct_len(self) -> int:
        return 32 * (self.du * self.k + self.dv)

    @property
    def ct_tagged_len(self) -> int:
        return self.ct_len + 32


ML_KEM_512 = ParameterSet("ML-KEM-512", k=2, eta1=3, eta2=2, du=10, dv=4)
ML_KEM_768 = ParameterSet("ML-KEM-768", k=3, eta1=2, eta2=2, du=10, dv=4)
ML_KEM_1024 = ParameterSet("ML-KEM-1024", k=4, eta1=2, eta2=2, du=11, dv=5)

PARAMETER_SETS = {p.name: p for p in (ML_KEM_512, ML_KEM_768, ML_KEM_1024)}


def get_params(name: str | ParameterSet) -> ParameterSet:
    if isinstance(name, ParameterSet):
        return name
    try:
        return PARAMETER_SETS[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown parameter set {name!r}; expected one of {sorted(PARAMETER_SETS)}"
        ) from None
