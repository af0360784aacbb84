"""ML-KEM with a lane-parallel core, batch key generation, the T_CH / T_RH
transforms and an ephemeral key-exchange harness.

Quick use::

    from pqkex import keygen, encaps, decaps
    kp = keygen("FO", "ML-KEM-768")
    res = encaps("FO", kp.ek)
    assert decaps("FO", kp.dk, res.ct) == res.shared_secret
"""
from .backend import SCALAR, VECTOR, available_backends, default_backend, set_default_backend, use_backend
from .errors import (
    BackendUnavailableError,
    HandshakeFailure,
    InvalidParameterError,
    KatError,
    MalformedInputError,
    PqkexError,
    ProtocolError,
)
from .kem import (
    TRANSFORMS,
    CounterRng,
    EncapsResult,
    KemKeyPair,
    SystemRng,
    batch_keygen,
    decaps,
    encaps,
    hybrid_decaps,
    hybrid_encaps,
    keygen,
)
from .params import ML_KEM_512, ML_KEM_768, ML_KEM_1024, PARAMETER_SETS, ParameterSet, get_params

__version__ = "0.1.0"

__all__ = [
    "SCALAR",
    "VECTOR",
    "available_backends",
    "default_backend",
    "set_default_backend",
    "use_backend",
    "BackendUnavailableError",
    "HandshakeFailure",
    "InvalidParameterError",
    "KatError",
    "MalformedInputError",
    "PqkexError",
    "ProtocolError",
    "TRANSFORMS",
    "CounterRng",
    "EncapsResult",
    "KemKeyPair",
    "SystemRng",
    "batch_keygen",
    "decaps",
    "encaps",
    "hybrid_decaps",
    "hybrid_encaps",
    "keygen",
    "ML_KEM_512",
    "ML_KEM_768",
    "ML_KEM_1024",
    "PARAMETER_SETS",
    "ParameterSet",
    "get_params",
]
