"""Exception hierarchy shared by every pqkex module."""


class PqkexError(Exception):
    pass


class InvalidParameterError(PqkexError, ValueError):
    """Unknown parameter set, unsupported batch width, bad length argument."""


class MalformedInputError(PqkexError, ValueError):
    """A byte string has the wrong length or layout for its role."""

    def __init__(self, role: str, message: str):
        super().__init__(f"malformed {role}: {message}")
        self.role = role


class BackendUnavailableError(PqkexError, RuntimeError):
    pass


class ProtocolError(PqkexError):
    """Wire message failed structural validation."""


class HandshakeFailure(PqkexError):
    """Cryptographic check failed (finished MAC mismatch, explicit reject)."""


class KatError(PqkexError):
    """Known-answer file could not be parsed."""
