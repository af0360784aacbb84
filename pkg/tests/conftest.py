import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from pqkex import backend

KAT_DIR = Path(__file__).parent / "kat"
Q = 3329
N = 256

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("HYPOTHESIS_MAX_EXAMPLES", "60")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")

BACKENDS = backend.available_backends()
VECTOR_REASON = backend.vector_unavailable_reason()

requires_vector = pytest.mark.skipif(
    VECTOR_REASON is not None, reason=f"vector backend unavailable on this host: {VECTOR_REASON}"
)


@pytest.fixture(params=BACKENDS)
def be(request):
    return request.param


@pytest.fixture
def nprng():
    return np.random.default_rng(20240611)


def schoolbook(f, g):
    """Negacyclic product in Z_q[x]/(x^256 + 1), computed with plain integers."""
    f = np.asarray(f, dtype=np.int64) % Q
    g = np.asarray(g, dtype=np.int64) % Q
    full = np.zeros(2 * N, dtype=np.int64)
    full[: 2 * N - 1] = np.convolve(f, g)
    return (full[:N] - full[N:]) % Q


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion."""
    try:
        from test_acceptance import CRITERIA
    except ImportError:
        return
    outcomes: dict[str, list[str]] = {}
    details: dict[str, list[str]] = {}
    for status in ("passed", "failed", "skipped", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" not in nodeid or getattr(rep, "when", "call") not in ("call", "setup"):
                continue
            if status == "passed" and rep.when != "call":
                continue
            name = nodeid.split("::")[-1].split("[")[0]
            key = next((k for k, tests in CRITERIA.items() if name in tests[1]), None)
            if key is None:
                continue
            outcomes.setdefault(key, []).append(status)
            for prop, value in getattr(rep, "user_properties", []):
                if prop == "measured":
                    details.setdefault(key, []).append(str(value))
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for key, (title, _tests) in CRITERIA.items():
        got = outcomes.get(key)
        if not got:
            verdict = "NOT RUN"
        elif any(s in ("failed", "error") for s in got):
            verdict = "FAIL"
        elif all(s == "skipped" for s in got):
            verdict = "SKIP"
        else:
            verdict = "PASS"
        line = f"[{verdict}] criterion {key}: {title}"
        if details.get(key):
            line += "  (" + "; ".join(details[key]) + ")"
        terminalreporter.write_line(line)
