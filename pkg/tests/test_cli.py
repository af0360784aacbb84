import json
import subprocess
import sys

import pytest

from conftest import KAT_DIR
from pqkex import cli
from pqkex.harness import HandshakeServer

KAT_768 = str(KAT_DIR / "kat_ML-KEM-768.rsp")


def test_kat_pass(capsys):
    assert cli.main(["kat", KAT_768, "--backend", "scalar"]) == 0
    assert capsys.readouterr().out.startswith("PASS")


def test_kat_corrupted_fails(tmp_path, capsys):
    text = (KAT_DIR / "kat_ML-KEM-768.rsp").read_text()
    i = text.index("\nss = ") + 6
    bad = text[:i] + ("0" if text[i] != "0" else "1") + text[i + 1:]
    path = tmp_path / "bad.rsp"
    path.write_text(bad)
    assert cli.main(["kat", str(path)]) == 1
    assert "ss mismatch" in capsys.readouterr().out


def test_kat_empty_file_fails(tmp_path, capsys):
    path = tmp_path / "empty.rsp"
    path.write_text("")
    assert cli.main(["kat", str(path)]) == 1
    assert "no records" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nope"],
        ["kat"],
        ["bench", "--runs", "0"],
        ["handshake-bench", "--kem-id", "0x0110", "--set", "ML-KEM-512"],
        ["handshake-bench", "--kem-id", "0x0999"],
        ["handshake-bench", "--kem-id", "abc"],
        ["handshake-bench", "--duration", "0"],
        ["client", "--kem-id", "0x0110", "--kem-id", "0x0111"],
        ["client", "--mode", "both"],
        ["serve", "--port", "70000"],
        ["kat", KAT_768, "--backend", "scalar", "--backend", "scalar"],
        ["bench", "--backend", "simd"],
    ],
)
def test_usage_errors(argv, capsys):
    assert cli.main(argv) == 2


def test_vector_unavailable_is_environment_error(monkeypatch, capsys):
    monkeypatch.setenv("PQKEX_DISABLE_VECTOR", "1")
    assert cli.main(["kat", KAT_768, "--backend", "vector"]) == 3
    assert "vector backend unavailable" in capsys.readouterr().err
    assert cli.main(["kat", KAT_768, "--backend", "scalar"]) == 0


def test_connect_failure_is_environment_error(capsys):
    with HandshakeServer() as server:
        host, port = server.address
    assert cli.main(["client", "--host", host, "--port", str(port)]) == 3
    assert f"{host}:{port}" in capsys.readouterr().err


def test_bind_failure_is_environment_error(capsys):
    with HandshakeServer() as server:
        host, port = server.address
        assert cli.main(["serve", "--host", host, "--port", str(port), "--count", "1"]) == 3


def test_bench_json(capsys):
    assert cli.main(["bench", "--set", "ML-KEM-512", "--runs", "3", "--inner", "2", "--json", "--backend", "scalar"]) == 0
    out = capsys.readouterr().out
    assert "perf_counter_ns" in out
    data = json.loads(out.strip().splitlines()[-1])
    assert len(data["rows"]) == 3 and "scalar decaps TRH/FO" in data["ratios"]


def test_batch_bench_shared_z(capsys):
    assert cli.main(["batch-bench", "--set", "ML-KEM-512", "--runs", "3", "--shared-z"]) == 0
    assert "shared_z=True" in capsys.readouterr().out


def test_handshake_bench(capsys):
    argv = ["handshake-bench", "--set", "ML-KEM-512", "--transform", "FO", "--mode", "both", "--duration", "0.2", "--batch-pool"]
    assert cli.main(argv) == 0
    records = [json.loads(line) for line in capsys.readouterr().out.splitlines() if line.startswith("{")]
    assert [r["kem_id"] for r in records] == ["0x0100", "0x0200"]


def test_serve_and_client(capsys):
    server = subprocess.Popen(
        [sys.executable, "-m", "pqkex", "serve", "--port", "0", "--count", "2"],
        stdout=subprocess.PIPE,
        text=True,
    )
    try:
        line = server.stdout.readline()
        port = line.rsplit(":", 1)[1].strip()
        assert cli.main(["client", "--port", port, "--count", "2", "--set", "ML-KEM-512", "--transform", "TRH"]) == 0
        assert server.wait(timeout=60) == 0
        assert "completed 2, failed 0" in server.stdout.read()
    finally:
        server.kill()
    assert capsys.readouterr().out.count("traffic_secret=") == 2
