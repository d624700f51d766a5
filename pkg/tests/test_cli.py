"""Command line behaviour: reports, exit codes, determinism."""
import json
import subprocess
import sys
from pathlib import Path

import pytest

from qdha.cli import main

ROOT = Path(__file__).resolve().parent.parent
A1 = str(ROOT / "instances" / "a1_quarter.json")
A1H = str(ROOT / "instances" / "a1_ddaha_half.json")
A2 = str(ROOT / "instances" / "a2_generic.json")


def run_main(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def test_describe_a1(capsys):
    code, out = run_main(["describe", "--instance", A1], capsys)
    assert code == 0
    assert "clans: 3" in out
    assert "generic" in out


def test_describe_json_deterministic(capsys):
    code1, out1 = run_main(["describe", "--instance", A1, "--json"], capsys)
    code2, out2 = run_main(["describe", "--instance", A1, "--json"], capsys)
    assert code1 == code2 == 0
    assert out1 == out2
    data = json.loads(out1)
    assert len(data["clans"]) == 3
    assert data["e_gamma"] == [["-5/4"], ["-3/4"]]


def test_verify_length_passes(capsys):
    code, out = run_main(["verify", "--instance", A1, "--check", "length", "--ball", "6"], capsys)
    assert code == 0
    assert out.startswith("PASS")


def test_verify_braid_vacuous_on_a1(capsys):
    code, out = run_main(
        ["verify", "--instance", A1, "--check", "braid", "--json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["pass"] is True
    assert data["instances"] == 0  # no finite braid pair in the rank-1 affinisation


def test_verify_iso_a1(capsys):
    code, out = run_main(["verify", "--instance", A1, "--check", "iso"], capsys)
    assert code == 0


def test_verify_integral_with_parameters(capsys):
    code, out = run_main(["verify", "--instance", A1H, "--check", "integral"], capsys)
    assert code == 0


def test_verify_unknown_check_usage_error(capsys):
    code = main(["verify", "--instance", A1, "--check", "nonsense"])
    assert code == 2


def test_missing_instance_file(capsys):
    code = main(["verify", "--instance", "no_such_file.json", "--check", "length"])
    assert code == 2


def test_malformed_instance_rejected(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"type": "A1", "lambda0": ["1/4"]}))
    code = main(["describe", "--instance", str(bad)])
    assert code == 2
    bad.write_text(json.dumps({
        "type": "A1", "lambda0": ["1/4"],
        "omega": [{"root": {"alpha": [1], "level": 0}, "value": -1}],
    }))
    code = main(["describe", "--instance", str(bad)])
    assert code == 2


def test_example_a1(capsys):
    code, out = run_main(["example-a1", "--json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["pass"] is True
    assert data["clans"] == 3
    assert data["product_scalar"] == "1"
    assert data["projective_exponent"] == 1


def test_thread_cap_env(monkeypatch, capsys):
    monkeypatch.setenv("QDHA_THREADS", "4")
    code, _ = run_main(["describe", "--instance", A1], capsys)
    assert code == 0
    monkeypatch.setenv("QDHA_THREADS", "zebra")
    with pytest.raises(SystemExit):
        main(["describe", "--instance", A1])


def test_module_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "qdha", "describe", "--instance", A1],
        capture_output=True, text=True, cwd=ROOT,
    )
    assert result.returncode == 0
    assert "clans: 3" in result.stdout
