import csv
import hashlib
import json
import subprocess
import sys

import jsonschema
import pytest

from rudin_sieve.cli import SCHEMAS, run


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_constants_gamma_chain(capsys):
    code, obj = run_json(capsys, ["constants", "--which", "gamma_chain"])
    assert code == 0
    jsonschema.validate(obj, SCHEMAS["constants"])
    assert obj["holds"]


def test_gsharp_scan_csv(tmp_path):
    out = tmp_path / "scan.csv"
    code = run(["gsharp-scan", "--limit", "1000", "--emit", "csv", "--out", str(out), "--no-floor"])
    assert code == 0
    rows = list(csv.DictReader(out.open(newline="")))
    assert len(rows) == 1000
    mins = [float(r["running_min"]) for r in rows]
    assert all(a >= b for a, b in zip(mins, mins[1:]))
    assert rows[9]["g_sharp"].startswith("2.91666666666")
    man = json.loads((tmp_path / "scan.csv.manifest.json").read_text())
    assert man["subcommand"] == "gsharp-scan"
    assert man["output_digest"] == hashlib.sha256(out.read_bytes()).hexdigest()


def test_gsharp_scan_floor_asserted(capsys):
    # the minimum up to 1000 is below 0.304, so the default floor fails
    code, obj = run_json(capsys, ["gsharp-scan", "--limit", "1000"])
    assert code == 2
    jsonschema.validate(obj, SCHEMAS["gsharp-scan"])
    assert obj["argmin"] == 28 and not obj["claim_min_ratio_ge_0_304"]


def test_verify_randomized_deterministic(capsys):
    argv = ["verify", "--kind", "interval", "--trials", "100", "--seed", "7"]
    code1 = run(argv)
    first = capsys.readouterr().out
    code2 = run(argv)
    second = capsys.readouterr().out
    assert code1 == code2 == 0
    assert first == second
    obj = json.loads(first)
    jsonschema.validate(obj, SCHEMAS["verify-randomized"])
    assert obj["failures"] == 0


def test_verify_single_instance_from_config(tmp_path, capsys):
    cfg = tmp_path / "inst.cfg"
    cfg.write_text("# interval example\nkind=interval\nX=1/8,2/8,4/8\nS=1-16\nN=16\n")
    code, obj = run_json(capsys, ["verify", "--config", str(cfg)])
    assert code == 0
    jsonschema.validate(obj, SCHEMAS["verify"])
    assert obj["rhs"] == pytest.approx(5725.2249, abs=1e-4)


def test_square_sieve_json(capsys):
    code, obj = run_json(capsys, ["square-sieve", "--z", "3"])
    assert code == 0
    jsonschema.validate(obj, SCHEMAS["square-sieve"])
    assert obj["lambda_sharp"] == {"1": "0/1", "3": "1/1"}


def test_prime_sieve_json(capsys):
    code, obj = run_json(capsys, ["prime-sieve", "--z", "3", "--z0", "2"])
    assert code == 0
    jsonschema.validate(obj, SCHEMAS["prime-sieve"])
    assert obj["G"] == "5/2"


def test_dissociate(capsys):
    code, obj = run_json(capsys, ["dissociate", "--points", "1/7,2/7,3/7", "--greedy"])
    jsonschema.validate(obj, SCHEMAS["dissociate"])
    assert code == 0


def test_spectrum(capsys):
    code, obj = run_json(capsys, ["spectrum", "--modulus", "13", "--alpha", "1", "--primes-upto", "50"])
    assert code == 0
    jsonschema.validate(obj, SCHEMAS["spectrum"])
    assert obj["entries"][0]["u"] == 0


def test_chang(capsys):
    code, obj = run_json(capsys, ["chang", "--n", "10000", "--u1", "101", "--u2", "103", "--alpha", "2", "--primes-all"])
    assert code == 0
    jsonschema.validate(obj, SCHEMAS["chang"])
    assert obj["containment_verified"]


def test_majorant(capsys):
    code, obj = run_json(capsys, ["majorant", "--N", "10", "--delta", "0.5"])
    assert code == 0
    jsonschema.validate(obj, SCHEMAS["majorant"])
    assert obj["mass"] == 12


@pytest.mark.parametrize(
    "argv,hint",
    [
        (["verify", "--kind", "interval", "--trails", "3"], "--trials"),
        (["gsharp-scn", "--limit", "10"], "gsharp-scan"),
        (["constants", "--which", "stirlng"], "stirling"),
    ],
)
def test_usage_errors_suggest(capsys, argv, hint):
    assert run(argv) == 1
    assert f"did you mean {hint}" in capsys.readouterr().err


def test_unknown_kind(capsys):
    assert run(["verify", "--kind", "intervall", "--trials", "2"]) == 1
    assert "interval" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "rudin_sieve", "constants", "--which", "cosh_bounds"],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["holds"]
