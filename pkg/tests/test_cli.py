import csv
import io
import json
import math
import subprocess
import sys

import pytest

from pathspin import cli

ALPHA_08 = repr(math.sqrt(0.8))
ALPHA_SYM = repr(math.sqrt(0.5))


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    doc = json.loads(out)
    assert doc["schema_version"] == "pathspin/1"
    return code, doc


def test_transmit_00(capsys):
    code, doc = run_json(capsys, "transmit", "--bits", "00", "--shots", "100", "--seed", "7")
    assert code == 0
    res = doc["results"]
    assert res["counts"] == {"S1": 100, "S2": 0, "S3": 0, "S4": 0}
    assert res["decoded"] == "00" and res["round_trip"] is True
    assert res["settings"]["name"] == "U1"
    assert doc["inputs"] == {"bits": "00", "shots": 100, "seed": 7}


@pytest.mark.parametrize("bits", ["01", "10", "11"])
def test_transmit_round_trips(capsys, bits):
    _, doc = run_json(capsys, "transmit", "--bits", bits, "--shots", "50")
    assert doc["results"]["decoded"] == bits


def test_transmit_deterministic_bytes(capsys):
    _, a = run(capsys, "transmit", "--bits", "11", "--shots", "300", "--seed", "3")
    _, b = run(capsys, "transmit", "--bits", "11", "--shots", "300", "--seed", "3")
    assert a == b


@pytest.mark.parametrize("argv", [
    ["transmit", "--bits", "2"],
    ["transmit", "--bits", "000"],
    ["transmit", "--bits", "01", "--shots", "0"],
    ["nogo", "--grid-steps", "4"],
    ["povm", "--alpha", "1.5"],
    ["sweep", "--param", "beta"],
    ["sweep", "--steps", "1"],
    ["sweep", "--from", "0.9", "--to", "0.6"],
])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 2


def test_channel(capsys):
    code, doc = run_json(capsys, "channel")
    res = doc["results"]
    assert code == 0
    assert res["mutual_information_bits"] == pytest.approx(2.0, abs=1e-9)
    assert res["is_permutation"] is True
    for row in res["matrix"]:
        assert sum(1 for x in row if abs(x - 1) <= 1e-12) == 1
        assert sum(row) == pytest.approx(1, abs=1e-12)
    for col in zip(*res["matrix"]):
        assert sum(col) == pytest.approx(1, abs=1e-12)


def test_nogo_default(capsys):
    code, doc = run_json(capsys, "nogo")
    res = doc["results"]
    assert code == 0
    assert res["max_subset_size"] == 2
    assert res["passed"] is True
    w = res["phase_difference_pi_witness"]["quadruple"]
    assert (w["phi2"] - w["phi1"]) % (2 * math.pi) == pytest.approx(math.pi)
    assert "runtime_seconds" not in res


def test_nogo_timing_flag(capsys):
    _, doc = run_json(capsys, "nogo", "--grid-steps", "8", "--timing")
    assert doc["results"]["runtime_seconds"] >= 0


def test_nogo_violation_exit_1(capsys):
    # a huge tolerance makes everything "orthogonal", tripping the sentinel
    code, doc = run_json(capsys, "nogo", "--grid-steps", "8", "--tol", "2")
    assert code == 1
    assert doc["results"]["max_subset_size"] == 4


def test_povm_symmetric(capsys):
    _, doc = run_json(capsys, "povm", "--alpha", ALPHA_SYM)
    res = doc["results"]
    assert res["valid"] is True
    assert res["success_probability_computed"] == pytest.approx(1.0, abs=1e-12)
    assert res["probabilities"]["S1"] == pytest.approx(1.0, abs=1e-12)


def test_povm_eight_digit_alpha_is_formally_invalid(capsys):
    # 0.70710678 leaves 2 alpha^2 - 1 at about -3.4e-9, beyond the 1e-10 eigen tolerance
    _, doc = run_json(capsys, "povm", "--alpha", "0.70710678")
    res = doc["results"]
    assert res["success_probability_computed"] == pytest.approx(1.0, abs=1e-12)
    assert res["min_eigenvalue"] == pytest.approx(2 * 0.70710678**2 - 1, abs=1e-15)
    assert res["valid"] is False


def test_povm_alpha_squared_08(capsys):
    _, doc = run_json(capsys, "povm", "--alpha", ALPHA_08)
    res = doc["results"]
    assert res["valid"] is False
    assert res["probabilities"] is None
    assert res["min_eigenvalue"] == pytest.approx(-0.6, abs=1e-10)
    assert res["success_probability_computed"] == pytest.approx(0.64, abs=1e-12)
    assert res["paper_formula_value"] == pytest.approx(1.36, abs=1e-12)
    assert res["idp_optimum"] == pytest.approx(0.4, abs=1e-12)
    assert res["effects"]["S1"][0][0] == [pytest.approx(0.9), 0.0]


def test_povm_eight_digit_alpha_08(capsys):
    _, doc = run_json(capsys, "povm", "--alpha", "0.89442719")
    res = doc["results"]
    assert res["min_eigenvalue"] == pytest.approx(-0.6, abs=1e-7)
    assert res["success_probability_computed"] == pytest.approx(0.64, abs=1e-7)


def test_povm_alpha_one_not_independent(capsys):
    _, doc = run_json(capsys, "povm", "--alpha", "1.0")
    assert doc["results"]["linearly_independent"] is False


def test_probability_fields_in_unit_interval(capsys):
    for alpha in ("0.3", ALPHA_SYM, "0.95"):
        _, doc = run_json(capsys, "povm", "--alpha", alpha)
        res = doc["results"]
        for key in ("success_probability_computed", "idp_optimum"):
            assert -1e-12 <= res[key] <= 1 + 1e-12


def _sweep_rows(capsys, *extra):
    code, out = run(capsys, "sweep", "--format", "csv", *extra)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    return out, rows


def test_sweep_csv_header_and_count(capsys):
    out, rows = _sweep_rows(capsys, "--param", "alpha", "--from", "0.5", "--to", "1.0", "--steps", "6")
    assert out.splitlines()[0] == ",".join(cli.SWEEP_COLUMNS)
    assert len(rows) == 6
    alphas = [float(r["alpha"]) for r in rows]
    idp = [float(r["idp_optimum"]) for r in rows]
    # the optimum falls as alpha^2 -> 1, i.e. past the symmetric point
    right = [v for a, v in zip(alphas, idp) if a >= math.sqrt(0.5)]
    assert all(x > y for x, y in zip(right, right[1:]))
    nearest = min(range(6), key=lambda k: abs(alphas[k] - math.sqrt(0.5)))
    valid = [k for k, r in enumerate(rows) if r["valid"] == "true"]
    assert set(valid) <= {nearest}


def test_sweep_validity_only_at_symmetric_point(capsys):
    lo, hi = math.sqrt(0.5) - 0.1, math.sqrt(0.5) + 0.1
    _, rows = _sweep_rows(capsys, "--from", repr(lo), "--to", repr(hi), "--steps", "3")
    assert [r["valid"] for r in rows] == ["false", "true", "false"]


def test_sweep_json(capsys):
    _, doc = run_json(capsys, "sweep", "--steps", "4")
    assert len(doc["results"]["rows"]) == 4
    assert doc["results"]["columns"] == list(cli.SWEEP_COLUMNS)


def test_discriminate_symmetric(capsys):
    code, doc = run_json(capsys, "discriminate", "--alpha", ALPHA_SYM, "--bits", "10", "--shots", "200")
    assert code == 0
    assert doc["results"]["round_trip_rate"] == 1.0
    assert doc["results"]["counts"]["psi3,S2"] == 200


def test_discriminate_invalid_povm_exit_1(capsys):
    code, doc = run_json(capsys, "discriminate", "--alpha", ALPHA_08, "--bits", "00")
    assert code == 1
    assert doc["results"]["error"] == "invalid_povm"
    assert doc["results"]["min_eigenvalue"] == pytest.approx(-0.6, abs=1e-10)


def test_json_round_trip_lossless(capsys):
    _, out = run(capsys, "povm", "--alpha", ALPHA_08)
    doc = json.loads(out)
    assert cli.dumps(doc) == out
    assert doc["results"]["alpha"] == float(ALPHA_08)


def test_text_and_csv_formats(capsys):
    _, out = run(capsys, "channel", "--format", "text")
    assert out.startswith("channel (pathspin/1)")
    assert "mutual_information_bits = 2.0" in out
    _, out = run(capsys, "transmit", "--bits", "01", "--format", "csv")
    rows = dict(csv.reader(io.StringIO(out)))
    assert rows["decoded"] == "01"
    assert rows["round_trip"] == "true"


def test_output_file(tmp_path, capsys):
    target = tmp_path / "doc.json"
    code, out = run(capsys, "channel", "--output", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["command"] == "channel"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "pathspin", "transmit", "--bits", "11", "--shots", "10"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["decoded"] == "11"
    bad = subprocess.run([sys.executable, "-m", "pathspin", "bogus"], capture_output=True, check=False)
    assert bad.returncode == 2
