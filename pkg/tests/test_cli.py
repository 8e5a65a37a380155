import csv
import io
import json
import subprocess
import sys

import pytest

from qecwork.analytic import phase_channel_p
from qecwork.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_code_show_steane(capsys):
    code, out, _ = run(capsys, "code", "show", "steane")
    assert code == 0
    assert "[[7,1,3]]" in out
    zero = out.split("|0>_L:")[1].split("|1>_L:")[0].split()
    kets = zero[0::2]
    assert len(kets) == 8 and "1101001" in kets


def test_code_show_json(capsys):
    code, out, _ = run(capsys, "code", "show", "steane", "--format", "json")
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert (doc["n"], doc["k"], doc["d"]) == (7, 1, 3)


def test_code_distance_per_error_type(capsys):
    code, out, _ = run(capsys, "code", "distance", "repetition3")
    assert code == 0
    assert out.split() == ["all:", "1", "x:", "3", "z:", "1"]


def test_bad_code_file_exits_2_with_line(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("3 1\nZZI\nZIQ\n")
    code, _, err = run(capsys, "code", "show", "--code-file", str(path))
    assert code == 2
    assert "line 3" in err


def test_export_round_trip(capsys, tmp_path):
    out_path = tmp_path / "steane.txt"
    assert run(capsys, "code", "export", "steane", "--out", str(out_path))[0] == 0
    code, out, _ = run(capsys, "code", "show", "--code-file", str(out_path))
    assert code == 0 and "[[7,1,?]]" in out


def test_simulate_reproducible(capsys):
    argv = ["simulate", "--code", "steane", "--noise", "depolarizing", "--p", "0.01", "--trials", "1000", "--seed", "7"]
    first = json.loads(run(capsys, *argv)[1])
    second = json.loads(run(capsys, *argv)[1])
    assert first == second
    assert 0.9 < first["mean_fidelity"] <= 1.0


def test_simulate_zero_noise(capsys):
    code, out, _ = run(
        capsys, "simulate", "--code", "steane", "--noise", "bitflip", "--p", "0", "--trials", "20", "--seed", "1"
    )
    assert json.loads(out)["mean_fidelity"] == 1.0


def test_simulate_hadamard_trick(capsys):
    eps = 0.05
    code, out, _ = run(
        capsys, "simulate", "--noise", "phase_rotation", "--epsilon", str(eps), "--hadamard-trick",
        "--branch-average", "--trials", "2000", "--seed", "3",
    )
    doc = json.loads(out)
    p = phase_channel_p(eps)
    infidelity = 1 - doc["mean_fidelity"]
    assert infidelity == pytest.approx(3 * p**2, rel=0.2)


def test_montecarlo_csv(capsys):
    code, out, _ = run(
        capsys, "montecarlo", "--noise", "bitflip", "--p", "0.1", "--trials", "1000000", "--seed", "1", "--format", "csv"
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "# schema_version: 1"
    row = next(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    assert float(row["ci_low"]) <= 0.028 <= float(row["ci_high"])
    assert row["seed"] == "1"


def test_workers_do_not_change_output(capsys):
    argv = ["montecarlo", "--code", "steane", "--noise", "depolarizing", "--p", "0.05", "--trials", "200000", "--seed", "4"]
    one = json.loads(run(capsys, *argv, "--workers", "1")[1])
    four = json.loads(run(capsys, *argv, "--workers", "4")[1])
    assert one["rows"] == four["rows"]


def test_seed_reported_when_absent(capsys):
    code, out, err = run(capsys, "montecarlo", "--p", "0.1", "--trials", "100")
    seed = int(err.strip().split("seed: ")[1])
    assert json.loads(out)["rows"][0]["seed"] == seed


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--grid", "0.05,0.1,0.2", "--trials", "1000", "--seed", "2")
    doc = json.loads(out)
    assert [r["param"] for r in doc["rows"]] == [0.05, 0.1, 0.2]
    assert run(capsys, "sweep", "--grid", "", "--seed", "1")[0] == 2


def test_analytic_large_code(capsys):
    code, out, _ = run(capsys, "analytic", "large-code", "--n", "127", "--p", "1e-3", "--t", "7")
    doc = json.loads(out)
    assert doc["result"]["value"] == pytest.approx(1.1e-8, rel=0.01)
    code, out, _ = run(capsys, "analytic", "large-code", "--n", "127", "--p", "0", "--t", "7")
    assert json.loads(out)["result"]["value"] == 0


def test_analytic_ratio(capsys):
    code, out, _ = run(capsys, "analytic", "uncorrectable", "--n", "5", "--t", "1", "--epsilon", "0.01")
    res = json.loads(out)["result"]
    assert res["ratio"] == pytest.approx(9 * 10)


def test_track_summary(capsys):
    code, out, _ = run(capsys, "track", "--max-faults", "1", "--paulis", "X")
    assert out.splitlines() == ["weight,combinations,stabilizer,logical,detectable", "1,19,8,0,11"]


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"code": "steane", "trials": 10, "seed": 3}))
    code, out, _ = run(capsys, "--config", str(cfg), "montecarlo", "--p", "0")
    doc = json.loads(out)
    assert doc["code"] == "steane" and doc["rows"][0]["trials"] == 10
    cfg.write_text(json.dumps({"cod": "steane"}))
    code, _, err = run(capsys, "--config", str(cfg), "montecarlo")
    assert code == 2 and "cod" in err


def test_validation_exit_codes(capsys):
    assert run(capsys, "montecarlo", "--noise", "bitflip", "--p", "2", "--seed", "1")[0] == 2
    assert run(capsys, "code", "show", "golay")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "montecarlo", "--trials", "100", "--seed", "1")[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qecwork", "analytic", "three-bit", "--p", "0.1"],
        capture_output=True, text=True, check=True,
    )
    assert json.loads(proc.stdout)["result"]["value"] == pytest.approx(0.028)
