import csv
import json
import subprocess
import sys

import pytest

from switchlab import acceptance
from switchlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_ghz_mermin_json(tmp_path, capsys):
    path = tmp_path / "out.json"
    code, out, _ = run(capsys, "ghz-mermin", "--json", str(path))
    assert code == 0
    report = json.loads(path.read_text())
    assert report["total"] == 4.0 and report["verdict"] == "VIOLATED"
    assert "4.000000000" in out


def test_ghz_mermin_noisy_exit_code(capsys):
    code, out, _ = run(capsys, "ghz-mermin", "--noise", "1")
    assert code == 1 and "SATISFIED" in out


def test_possibilistic(capsys):
    code, out, _ = run(capsys, "possibilistic")
    assert code == 0 and "INFEASIBLE" in out
    code, out, _ = run(capsys, "possibilistic", "--noise", "0.3")
    assert code == 1 and "NOT_APPLICABLE" in out


def test_chained_sweep_csv(tmp_path, capsys):
    path = tmp_path / "bc.csv"
    code, out, _ = run(capsys, "chained", "--sweep", "2:12", "--csv", str(path))
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == 11
    row9 = next(r for r in rows if r["N"] == "9")
    assert row9["constrainedValue"] == "18.510565163"
    assert "first violating N: 4" in out


def test_chained_planar_schedule_fails_closed_form(capsys):
    code, _, _ = run(capsys, "chained", "--n", "3", "--schedule", "planar")
    assert code == 1


def test_json_to_stdout_is_clean(capsys):
    code, out, err = run(capsys, "chained", "--n", "4", "--json", "-")
    assert code == 0
    doc = json.loads(out)
    assert doc["reports"][0]["N"] == 4 and doc["firstViolatingN"] == 4
    assert "BC=" in err


def test_enumerate_hco(tmp_path, capsys):
    path = tmp_path / "hco.json"
    code, out, _ = run(capsys, "enumerate-hco", "--switch", "B", "--json", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert doc["candidates"] == 243 and doc["valid"] >= 1 and doc["forcedDeterminism"]
    assert set(doc["extensions"][0][0]["cell"]) == {"b1", "b2", "y1", "y2"}


def test_enumerate_hco_support_limit(capsys):
    code, _, err = run(capsys, "enumerate-hco", "--max-support", "3")
    assert code == 2 and "max-support" in err


def test_random_models(capsys):
    code, out, _ = run(capsys, "random-models", "--seeds", "15")
    assert code == 0 and out.startswith("PASS")


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["chained", "--sweep", "5:2"],
    ["chained", "--sweep", "abc"],
    ["chained", "--n", "1"],
    ["chained", "--n", "3", "--sweep", "2:4"],
    ["ghz-mermin", "--eps", "-1"],
    ["ghz-mermin", "--noise", "2"],
    ["random-models", "--seeds", "0"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "usage" in err


def test_selfcheck_small_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code, out, _ = run(capsys, "selfcheck", "--seeds", "10", "--json", str(p))
        assert code == 0 and "9/9 criteria passed" in out
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_selfcheck_timing_goes_to_stderr(tmp_path, capsys):
    path = tmp_path / "t.json"
    code, _, err = run(capsys, "selfcheck", "--seeds", "5", "--timing", "--json", str(path))
    assert code == 0 and "wall clock" in err
    assert "wallClockSeconds" in json.loads(path.read_text())


def test_injected_noise_fails_data_checks():
    result = acceptance.selfcheck(noise=0.5, mermin_seeds=5, chained_seeds=5, table_seeds=5)
    status = {c.name: c.passed for c in result.checks}
    assert not status["ghz-correlations"]
    assert not status["switch-data-conditions"]
    assert not status["possibilistic-infeasibility"]
    assert status["operator-identities"] and status["causal-fraction"] and status["property-suites"]
    assert result.exit_code == 1


def test_console_script_module_entry():
    proc = subprocess.run([sys.executable, "-m", "switchlab.cli", "chained", "--n", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "BC=3.500000000" in proc.stdout
