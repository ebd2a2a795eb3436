import json
import subprocess
import sys
from pathlib import Path

import pytest

from oqsim.cli import main

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def test_run_to_stdout(capsys):
    assert main(["run", str(SCENARIOS / "thermal_decay.json"), "--solver", "es"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("t,")
    assert len(out) > 2


def test_run_to_file_writes_sidecar(tmp_path, capsys):
    out = tmp_path / "decay.csv"
    rc = main(["run", str(SCENARIOS / "thermal_decay.json"), "--out", str(out),
               "--set", "kappa=1.5"])
    assert rc == 0
    assert "wrote" in capsys.readouterr().err
    meta = json.loads((tmp_path / "decay.csv.meta.json").read_text())
    assert meta["params"]["kappa"] == 1.5


def test_unknown_demo_exits_2(capsys):
    assert main(["demo", "nope"]) == 2
    err = capsys.readouterr().err
    assert err.startswith("oqsim: error:") and "iswap" in err


@pytest.mark.parametrize("argv", [
    ["bench", "coupled-oscillators", "--dims", "3,x"],
    ["bench", "coupled-oscillators", "--dims", "0"],
    ["bench", "mystery"],
    ["run", str(SCENARIOS / "thermal_decay.json"), "--set", "kappa"],
])
def test_bad_arguments_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "oqsim: error:" in capsys.readouterr().err


def test_missing_file_exits_1(tmp_path, capsys):
    assert main(["run", str(tmp_path / "absent.json")]) == 1
    assert capsys.readouterr().err.startswith("oqsim: ")


def test_solver_error_is_reported(tmp_path, capsys):
    spec = json.loads((SCENARIOS / "thermal_decay.json").read_text())
    spec["initial"] = "fock_dm(N, 1)"
    path = tmp_path / "dm.json"
    path.write_text(json.dumps(spec))
    assert main(["run", str(path), "--solver", "mc", "--ntraj", "2"]) == 1
    assert "ScenarioError" in capsys.readouterr().err


def test_bench_tiny_point(tmp_path, capsys):
    out = tmp_path / "b.json"
    assert main(["bench", "coupled-oscillators", "--dims", "2", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report == json.loads(capsys.readouterr().out)
    assert [p["size"] for p in report["points"]] == [2]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "oqsim", "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "run" in proc.stdout and "bench" in proc.stdout
