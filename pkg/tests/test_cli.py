import csv
import math
import subprocess
import sys

import pytest

from ancilla_thermo.cli import PRESETS, TRAJ_HEADER, main
from ancilla_thermo.model import PARAM_NAMES


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def read_manifest(path):
    return dict(line.rstrip("\n").split("=", 1) for line in open(path))


def test_single_point_sweep(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["steady-sweep", "--sweep", "omega_a:1:1:1", "--sweep", "jx:1:1:1", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert len(rows) == 1
    r = rows[0]
    assert float(r["mutual_info"]) <= 1e-8
    assert math.isclose(float(r["beta_eff_s"]), math.log(10) / 2, rel_tol=1e-8)
    m = read_manifest(str(out) + ".manifest")
    assert m["rows"] == "1" and m["sweep0.param"] == "omega_a" and m["sweep1.param"] == "j_x"
    assert all(f"param.{k}" in m for k in PARAM_NAMES)


def test_log_base_conversion(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["steady-sweep", "--sweep", "omega_a:1.5:1.5:1", "--sweep", "jx:0.4:0.4:1"]
    main(args + ["--out", str(a)])
    main(args + ["--out", str(b), "--log-base", "e"])
    ra, rb = read_csv(a)[0], read_csv(b)[0]
    assert math.isclose(float(rb["mutual_info"]), float(ra["mutual_info"]) * math.log(2), rel_tol=1e-12)


@pytest.mark.parametrize(
    "args",
    [
        ["steady-sweep", "--sweep", "temperature:0:1:3"],
        ["steady-sweep", "--sweep", "jx:0:1"],
        ["steady-sweep", "--gamma", "-1"],
        ["trajectory", "--state-s", "bogus"],
        ["trajectory", "--t-max", "0"],
    ],
)
def test_configuration_errors_exit_2(args, capsys):
    assert main(args) == 2
    assert "configuration error" in capsys.readouterr().err


def test_trajectory_csv_and_manifest(tmp_path):
    out = tmp_path / "t.csv"
    args = ["trajectory", "--preset", "fig4", "--t-max", "2", "--steps", "40", "--t-fine", "0.1",
            "--dt-fine", "0.01", "--out", str(out)]
    assert main(args) == 0
    with open(out) as fh:
        assert next(csv.reader(fh)) == TRAJ_HEADER
    rows = read_csv(out)
    assert float(rows[0]["t"]) == 0.0 and math.isclose(float(rows[-1]["t"]), 2.0)
    m = read_manifest(str(out) + ".manifest")
    for key in ("preset", "state_s", "state_a", "pair_s", "grid.points", "param.gamma", "tol.integrator_rtol",
                "thermodynamic_reference"):
        assert key in m
    assert m["preset"] == "fig4" and float(m["param.gamma"]) == PRESETS["fig4"]["params"]["gamma"]
    first = out.read_text()
    assert main(args) == 0
    assert out.read_text() == first


def test_workers_do_not_change_rows(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["steady-sweep", "--sweep", "omega_a:0.5:2:4", "--sweep", "jx:0:2:5"]
    main(args + ["--out", str(a)])
    main(args + ["--out", str(b), "--workers", "2"])
    assert a.read_text() == b.read_text()


def test_validate_default_passes(capsys):
    assert main(["validate"]) == 0
    text = capsys.readouterr().out
    assert "FAIL" not in text and text.strip().endswith("overall: PASS")


def test_validate_negative_control_fails(capsys):
    assert main(["validate", "--corrupt-lambda", "0.05"]) == 1
    assert "lambda_reduced_dynamics: FAIL" in capsys.readouterr().out


def test_validate_refuses_degenerate_delta(capsys):
    # eta = gamma + Gamma = 8 = J = 8 j_x
    assert main(["validate", "--gamma", "7", "--Gamma", "1", "--jx", "1", "--jy", "1"]) == 0
    assert "REFUSED" in capsys.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ancilla_thermo", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "steady-sweep" in res.stdout
