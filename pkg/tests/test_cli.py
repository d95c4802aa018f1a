import csv
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from refugia.cli import main


def run(capsys, *args) -> tuple[int, str]:
    rc = main(list(args))
    out = capsys.readouterr().out
    return rc, out


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestBasicCommands:
    def test_equilibrium_prints_reference_point(self, capsys):
        rc, out = run(capsys, "equilibrium")
        assert rc == 0
        assert "253.905" in out and "97.886" in out

    def test_critical_case2(self, capsys):
        rc, out = run(capsys, "critical", "--case", "2")
        assert rc == 0
        assert "1.2345" in out and "0.21755" in out

    def test_critical_case3_uses_fixed_tau2(self, capsys, tmp_path):
        out_csv = tmp_path / "case3.csv"
        rc, out = run(capsys, "critical", "--case", "3", "--tau2", "0.18",
                      "--out", str(out_csv))
        assert rc == 0
        rows = read_csv(out_csv)
        assert {"omega", "tau_critical", "branch_index", "transversality_sign"} \
            == set(rows[0])
        omegas = sorted({float(r["omega"]) for r in rows})
        assert omegas[0] == pytest.approx(1.1095, abs=1e-3)

    def test_hopf_reports_supercritical(self, capsys):
        rc, out = run(capsys, "hopf", "--tau2-fixed", "0.18")
        assert rc == 0
        assert "supercritical" in out and "stable" in out and "increasing" in out

    def test_entry_point_subprocess(self):
        r = subprocess.run([sys.executable, "-m", "refugia.cli", "critical", "--case", "4"],
                           capture_output=True, text=True)
        assert r.returncode == 0
        assert "1.6095" in r.stdout


class TestExitCodes:
    def test_unknown_flag_is_config_error(self, capsys):
        assert run(capsys, "simulate", "--frobnicate", "1")[0] == 2

    def test_bad_value_is_config_error(self, capsys):
        assert run(capsys, "equilibrium", "--r", "-3")[0] == 2

    def test_infeasible_is_numerical_error(self, capsys):
        assert run(capsys, "equilibrium", "--m", "0.9")[0] == 3

    def test_step_guard_is_config_error(self, capsys):
        assert run(capsys, "simulate", "--tau1", "0.01", "--step", "0.005",
                   "--horizon", "1")[0] == 2


class TestConfigFile:
    def test_round_trip(self, capsys, tmp_path):
        c1 = tmp_path / "c1.json"
        c2 = tmp_path / "c2.json"
        rc, _ = run(capsys, "simulate", "--tau2", "0.31", "--horizon", "12",
                    "--dump-config", str(c1))
        assert rc == 0
        cfg1 = json.loads(c1.read_text())
        assert cfg1["tau2"] == 0.31 and cfg1["horizon"] == 12.0
        rc, _ = run(capsys, "simulate", "--config", str(c1), "--dump-config", str(c2))
        assert rc == 0
        assert cfg1 == json.loads(c2.read_text())

    def test_flags_override_file(self, capsys, tmp_path):
        c = tmp_path / "c.json"
        c.write_text(json.dumps({"horizon": 12.0, "tau2": 0.31}))
        dump = tmp_path / "d.json"
        rc, _ = run(capsys, "simulate", "--config", str(c), "--horizon", "7",
                    "--dump-config", str(dump))
        assert rc == 0
        resolved = json.loads(dump.read_text())
        assert resolved["horizon"] == 7.0 and resolved["tau2"] == 0.31

    def test_unknown_key_rejected(self, capsys, tmp_path):
        c = tmp_path / "c.json"
        c.write_text(json.dumps({"no_such_key": 1}))
        rc, _ = run(capsys, "simulate", "--config", str(c))
        assert rc == 2


class TestCsvOutputs:
    def test_simulate_schema_and_precision(self, capsys, tmp_path):
        out = tmp_path / "sim.csv"
        rc, _ = run(capsys, "simulate", "--horizon", "2", "--step", "0.01",
                    "--out", str(out))
        assert rc == 0
        rows = read_csv(out)
        assert list(rows[0]) == ["t", "x", "y"]
        assert len(rows) == 201
        # 17 significant digits round-trip the doubles exactly
        assert float(rows[5]["x"]) == float(format(float(rows[5]["x"]), ".17g"))

    def test_simulate_order_reduction_through_cli(self, capsys, tmp_path):
        # endpoint errors vs a step/64 reference must drop ~16x per halving
        ends = {}
        for step in ("0.5", "0.25", "0.125", "0.015625"):
            out = tmp_path / f"sim{step}.csv"
            rc, _ = run(capsys, "simulate", "--tau1", "0", "--tau2", "0",
                        "--horizon", "1", "--step", step, "--out", str(out))
            assert rc == 0
            last = read_csv(out)[-1]
            ends[step] = np.array([float(last["x"]), float(last["y"])])
        ref = ends["0.015625"]
        e1 = np.linalg.norm(ends["0.5"] - ref)
        e2 = np.linalg.norm(ends["0.25"] - ref)
        e3 = np.linalg.norm(ends["0.125"] - ref)
        assert 8.0 <= e1 / e2 <= 40.0
        assert 8.0 <= e2 / e3 <= 40.0

    def test_lyapunov_csv(self, capsys, tmp_path):
        out = tmp_path / "lya.csv"
        rc, _ = run(capsys, "lyapunov", "--tau1", "0.7", "--tau2", "0.8",
                    "--n-exp", "2", "--window", "500", "--out", str(out))
        assert rc == 0
        rows = read_csv(out)
        assert list(rows[0]) == ["index", "exponent"]
        assert len(rows) == 2
        assert float(rows[0]["exponent"]) > 0

    def test_bifurcation_csv(self, capsys, tmp_path):
        out = tmp_path / "bif.csv"
        rc, _ = run(capsys, "bifurcation", "--tau1", "0.5", "--lo", "0.38",
                    "--hi", "0.42", "--n", "2", "--lyap-window", "400",
                    "--out", str(out))
        assert rc == 0
        rows = read_csv(out)
        assert list(rows[0]) == ["axis_value", "peak_y", "verdict", "clusters", "lle"]
        assert all(r["verdict"].startswith("Periodic") for r in rows)
        assert len(rows) > 100  # one row per peak

    def test_region_csv_with_curves(self, capsys, tmp_path):
        out = tmp_path / "reg.csv"
        rc, _ = run(capsys, "region", "--tau1-n", "2", "--tau2-n", "2",
                    "--tau1-hi", "0.1", "--tau2-hi", "0.1", "--lyap-window", "400",
                    "--out", str(out))
        assert rc == 0
        rows = read_csv(out)
        assert list(rows[0]) == ["tau1", "tau2", "verdict", "clusters", "lle"]
        assert len(rows) == 4
        curves = read_csv(tmp_path / "reg_curves.csv")
        assert list(curves[0]) == ["case", "tau1", "tau2"]
        assert {"II", "III", "IV", "V"} <= {r["case"] for r in curves}

    def test_refuge_csv(self, capsys, tmp_path):
        out = tmp_path / "ref.csv"
        rc, printed = run(capsys, "refuge", "--lo", "0.4", "--hi", "0.5", "--n", "3",
                          "--out", str(out))
        assert rc == 0
        rows = read_csv(out)
        assert [r["feasible"] for r in rows] == ["True"] * 3
        assert "trend" in printed


@pytest.mark.parametrize("n", list(range(1, 11)))
def test_every_figure_completes(n, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    rc, out = run(capsys, "figure", str(n), "--out-dir", str(tmp_path / f"fig{n}"))
    assert rc == 0
    files = os.listdir(tmp_path / f"fig{n}")
    assert any(f.endswith(".csv") for f in files)
    assert f"fig{n}_plot.py" in files
    # the emitted plot script is valid standalone Python
    src = (tmp_path / f"fig{n}" / f"fig{n}_plot.py").read_text()
    compile(src, f"fig{n}_plot.py", "exec")
