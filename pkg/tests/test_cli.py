import math
import os
import subprocess
import sys

import pytest

from floquet_perron.cli import run
from floquet_perron.schema import read_summary, read_table

K1 = """schema_version: 1
kind: cellcycle
period: 1.0
phases:
  - {apoptosis: 0.0, transition: 1.0}
"""

K0 = """kind: cellcycle
period: 1.0
phases:
  - {apoptosis: 0.0, transition: 0.0}
"""

ODE_CONST = """kind: ode
period: 1.0
matrix: [[-1.0, 2.0], [0.5, 0.0]]
"""

ODE_NEG = """kind: ode
period: 1.0
matrix: [[-1, 2], [{form: cosine, offset: 0.5, amplitude: 0.9}, 0]]
"""

NO_PERIOD = """kind: ode
matrix: [[1.0]]
"""

TWO_CYCLE = """kind: discrete
period: 2
matrices:
  - [[0, 1], [1, 0]]
  - [[0, 4], [1, 0]]
"""

# counter-phase switching: monodromy [[1,2],[2,5]], lambda_per = log(3 + sqrt 8) < 2 = arithmetic lambda_s
COUNTER = """kind: ode
period: 1.0
matrix:
  - [0, {form: square, low: 0, high: 4, duty: 0.5, phase: 0.0}]
  - [{form: square, low: 0, high: 4, duty: 0.5, phase: 0.5}, 0]
"""

SQUARE = """kind: cellcycle
period: 1.0
phases:
  - {apoptosis: 0.0, transition: {form: square, low: 1.0, high: 4.0, duty: 0.5}}
"""


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, text in {"k1": K1, "k0": K0, "ode": ODE_CONST, "neg": ODE_NEG, "noperiod": NO_PERIOD,
                       "cycle": TWO_CYCLE, "square": SQUARE, "counter": COUNTER}.items():
        p = tmp_path / f"{name}.yaml"
        p.write_text(text)
        out[name] = str(p)
    return out


def sweep_file(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


class TestEigen:
    def test_constant_cellcycle(self, files, tmp_path):
        out = tmp_path / "r.txt"
        assert run(["eigen", files["k1"], "-o", str(out)]) == 0
        rep = read_summary(out.read_text())
        assert float(rep["lambda_per"]) == pytest.approx(1.0, abs=2e-3)
        assert float(rep["lambda_s"]) == pytest.approx(1.0, abs=1e-8)
        assert rep["pass"] == "true"
        assert rep["env.tol_var"] == "FLOQUET_PERRON_TOL"
        assert rep["default.steps"] == "2048"

    def test_constant_ode(self, files, tmp_path):
        out = tmp_path / "r.txt"
        assert run(["eigen", files["ode"], "-o", str(out)]) == 0
        assert abs(float(read_summary(out.read_text())["gap"])) <= 1e-7

    def test_discrete_series(self, files, tmp_path):
        out, series = tmp_path / "r.txt", tmp_path / "s.csv"
        assert run(["eigen", files["cycle"], "-o", str(out), "--series", str(series)]) == 0
        rep = read_summary(out.read_text())
        assert float(rep["lambda_per"]) == pytest.approx(2.0, abs=1e-9)
        meta, header, rows = read_table(series.read_text())
        assert header == ["k", "x0", "x1"] and len(rows) == 3
        assert meta["kind"] == "discrete"

    def test_growth_curve_series(self, files, tmp_path):
        series = tmp_path / "g.csv"
        assert run(["eigen", files["k1"], "--dx", "0.01", "--warmup", "2", "--measure", "2",
                    "-o", str(tmp_path / "r.txt"), "--series", str(series)]) == 0
        _, header, rows = read_table(series.read_text())
        assert header == ["t", "log_mass"] and len(rows) == 400
        assert float(rows[-1][1]) / float(rows[-1][0]) == pytest.approx(1.0, abs=1e-2)

    def test_violation_exit_status(self, files, tmp_path):
        out = tmp_path / "r.txt"
        assert run(["eigen", files["counter"], "--scheme", "arithmetic", "-o", str(out)]) == 2
        rep = read_summary(out.read_text())
        assert float(rep["lambda_per"]) == pytest.approx(math.log(3 + math.sqrt(8)), abs=1e-9)
        assert float(rep["lambda_s"]) == pytest.approx(2.0, abs=1e-12)
        assert rep["pass"] == "false"
        assert run(["eigen", files["counter"], "-o", str(out)]) == 0

    def test_missing_period(self, files, capsys):
        assert run(["eigen", files["noperiod"]]) == 1
        assert "period" in capsys.readouterr().err

    def test_assumption_failure_is_an_error(self, files, capsys):
        assert run(["eigen", files["square"]]) == 1
        assert "as2_value" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert run(["eigen", str(tmp_path / "nope.yaml")]) == 1

    def test_bad_flag(self, files):
        assert run(["eigen", files["ode"], "--bogus"]) == 1


class TestValidate:
    def test_unit_rate(self, files, capsys):
        assert run(["validate", files["k1"]]) == 0
        out = dict(line.split(" = ") for line in capsys.readouterr().out.strip().splitlines())
        assert float(out["as2_value"]) == pytest.approx(1.0, abs=1e-5)

    def test_zero_rate(self, files, capsys):
        assert run(["validate", files["k0"]]) == 1
        captured = capsys.readouterr()
        assert "as2_value = 0.0" in captured.out
        assert "1/2" in captured.err

    def test_negative_entry_named(self, files, capsys):
        assert run(["validate", files["neg"]]) == 1
        assert "matrix[1][0]" in capsys.readouterr().err


class TestSweep:
    def test_ode_sweep_and_determinism(self, tmp_path):
        cfg = sweep_file(tmp_path, "s.yaml", "system: ode\nseed: 7\ntrials: 30\n")
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(["sweep", cfg, "-o", str(a)]) == 0
        assert run(["sweep", cfg, "-o", str(b), "--jobs", "2"]) == 0
        assert a.read_bytes() == b.read_bytes()
        meta, header, rows = read_table(a.read_text())
        assert header[:6] == ["trial", "digest", "lambda_per", "lambda_s", "gap", "pass"]
        assert len(rows) == 30
        assert float(meta["summary.min_gap"]) >= -1e-6
        assert meta["summary.violations"] == "0"
        assert meta["config.seed"] == "7"

    @pytest.fixture
    def always_violating(self, monkeypatch):
        from floquet_perron import lab
        from floquet_perron.comparison import Comparison

        monkeypatch.setattr(lab, "compare_model", lambda cfg, model: Comparison.of(0.0, 1.0, 1e-9))

    def test_paper_violation_status(self, tmp_path, always_violating):
        cfg = sweep_file(tmp_path, "s.yaml", "system: discrete\nseed: 1\ntrials: 5\n")
        out = tmp_path / "r.csv"
        assert run(["sweep", cfg, "-o", str(out)]) == 3
        meta, _, _ = read_table(out.read_text())
        assert meta["summary.violations"] == "5"
        assert len(meta["summary.violating_digests"].split()) == 5

    def test_non_paper_scheme_is_exploratory(self, tmp_path, always_violating):
        cfg = sweep_file(tmp_path, "s.yaml", "system: discrete\nseed: 1\ntrials: 5\nscheme: arithmetic\n")
        assert run(["sweep", cfg, "-o", str(tmp_path / "r.csv")]) == 0

    def test_zero_trials(self, tmp_path):
        cfg = sweep_file(tmp_path, "s.yaml", "system: ode\nseed: 7\ntrials: 0\n")
        assert run(["sweep", cfg]) == 1


def test_console_script(tmp_path, files):
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "floquet_perron", "validate", files["k0"]],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 1
    proc = subprocess.run([sys.executable, "-m", "floquet_perron", "eigen", files["ode"]],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    assert math.isfinite(float(read_summary(proc.stdout)["lambda_per"]))


CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


@pytest.mark.parametrize("name", ["ode_cosine.yaml", "discrete_cycle.yaml", "cellcycle_two_phase.yaml"])
def test_shipped_model_configs(name, tmp_path, capsys):
    path = os.path.join(CONFIG_DIR, name)
    assert run(["validate", path]) == 0
    out = tmp_path / "summary.txt"
    assert run(["eigen", path, "-o", str(out)]) == 0
    summary = read_summary(out.read_text())
    assert summary["pass"] == "true"
    assert float(summary["lambda_per"]) >= float(summary["lambda_s"]) - float(summary["tolerance"])


def test_shipped_sweep_config(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert run(["sweep", os.path.join(CONFIG_DIR, "sweep_ode.yaml"), "-o", str(out)]) == 0
    meta, header, rows = read_table(out.read_text())
    assert len(rows) == 200 and meta["summary.violations"] == "0"
