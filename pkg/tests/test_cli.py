import csv
import json
import math
import re

import numpy as np
import pytest
from click.testing import CliRunner

from fracmech.cli import ConfigError, main, read_config

CLASSICAL = """\
# classical limit
m_alpha = 1
k = 1
charge = 0
field_E = 0
alpha = 1
a = 0
b = 1
e0 = 1
e1 = 0
"""


@pytest.fixture
def run(tmp_path):
    runner = CliRunner()

    def _run(*args, env=None):
        return runner.invoke(main, ["--out", str(tmp_path / "out"), *args], env=env)

    return _run


def _config(tmp_path, text, name="cfg.txt"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _with(text, key, value):
    return re.sub(rf"^{key} = .*$", f"{key} = {value}", text, flags=re.M)


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestConfig:
    def test_comments_and_blanks(self, tmp_path):
        cfg = read_config(_config(tmp_path, "# c\n\na = 1  # trailing\nb=x\n"))
        assert cfg == {"a": "1", "b": "x"}

    @pytest.mark.parametrize("text", ["a = 1\na = 2\n", "just words\n"])
    def test_malformed(self, tmp_path, text):
        with pytest.raises(ConfigError):
            read_config(_config(tmp_path, text))


class TestFrac:
    def test_power_with_oracle(self, run, tmp_path):
        res = run("frac", "rl-int-left", "1*(t-a)^2", "0.5", "0:1:1024", "--oracle")
        assert res.exit_code == 0, res.output
        rows = _rows(tmp_path / "out" / "frac.csv")
        assert list(rows[0]) == ["t", "value", "oracle"]
        assert len(rows) == 1025
        v = np.array([float(r["value"]) for r in rows])
        o = np.array([float(r["oracle"]) for r in rows])
        assert np.max(np.abs(v - o)[52:-52] / np.abs(o)[52:-52]) <= 1e-3

    def test_right_integral_of_constant(self, run, tmp_path):
        res = run("frac", "rl-int-right", "2*(b-t)^0", "1", "0:1:8")
        assert res.exit_code == 0, res.output
        rows = _rows(tmp_path / "out" / "frac.csv")
        for r in rows:
            assert float(r["value"]) == pytest.approx(2 * (1 - float(r["t"])), abs=1e-12)

    def test_complex_output(self, run, tmp_path):
        res = run("frac", "rl-int-left", "1j*(t-a)^1", "0.5", "0:1:16")
        assert res.exit_code == 0, res.output
        assert list(_rows(tmp_path / "out" / "frac.csv")[0]) == ["t", "value_re", "value_im"]

    def test_csv_input(self, run, tmp_path):
        t = np.linspace(0, 1, 17)
        src = tmp_path / "f.csv"
        np.savetxt(src, np.c_[t, t], delimiter=",", header="t,value", comments="")
        res = run("frac", "rl-int-left", str(src), "1", "0:1:16")
        assert res.exit_code == 0, res.output
        last = _rows(tmp_path / "out" / "frac.csv")[-1]
        assert float(last["value"]) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("args", [
        ("caputo-left", "1*(t-a)^2", "0.5", "0:1"),
        ("caputo-left", "1*(t-a)^2", "1.5", "0:1:8"),
        ("caputo-left", "sin(t)", "0.5", "0:1:8"),
        ("caputo-left", "1*(t-a)^0.5j", "0.5", "0:1:8"),
    ])
    def test_config_errors(self, run, args):
        assert run("frac", *args).exit_code == 2

    def test_csv_oracle_rejected(self, run, tmp_path):
        src = tmp_path / "f.csv"
        np.savetxt(src, np.c_[np.zeros(9)], header="value", comments="")
        assert run("frac", "rl-int-left", str(src), "0.5", "0:1:8", "--oracle").exit_code == 2

    def test_negative_exponent_is_domain(self, run):
        assert run("frac", "rl-int-left", "1*(t-a)^-1.5", "0.5", "0:1:8").exit_code == 3


class TestOscillator:
    def test_classical_limit(self, run, tmp_path):
        res = run("oscillator", _config(tmp_path, CLASSICAL))
        assert res.exit_code == 0, res.output
        rep = json.loads((tmp_path / "out" / "report.json").read_text())
        assert rep["status"] == "ok"
        assert rep["contraction_estimate"] == pytest.approx(1.0)
        rows = _rows(tmp_path / "out" / "trajectory.csv")
        assert len(rows) == 1025
        t = np.array([float(r["t"]) for r in rows])
        x = np.array([float(r["x"]) for r in rows])
        assert np.max(np.abs(x - (np.cos(t) + math.tan(1) * np.sin(t)))) <= 1e-3

    def test_free_particle_single_iteration(self, run, tmp_path):
        res = run("oscillator", _config(tmp_path, _with(CLASSICAL, "k", "0")))
        assert res.exit_code == 0, res.output
        assert json.loads((tmp_path / "out" / "report.json").read_text())["iterations"] == 1

    def test_non_contractive(self, run, tmp_path):
        text = _with(CLASSICAL, "alpha", "0.8") + "n = 256\n"
        res = run("oscillator", _config(tmp_path, text))
        assert res.exit_code == 4
        rep = json.loads((tmp_path / "out" / "report.json").read_text())
        assert rep["status"] == "non-contractive"
        assert rep["contraction_estimate"] == pytest.approx(1 / math.gamma(1.8) ** 2, abs=1e-3)

    def test_iteration_cap(self, run, tmp_path):
        res = run("oscillator", _config(tmp_path, CLASSICAL + "max_iter = 2\n"))
        assert res.exit_code == 5
        rep = json.loads((tmp_path / "out" / "report.json").read_text())
        assert rep["status"] == "max-iter"

    @pytest.mark.parametrize("text", [
        _with(CLASSICAL, "k", "one"),
        CLASSICAL + "bogus = 3\n",
        _with(CLASSICAL, "alpha", "0"),
        CLASSICAL.replace("m_alpha = 1\n", ""),
    ])
    def test_bad_config(self, run, tmp_path, text):
        res = run("oscillator", _config(tmp_path, text))
        assert res.exit_code == 2

    def test_missing_file(self, run, tmp_path):
        assert run("oscillator", str(tmp_path / "nope.txt")).exit_code == 2


class TestBracket:
    def test_fundamental(self, run):
        res = run("bracket", "p_alpha", "q")
        assert res.exit_code == 0
        assert res.output.strip() == "-1"

    def test_zero(self, run):
        assert run("bracket", "q", "q").output.strip() == "0"

    def test_axioms(self, run):
        res = run("bracket", "--check-axioms", "--trials", "20", "--seed", "7")
        assert res.exit_code == 0
        lines = res.output.strip().splitlines()
        assert len(lines) == 7 and all(line.startswith("PASS ") for line in lines)

    def test_parse_error(self, run):
        assert run("bracket", "q +", "q").exit_code == 2
        assert run("bracket", "q").exit_code == 2


class TestVerifyHJ:
    def test_defaults(self, run, tmp_path):
        res = run("verify-hj", "--samples", "20")
        assert res.exit_code == 0, res.output
        rows = _rows(tmp_path / "out" / "hj.csv")
        assert len(rows) == 20
        assert max(abs(float(r["hj_residual"])) for r in rows) <= 1e-12
        assert max(float(r["wave_relative"]) for r in rows) <= 1e-6

    def test_classical_reduction(self, run, tmp_path):
        cfg = _config(tmp_path, "hbar = 0\namplitude = linear\n")
        res = run("verify-hj", cfg, "--samples", "5")
        assert res.exit_code == 0, res.output
        rows = _rows(tmp_path / "out" / "hj.csv")
        assert all(r["wave_re"] == "nan" for r in rows)

    def test_linear_amplitude_fails_threshold(self, run, tmp_path):
        cfg = _config(tmp_path, "amplitude = linear\n")
        assert run("verify-hj", cfg, "--samples", "5").exit_code == 1

    def test_empty_domain(self, run, tmp_path):
        cfg = _config(tmp_path, "beta_sep = -5\ncharge = 0\n")
        assert run("verify-hj", cfg).exit_code == 3

    def test_bad_value(self, run, tmp_path):
        assert run("verify-hj", _config(tmp_path, "hbar = -1\n")).exit_code == 2
        assert run("verify-hj", _config(tmp_path, "amplitude = cubic\n")).exit_code == 2


class TestDeterminism:
    def test_verify_hj_bytes(self, tmp_path):
        runner = CliRunner()
        outs = []
        for name in ("a", "b"):
            res = runner.invoke(main, ["verify-hj", "--samples", "10", "--seed", "3", "--out", str(tmp_path / name)])
            assert res.exit_code == 0
            outs.append((tmp_path / name / "hj.csv").read_bytes())
        assert outs[0] == outs[1]
        assert b"\r\n" not in outs[0]

    def test_seed_changes_samples(self, tmp_path):
        runner = CliRunner()
        for seed in ("1", "2"):
            runner.invoke(main, ["--seed", seed, "--out", str(tmp_path / seed), "verify-hj", "--samples", "3"])
        assert (tmp_path / "1" / "hj.csv").read_bytes() != (tmp_path / "2" / "hj.csv").read_bytes()

    def test_thread_cap(self, run, tmp_path):
        res = run("bracket", "q", "p_alpha", env={"FRACMECH_THREADS": "1"})
        assert res.exit_code == 0
        assert run("bracket", "q", "p_alpha", env={"FRACMECH_THREADS": "zero"}).exit_code == 2

    def test_quiet(self, run, tmp_path):
        res = run("--quiet", "verify-hj", "--samples", "2")
        assert res.output == ""
