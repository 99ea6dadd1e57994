import json

import numpy as np
import pytest

from onebitcs import cli
from onebitcs.checks import CheckResult
from onebitcs.sensing import NoiseModel, SignalSpec, generate_signal, sense


@pytest.fixture
def ens_file(tmp_path):
    x = generate_signal(SignalSpec(40, 3, seed=1))
    e = sense(x, 200, NoiseModel(), seed=2)
    p = tmp_path / "ens.npz"
    np.savez(p, U=e.U, y=e.y)
    return str(p)


def test_solve_vector(tmp_path, capsys):
    p = tmp_path / "v.txt"
    p.write_text("0.05 0.5\n")
    assert cli.main(["solve", str(p), "--penalty", "mcp", "--lam", "0.1", "--b", "3"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["status"] == "certified" and out["mu"] == pytest.approx(0.5)
    np.testing.assert_allclose(out["x"], [0, 1], atol=1e-12)


def test_solve_ensemble_and_sorted(ens_file, capsys):
    assert cli.main(["solve", ens_file, "--penalty", "sorted_l1", "--lam", "0.1", "--n1", "5"]) == 0
    assert json.loads(capsys.readouterr().out)["status"] == "certified"


def test_solve_input_errors(tmp_path, capsys):
    p = tmp_path / "v.npy"
    np.save(p, np.array([0.1, 0.2]))
    assert cli.main(["solve", str(p), "--penalty", "mcp", "--lam", "0.1"]) == 2
    assert cli.main(["solve", str(tmp_path / "nope.npy"), "--penalty", "l1", "--lam", "0.1"]) == 2
    assert cli.main(["solve", str(p), "--penalty", "l1", "--lam", "-1"]) == 2
    assert "config error" in capsys.readouterr().err


def test_cv(ens_file, capsys):
    assert cli.main(["cv", ens_file, "--method", "l0", "--folds", "5", "--lambdas", "0.01", "0.1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["lambda"] in (0.01, 0.1) and 0 <= out["consistency"] <= 1
    assert cli.main(["cv", ens_file, "--method", "l0", "--folds", "500"]) == 2


def test_sweep(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("n: 30\nm: [60, 90]\nk: 2\ntrials: 1\nfolds: 3\nmethods: [passive, l0]\n")
    assert cli.main(["sweep", str(cfg), "--output-dir", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "trials.csv").read_text().startswith("sweep_var,sweep_value,method")
    assert cli.main(["sweep", str(cfg)]) == 0
    assert "mean_snr_db" in capsys.readouterr().out
    cfg.write_text("n: 30\ncolour: blue\n")
    assert cli.main(["sweep", str(cfg), "--output-dir", str(tmp_path / "p")]) == 2
    assert "colour" in capsys.readouterr().err
    assert not (tmp_path / "p").exists()


def test_sweep_certification_failure_exits_3(tmp_path, monkeypatch, capsys):
    from onebitcs import experiment
    from onebitcs.dual import DualSolution, Status

    def broken(pen, v, cfg=None):
        return DualSolution(x=np.zeros_like(v), mu=0.0, status=Status.INTERNAL_ERROR, gap=np.nan)

    monkeypatch.setattr(experiment, "solve", broken)
    cfg = tmp_path / "c.yaml"
    cfg.write_text("n: 30\nm: 60\nk: 2\ntrials: 1\nmethods: [passive]\nparam_mode: ideal\n")
    assert cli.main(["sweep", str(cfg), "--output-dir", str(tmp_path / "o")]) == 3
    assert not (tmp_path / "o").exists()


def test_timing(tmp_path):
    out = tmp_path / "t.csv"
    assert cli.main(["timing", "--pairs", "50x80", "--trials", "2", "--repeats", "2", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "m,n,method,mean_ms,sd_ms,median_ms,trials" and len(lines) == 4
    assert cli.main(["timing", "--pairs", "50by80"]) == 2


def test_oracle_check_exit_codes(monkeypatch, capsys):
    from onebitcs import checks

    assert cli.main(["oracle-check", "--instances", "5"]) == 0
    assert capsys.readouterr().out.count("PASS") == len(checks.SUITES)
    monkeypatch.setattr(checks, "run_all", lambda **kw: [CheckResult("x", False, "d")])
    assert cli.main(["oracle-check"]) == 1
    monkeypatch.setattr(checks, "run_all", lambda **kw: [CheckResult("x", False, "d", certification=True)])
    assert cli.main(["oracle-check"]) == 3


def test_bad_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as e:
        cli.main(["frobnicate"])
    assert e.value.code == 2
