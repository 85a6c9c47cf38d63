import json
import subprocess
import sys

import pytest

from dcsbm.cli import main


def run(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "dcsbm", *map(str, args)],
                          capture_output=True, text=True, cwd=cwd)


@pytest.fixture
def planted(tmp_path):
    assert main(["generate", "--n", "7", "--k0", "2", "--seed", "5",
                 "--out", str(tmp_path / "x.txt"),
                 "--labels-out", str(tmp_path / "z.json"),
                 "--params-out", str(tmp_path / "p.json")]) == 0
    return tmp_path


def test_generate_writes_files(planted):
    text = (planted / "x.txt").read_text()
    assert text.splitlines()[0] == "7"
    z = json.loads((planted / "z.json").read_text())
    assert z["k"] == 2 and len(z["z"]) == 7


def test_generate_from_params(planted, capsys):
    args = ["generate", "--n", "7", "--params", str(planted / "p.json"), "--seed", "1"]
    assert main(args + ["--labels", str(planted / "z.json")]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "7"
    # stored weights belong to one labelling, so it must come along
    assert main(args) != 0
    assert main(["generate", "--n", "5", "--params", str(planted / "p.json"),
                 "--labels", str(planted / "z.json")]) != 0


def test_stats_and_loglik(planted, capsys):
    assert main(["stats", str(planted / "x.txt"), "--labels", str(planted / "z.json")]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert sum(stats["n_a"]) == 7
    assert main(["loglik", str(planted / "x.txt"), "--labels", str(planted / "z.json"),
                 "--params", str(planted / "p.json")]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["log_joint"] <= out["log_profile_sup"] + 1e-9


def test_marginal_and_select(planted, capsys):
    assert main(["marginal", str(planted / "x.txt"), "--k", "2"]) == 0
    exact = json.loads(capsys.readouterr().out)["log_p"]
    assert main(["marginal", str(planted / "x.txt"), "--k", "2", "--backend", "bracket",
                 "--strategy", "exhaustive"]) == 0
    br = json.loads(capsys.readouterr().out)
    assert br["lower"] - 1e-9 <= exact <= br["upper"] + 1e-9
    assert main(["select", str(planted / "x.txt"), "--k-max", "3"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["k_hat"] in (1, 2, 3) and len(report["rows"]) == 3


def test_check_quick(capsys):
    assert main(["check", "--quick"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_errors_exit_nonzero(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("2\n1 0 1\n")
    (tmp_path / "z.json").write_text('{"z": [0, 0], "k": 1}')
    res = run("stats", bad, "--labels", tmp_path / "z.json")
    assert res.returncode != 0
    assert "line 2" in res.stderr and res.stdout == ""
    res = run("marginal", bad, "--k", "2")
    assert res.returncode != 0


def test_budget_flag(planted):
    res = run("marginal", planted / "x.txt", "--k", "3", "--budget", "10")
    assert res.returncode != 0 and "budget" in res.stderr


def test_experiment_subcommand(tmp_path):
    cfg = {"k0": 2, "pi": [0.5, 0.5], "lambda_tilde": [[4, 1], [1, 4]],
           "n_grid": [10], "trials": 2, "restarts": 2}
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))
    assert main(["experiment", str(tmp_path / "cfg.json"), "--out", str(tmp_path / "r.csv"),
                 "--summary", str(tmp_path / "s.csv")]) == 0
    rows = (tmp_path / "r.csv").read_text().splitlines()
    assert len(rows) == 3
    assert (tmp_path / "s.csv").read_text().startswith("n,accuracy\n10,")
