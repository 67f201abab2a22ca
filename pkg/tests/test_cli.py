import json

import pytest

from movda.cli import cli_main, fmt6, markdown_table
from movda.dataio import load_games, load_params


def run(*argv):
    return cli_main([str(a) for a in argv])


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    games = d / "games.csv"
    assert run("simulate", "--teams", 6, "--games", 4000, "--seed", 5, "--step-team", 1, "--out", games) == 0
    assert run("fit", "--data", games, "--out", d / "params.json") == 0
    return d


def test_simulate_is_reproducible(tmp_path):
    for name in ("a.csv", "b.csv"):
        assert run("simulate", "--teams", 4, "--games", 300, "--seed", 3, "--out", tmp_path / name) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert len(load_games(tmp_path / "a.csv")) == 300


def test_fit_writes_params(workdir):
    p = load_params(workdir / "params.json")
    assert 6 < p.alpha < 30 and p.sigma2 > 0


def test_replay_lambda_zero_matches_elo(workdir):
    common = ("--data", workdir / "games.csv", "--params", workdir / "params.json")
    assert run("replay", *common, "--model", "elo", "--out", workdir / "r_elo") == 0
    assert run("replay", *common, "--model", "movda", "--lambda", 0, "--out", workdir / "r_mov") == 0
    assert (workdir / "r_elo" / "log.csv").read_bytes() == (workdir / "r_mov" / "log.csv").read_bytes()
    assert (workdir / "r_elo" / "history.csv").read_bytes() == (workdir / "r_mov" / "history.csv").read_bytes()


def test_replay_is_byte_identical_across_runs(workdir):
    common = ("--data", workdir / "games.csv", "--params", workdir / "params.json", "--model", "movda", "--lambda", 0.5)
    assert run("replay", *common, "--out", workdir / "x1") == 0
    assert run("replay", *common, "--out", workdir / "x2") == 0
    for f in ("report.json", "log.csv", "history.csv"):
        assert (workdir / "x1" / f).read_bytes() == (workdir / "x2" / f).read_bytes()


def test_evaluate_reports_all_models(workdir, capsys):
    rc = run(
        "evaluate", "--data", workdir / "games.csv", "--params", workdir / "params.json",
        "--stable-window", 50, "--band", 40, "--out", workdir / "ev",
    )
    assert rc == 0
    payload = json.loads((workdir / "ev" / "comparison.json").read_text())
    assert set(payload["models"]) == {"elo", "linear-mov", "glicko2", "trueskill", "movda"}
    for entry in payload["models"].values():
        for value in entry["report"].values():
            assert value is not None
    table = (workdir / "ev" / "comparison.md").read_text().splitlines()
    assert len(table) == 2 + 5
    assert "Brier" in table[0]


def test_tune_then_replay_with_config(workdir):
    out = workdir / "tune.json"
    rc = run(
        "tune", "--data", workdir / "games.csv", "--params", workdir / "params.json",
        "--model", "movda", "--grid", '{"lambda": [0, 0.5, 1]}', "--out", out, "--table", workdir / "grid.csv",
    )
    assert rc == 0
    result = json.loads(out.read_text())
    assert result["config"]["lam"] in (0, 0.5, 1)
    assert len((workdir / "grid.csv").read_text().splitlines()) == 4
    assert run(
        "replay", "--data", workdir / "games.csv", "--params", workdir / "params.json",
        "--model", "movda", "--config", out, "--out", workdir / "tuned",
    ) == 0


def test_ablate(workdir):
    rc = run(
        "ablate", "--data", workdir / "games.csv", "--params", workdir / "params.json",
        "--lambda", 0.5, "--out", workdir / "ab",
    )
    assert rc == 0
    ab = json.loads((workdir / "ab" / "ablation.json").read_text())
    assert ab["no-differential"]["lambda"] == 0 and ab["full"]["lambda"] == 0.5


def test_plot_data_uses_fitted_params(workdir):
    out = workdir / "plots"
    assert run("plot-data", "--data", workdir / "games.csv", "--params", workdir / "params.json", "--out", out) == 0
    data = json.loads((out / "plot_data.json").read_text())
    p = load_params(workdir / "params.json")
    assert data["fit"]["params"]["alpha"] == p.alpha
    for name in ("fit_bins.csv", "fit_curve.csv", "hist_home.csv", "hist_away.csv"):
        assert (out / name).stat().st_size > 0


def test_run_config_file(workdir):
    rc_file = workdir / "run.cfg"
    rc_file.write_text("model = elo\nK = 12\n")
    assert run(
        "replay", "--data", workdir / "games.csv", "--run-config", rc_file, "--k", 14, "--out", workdir / "rc"
    ) == 0
    report = json.loads((workdir / "rc" / "report.json").read_text())
    assert report["n_games"] > 0


def test_usage_and_runtime_errors(workdir, tmp_path, capsys):
    assert run("frobnicate") == 2
    assert run("replay", "--data", workdir / "games.csv") == 2
    assert run("replay", "--data", tmp_path / "missing.csv", "--model", "elo", "--out", tmp_path) == 1
    assert "error" in capsys.readouterr().err
    assert run("replay", "--data", workdir / "games.csv", "--model", "movda", "--out", tmp_path) == 1


def test_formatting_helpers():
    assert fmt6(0.2274123456) == "0.227412"
    assert fmt6(None) == "n/a"
    assert markdown_table(("a", "b"), [(1, 2.5)]) == "| a | b |\n|---|---|\n| 1 | 2.5 |\n"
