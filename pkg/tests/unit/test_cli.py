import json
import re
from pathlib import Path

import click
import pandas as pd
import pytest
from click.testing import CliRunner

from globtherm import exceptions, tables
from globtherm.cli import Obj, cli
from globtherm.cli.util import Command, load_config
from globtherm.ctx import Context
from globtherm.types import ModelName


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner(mix_stderr=False)


@pytest.fixture
def obj(ctx: Context) -> Obj:
    return Obj(context=ctx)


@click.command(cls=Command)
@click.argument("error")
@click.option("--count", type=int)
@click.pass_context
def cmd(ctx: click.Context, error: str, count: int) -> None:
    if error == "invalid":
        raise exceptions.InvalidParameter("negative temperature")
    if error == "numerical":
        raise exceptions.PosteriorUnderflow("posterior density vanishes")
    if error == "runtimeerror":
        raise RuntimeError("oups")
    if error == "exit":
        ctx.exit(1)


@pytest.mark.parametrize(
    "logpath_exists", [False, True], ids=lambda v: f"logpath_exists:{v}"
)
def test_command_error(runner: CliRunner, obj: Obj, logpath_exists: bool) -> None:
    logpath = obj.ctx.settings.logpath
    if logpath_exists:
        logpath.mkdir()
    result = runner.invoke(cmd, ["invalid"], obj=obj)
    assert result.exit_code == 1
    assert result.stderr == "Error: negative temperature\n"
    assert not list(logpath.glob("*.log"))
    if logpath_exists:
        assert logpath.exists()
    else:
        assert not logpath.exists()


def test_command_numerical_error(runner: CliRunner, obj: Obj) -> None:
    result = runner.invoke(cmd, ["numerical"], obj=obj)
    assert result.exit_code == 2
    assert result.stderr == "Error: posterior density vanishes\n"


def test_command_usage_error(runner: CliRunner, obj: Obj) -> None:
    result = runner.invoke(cmd, ["invalid", "--count", "abc"], obj=obj)
    assert result.exit_code == 1
    assert "Invalid value for '--count'" in result.stderr


def test_command_exit(runner: CliRunner, obj: Obj) -> None:
    result = runner.invoke(cmd, ["exit"], obj=obj)
    assert result.exit_code == 1
    assert not result.stdout
    logpath = obj.ctx.settings.logpath
    assert not list(logpath.glob("*.log"))


def test_command_internal_error(runner: CliRunner, obj: Obj) -> None:
    result = runner.invoke(cmd, ["runtimeerror"], obj=obj)
    assert result.exit_code == 1
    logpath = obj.ctx.settings.logpath
    logfile = next(logpath.glob("*.log"))
    logcontent = logfile.read_text()
    assert "an unexpected error occurred" in logcontent
    assert "Traceback (most recent call last):" in logcontent
    assert "RuntimeError: oups" in logcontent


def test_obj(monkeypatch: pytest.MonkeyPatch) -> None:
    with monkeypatch.context() as m:
        m.setenv("SETTINGS", json.dumps({"jobs": 0}))
        with pytest.raises(click.ClickException, match="invalid site settings"):
            Obj()


def test_cli(runner: CliRunner, obj: Obj) -> None:
    result = runner.invoke(cli, ["--help"], obj=obj)
    assert result.exit_code == 0
    for command in ("bounds", "sequential", "oscillator", "fit", "simulate", "estimate"):
        assert command in result.stdout
    assert "site-settings" not in result.stdout


def test_cli_unknown_command(runner: CliRunner, obj: Obj) -> None:
    result = runner.invoke(cli, ["nosuchcmd"], obj=obj)
    assert result.exit_code == 1
    assert "No such command" in result.stderr


def test_version(runner: CliRunner, obj: Obj) -> None:
    result = runner.invoke(cli, ["--version"], obj=obj)
    assert re.match(r"globtherm version (\d\.).*", result.stdout)


def test_site_settings(runner: CliRunner, ctx: Context, obj: Obj) -> None:
    result = runner.invoke(cli, ["site-settings"], obj=obj)
    assert result.exit_code == 0, result.stderr
    settings = json.loads(result.output)
    assert settings == json.loads(ctx.settings.json())

    result = runner.invoke(cli, ["site-settings", "--schema"], obj=obj)
    assert result.exit_code == 0, result.stderr
    schema = json.loads(result.output)
    schema.pop("title")
    expected = json.loads(ctx.settings.schema_json())
    expected.pop("title")
    assert schema == expected


def test_load_config(tmp_path: Path) -> None:
    config_file = tmp_path / "run.yaml"
    config_file.write_text("n: 10\ntrue-y: 2.5\nmu: 40\n")
    config = load_config("sequential", config_file, mu=8, seed=None)
    assert config.n == 10
    assert config.true_y == 2.5
    assert config.mu == 8
    assert config.seed == 1
    assert load_config("oscillator", None).model == ModelName.oscillator

    config_file.write_text("- 1\n- 2\n")
    with pytest.raises(exceptions.ConfigurationError, match="expecting a mapping"):
        load_config("sequential", config_file)
    config_file.write_text("n: [1\n")
    with pytest.raises(exceptions.ConfigurationError, match="invalid YAML"):
        load_config("sequential", config_file)


def test_bounds(runner: CliRunner, obj: Obj) -> None:
    args = ["bounds", "--n-sweep", "1,10", "--nodes", "201"]
    result = runner.invoke(cli, args, obj=obj)
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert re.match(r"^# globtherm version=\S+ config=[0-9a-f]{16} seed=1$", lines[0])
    assert lines[1] == "n,eps_opt,eps_cr,eps_p,K,eps_flat,asymptote,eps_snr"
    assert [line.split(",")[0] for line in lines[2:]] == ["1", "10"]
    # byte-identical output for identical inputs
    assert runner.invoke(cli, args, obj=obj).stdout == result.stdout


def test_sequential(runner: CliRunner, obj: Obj, tmp_path: Path) -> None:
    out = tmp_path / "seq.csv"
    result = runner.invoke(
        cli,
        ["sequential", "--mu", "12", "--nodes", "201", "--seed", "3", "--out", str(out)],
        obj=obj,
    )
    assert result.exit_code == 0, result.stderr
    assert not result.stdout
    comments, frame = tables.read_csv(out)
    assert comments[0].endswith("seed=3")
    assert frame.columns.tolist() == [
        "m",
        "theta_global",
        "error_bar",
        "theta_local",
        "delta_local",
    ]
    assert len(frame) == 12


def test_sequential_config_file(runner: CliRunner, obj: Obj, tmp_path: Path) -> None:
    config_file = tmp_path / "run.yaml"
    config_file.write_text("n: 10\nmu: 40\ntrue-y: 2\nnodes: 101\n")
    result = runner.invoke(
        cli, ["sequential", "--config", str(config_file), "--mu", "8"], obj=obj
    )
    assert result.exit_code == 0, result.stderr
    assert len(result.stdout.splitlines()) == 1 + 1 + 8


def test_sequential_invalid_support(runner: CliRunner, obj: Obj) -> None:
    result = runner.invoke(
        cli, ["sequential", "--ymin", "5", "--ymax", "1", "--mu", "3"], obj=obj
    )
    assert result.exit_code == 1
    assert "y_min (5.0) must be smaller than y_max (1.0)" in result.stderr


def test_oscillator(runner: CliRunner, obj: Obj, tmp_path: Path) -> None:
    out = tmp_path / "osc.csv"
    result = runner.invoke(
        cli,
        ["oscillator", "--mu", "60", "--nodes", "201", "--out", str(out)],
        obj=obj,
    )
    assert result.exit_code == 0, result.stderr
    __, frame = tables.read_csv(out)
    assert len(frame) == 60
    __, bins = tables.read_csv(tmp_path / "osc-bins.csv")
    assert set(bins["mu"]) <= {50}


def test_fit(runner: CliRunner, obj: Obj, tmp_path: Path) -> None:
    n = pd.Series([100, 300, 1_000, 3_000, 10_000])
    eps_cr = 51.7 / n
    path = tmp_path / "bounds.csv"
    path.write_text(
        tables.to_csv(
            pd.DataFrame({"n": n, "eps_opt": eps_cr - 143 * n**-1.25, "eps_cr": eps_cr}),
            [],
        )
    )
    result = runner.invoke(cli, ["fit", "--bounds", str(path), "--json"], obj=obj)
    assert result.exit_code == 0, result.stderr
    rows = json.loads(result.stdout)
    assert rows[0]["quantity"] == "q"
    assert rows[0]["value"] == pytest.approx(-1.25, abs=1e-8)

    result = runner.invoke(cli, ["fit", "--bounds", str(path)], obj=obj)
    assert result.exit_code == 0, result.stderr
    assert "asymptotic fit" in result.stdout
    assert "million spins are needed" in result.stdout


def test_fit_numerical_failure(runner: CliRunner, obj: Obj, tmp_path: Path) -> None:
    path = tmp_path / "bounds.csv"
    n = [100, 200, 400, 800, 1600]
    path.write_text(
        tables.to_csv(
            pd.DataFrame({"n": n, "eps_opt": [0.5] * 5, "eps_cr": [0.4] * 5}), []
        )
    )
    result = runner.invoke(cli, ["fit", "--bounds", str(path)], obj=obj)
    assert result.exit_code == 2
    assert "quadrature noise probably dominates" in result.stderr


def test_simulate_estimate(runner: CliRunner, obj: Obj, tmp_path: Path) -> None:
    trace = tmp_path / "trace.csv"
    result = runner.invoke(
        cli,
        [
            "simulate",
            "--n",
            "20",
            "--true-y",
            "2",
            "--mu",
            "50",
            "--seed",
            "3",
            "--out",
            str(trace),
        ],
        obj=obj,
    )
    assert result.exit_code == 0, result.stderr
    loaded = tables.read_trace(trace)
    assert loaded.mu == 50 and loaded.seed == 3

    result = runner.invoke(
        cli, ["estimate", "--trace", str(trace), "--nodes", "201"], obj=obj
    )
    assert result.exit_code == 0, result.stderr
    lines = result.stdout.splitlines()
    assert lines[0].endswith("seed=3")
    assert lines[1] == "method,theta,uncertainty,eps_mle,flag"
    assert [line.split(",")[0] for line in lines[2:]] == ["global", "local"]


def test_estimate_without_trace(runner: CliRunner, obj: Obj) -> None:
    result = runner.invoke(cli, ["estimate"], obj=obj)
    assert result.exit_code == 1
    assert "a trace file is required" in result.stderr
