import json

import pytest

from fermionic_epi import cli
from fermionic_epi.experiments import ExperimentConfig, parse_grid
from fermionic_epi.reports import ExperimentReport, emit_plot_data


def test_parse_grid():
    assert parse_grid("0.1:0.3:0.1") == (0.1, 0.2, 0.3)
    assert parse_grid("0,0.5,1") == (0.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        parse_grid("0:1")


def test_passing_subcommand_writes_reports(tmp_path, capsys):
    assert cli.main(["car-check", "--modes", "1,2", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "car-check.json").read_text())
    assert data["passed"] is True
    assert data["config"]["modes"] == [1, 2]
    assert "car-check: PASS" in capsys.readouterr().out
    assert not (tmp_path / "car-check.csv").exists()


def test_failing_subcommand_exits_one(tmp_path):
    assert cli.main(["stam", "--modes", "1", "--trials", "40", "--out", str(tmp_path)]) == 1
    assert (tmp_path / "stam.csv").exists()


def test_output_is_reproducible_per_seed(tmp_path):
    args = ["epi-sweep", "--modes", "1", "--trials", "3", "--lambda-grid", "0.2,0.7", "--seed", "5"]
    cli.main(args + ["--out", str(tmp_path / "a")])
    cli.main(args + ["--workers", "2", "--out", str(tmp_path / "b")])
    first = (tmp_path / "a" / "epi-sweep.json").read_bytes()
    second = (tmp_path / "b" / "epi-sweep.json").read_bytes().replace(b'"workers": 2', b'"workers": 1')
    assert first == second
    cli.main(args[:-1] + ["6", "--out", str(tmp_path / "c")])
    assert (tmp_path / "c" / "epi-sweep.json").read_bytes() != first


def test_environment_sets_output_directory(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    cli.main(["pfaffian-check", "--trials", "2"])
    assert (tmp_path / "env" / "pfaffian-check.json").exists()


def test_flags_override_config_file(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# sweep settings\nmodes = 2\ntrials = 7\nlambda-grid = 0.1:0.5:0.2\nseed = 3\n")
    args = cli.build_parser().parse_args(["epi-sweep", "--config", str(conf), "--trials", "4"])
    cfg = cli.resolve_config(args)
    assert cfg == ExperimentConfig(modes=(2,), trials=4, lambda_grid=(0.1, 0.3, 0.5), seed=3)


@pytest.mark.parametrize("content", ["trials = 0\n", "colour = red\n", "just text\n"])
def test_bad_config_file_exits_two(tmp_path, content):
    conf = tmp_path / "bad.conf"
    conf.write_text(content)
    with pytest.raises(SystemExit) as exc:
        cli.main(["car-check", "--config", str(conf), "--out", str(tmp_path)])
    assert exc.value.code == 2


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["no-such-command"],
        ["car-check", "--modes", "0"],
        ["car-check", "--modes", "9"],
        ["epi-sweep", "--lambda-grid", "0.5,1.5"],
        ["fisher-check", "--h", "0.5"],
        ["debruijn", "--trials", "-3"],
        ["semigroup-check", "--t", "-1"],
    ],
)
def test_bad_arguments_exit_two(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(argv)
    assert exc.value.code == 2


def test_plot_data_skips_non_sweeps(tmp_path, caplog):
    report = ExperimentReport("single", {})
    report.add_max("x", 0.0, 1.0)
    assert emit_plot_data(report, tmp_path / "x.csv") is False
    assert not (tmp_path / "x.csv").exists()
    assert "no sweep table" in caplog.text
    report.rows.append({"lam": 0.5, "gap": 0.1})
    assert emit_plot_data(report, tmp_path / "x.csv") is True
    assert (tmp_path / "x.csv").read_text().splitlines()[0] == "lam,gap"


def test_module_entry_point(tmp_path):
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "fermionic_epi", "quadrature-check", "--trials", "2", "--out", str(tmp_path)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert "quadrature-check: PASS" in proc.stdout


def test_debruijn_with_explicit_time_and_step(tmp_path):
    assert cli.main(["debruijn", "--modes", "2", "--trials", "4", "--t", "0.2", "--h", "1e-4", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "debruijn.json").read_text())
    assert data["config"]["t"] == 0.2 and data["config"]["h"] == 1e-4
    assert data["schema_version"] == 1 and data["library_version"]


def test_sweep_tables_have_plot_columns(tmp_path):
    cli.main(["epi-sweep", "--modes", "2", "--trials", "2", "--lambda-grid", "0.5", "--out", str(tmp_path)])
    header = (tmp_path / "epi-sweep.csv").read_text().splitlines()[0].split(",")
    assert {"lambda", "E_A", "E_B", "E_I", "mixture", "max_ratio_drop"} <= set(header)
    cli.main(["semigroup-check", "--modes", "1", "--trials", "1", "--out", str(tmp_path)])
    rows = (tmp_path / "semigroup-check.csv").read_text().splitlines()
    powers = [float(r.split(",")[2]) for r in rows[1:]]
    assert all(b >= a - 1e-12 for a, b in zip(powers, powers[1:]))
    assert powers[-1] == pytest.approx(2.0, abs=1e-6)
