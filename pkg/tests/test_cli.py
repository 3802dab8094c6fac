"""Command-line interface: subcommands, exit codes, output determinism."""

import subprocess
import sys

import pytest

from confqm import cli
from confqm.errors import NumericError
from confqm.scenarios import BUILTIN_SCENARIOS, parse_config

FAST_FREE = [
    "--override", "evolve.n_steps=50",
    "--override", "evolve.record_every=10",
    "--override", "grid.n_x=64",
    "--override", "grid.n_v=64",
    "--override", "packets.0.sigma_x=0.8",
    "--override", "packets.0.sigma_v=0.8",
]


def run_cli(*args):
    return cli.main(list(args))


class TestListScenarios:
    def test_names(self, capsys):
        assert run_cli("list-scenarios") == 0
        out = capsys.readouterr().out.splitlines()
        assert out == list(BUILTIN_SCENARIOS)

    def test_emit_writes_parseable_files(self, tmp_path, capsys):
        assert run_cli("list-scenarios", "--emit", "--out-dir", str(tmp_path)) == 0
        files = sorted(p.name for p in tmp_path.iterdir())
        assert files == sorted(f"{n}.toml" for n in BUILTIN_SCENARIOS)
        for p in tmp_path.iterdir():
            config = parse_config(p.read_text())
            assert config.name == p.stem


class TestCheck:
    def test_ok(self, capsys):
        assert run_cli("check", "harmonic") == 0
        out = capsys.readouterr().out
        assert "harmonic" in out and "ok" in out

    def test_quiet(self, capsys):
        assert run_cli("check", "harmonic", "--quiet") == 0
        assert capsys.readouterr().out == ""

    def test_budget_violation_exit_2(self, capsys):
        code = run_cli(
            "check", "free", "--override", "packets.0.v0=3.0",
            "--override", "evolve.n_steps=1000",
        )
        assert code == 2
        assert "support" in capsys.readouterr().err

    def test_unknown_scenario_exit_2(self, capsys):
        assert run_cli("check", "no-such-thing") == 2
        assert "builtin" in capsys.readouterr().err


class TestRun:
    def test_run_writes_and_reports(self, tmp_path, capsys):
        code = run_cli("run", "free", "--out-dir", str(tmp_path), *FAST_FREE)
        assert code == 0
        out = capsys.readouterr().out
        assert "free" in out and "wrote" in out
        assert (tmp_path / "free_series.csv").exists()
        assert (tmp_path / "free_report.json").exists()

    def test_quiet_run(self, tmp_path, capsys):
        code = run_cli("run", "free", "--quiet", "--out-dir", str(tmp_path), *FAST_FREE)
        assert code == 0
        assert capsys.readouterr().out == ""

    def test_config_file_path(self, tmp_path, capsys):
        path = tmp_path / "tweaked.toml"
        path.write_text(
            BUILTIN_SCENARIOS["free"]
            .replace("n_x = 256", "n_x = 64")
            .replace("n_v = 256", "n_v = 64")
            .replace("sigma_x = 0.5", "sigma_x = 0.8")
            .replace("sigma_v = 0.5", "sigma_v = 0.8")
            .replace("n_steps = 500", "n_steps = 50")
            .replace("record_every = 5", "record_every = 10")
        )
        assert run_cli("run", str(path), "--out-dir", str(tmp_path / "out")) == 0
        assert (tmp_path / "out" / "free_series.csv").exists()

    def test_bad_override_exit_2(self, capsys):
        assert run_cli("run", "free", "--override", "evolve.dt=banana") == 2
        assert "TOML literal" in capsys.readouterr().err

    def test_bad_toml_exit_2(self, tmp_path, capsys):
        path = tmp_path / "broken.toml"
        path.write_text("name = [\n")
        assert run_cli("run", str(path)) == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_resolution_error_exit_2(self, capsys):
        assert run_cli("check", "free", "--override", "packets.0.sigma_x=0.01") == 2
        assert "under-resolved" in capsys.readouterr().err

    def test_numeric_failure_exit_3(self, monkeypatch, capsys):
        def explode(config, out_dir=None, workers=1):
            raise NumericError("manufactured numeric failure")

        monkeypatch.setattr(cli, "run_scenario", explode)
        assert run_cli("run", "free") == 3
        assert "manufactured" in capsys.readouterr().err


class TestSubprocessEntryPoints:
    def run_module(self, *args, cwd=None):
        return subprocess.run(
            [sys.executable, "-m", "confqm", *args],
            capture_output=True, text=True, cwd=cwd,
        )

    def test_module_invocation(self, tmp_path):
        proc = self.run_module(
            "run", "free", "--quiet", "--out-dir", str(tmp_path), *FAST_FREE
        )
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout == ""
        assert (tmp_path / "free_series.csv").exists()

    def test_exit_code_propagates(self):
        proc = self.run_module("check", "no-such-thing")
        assert proc.returncode == 2
        assert "builtin" in proc.stderr

    def test_reruns_byte_identical_across_workers(self, tmp_path):
        outs = [tmp_path / tag for tag in ("one", "two", "four")]
        for out, workers in zip(outs, ("1", "1", "4")):
            proc = self.run_module(
                "run", "free", "--quiet", "--out-dir", str(out),
                "--workers", workers, *FAST_FREE,
            )
            assert proc.returncode == 0, proc.stderr
        ref_csv = (outs[0] / "free_series.csv").read_bytes()
        ref_json = (outs[0] / "free_report.json").read_bytes()
        for out in outs[1:]:
            assert (out / "free_series.csv").read_bytes() == ref_csv
            assert (out / "free_report.json").read_bytes() == ref_json


class TestParserShape:
    def test_missing_subcommand_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            cli.main([])
        assert exc.value.code == 2

    def test_help_mentions_subcommands(self, capsys):
        with pytest.raises(SystemExit) as exc:
            cli.main(["--help"])
        assert exc.value.code == 0
        out = capsys.readouterr().out
        for word in ("run", "check", "list-scenarios"):
            assert word in out
