"""Tests for the command-line interface."""

import json
from unittest.mock import patch

import pytest
from click.testing import CliRunner

from joint_uncertainty import __version__
from joint_uncertainty.cli import cli, parse_float_list, parse_int_list, solve_cell
from joint_uncertainty.config import ENV_CACHE_DIR, ENV_WORKERS, RunConfig
from joint_uncertainty.errors import EigensolverError
from joint_uncertainty.results import write_csv


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    cache_dir = tmp_path / "cache"
    monkeypatch.setenv(ENV_CACHE_DIR, str(cache_dir))
    monkeypatch.delenv(ENV_WORKERS, raising=False)
    return cache_dir


@pytest.fixture
def out(tmp_path):
    return tmp_path / "results"


class TestParsing:
    """Tests for range arguments."""

    def test_int_ranges(self):
        assert parse_int_list("2-5") == [2, 3, 4, 5]
        assert parse_int_list("2,3") == [2, 3]
        assert parse_int_list("2-3,8,3") == [2, 3, 8]

    def test_bad_int_range(self):
        with pytest.raises(ValueError):
            parse_int_list("5-2")
        with pytest.raises(ValueError):
            parse_int_list(",")

    def test_float_list(self):
        assert parse_float_list("10,30.5") == [10.0, 30.5]


class TestGroup:
    """Tests for the group and exit codes."""

    def test_version(self, runner):
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_unknown_command_is_usage_error(self, runner):
        result = runner.invoke(cli, ["launch"])
        assert result.exit_code == 1

    def test_unknown_option_is_usage_error(self, runner):
        result = runner.invoke(cli, ["min-uncertainty", "--bogus"])
        assert result.exit_code == 1


class TestMinUncertainty:
    """Tests for the min-uncertainty command."""

    def test_writes_result_files(self, runner, out):
        result = runner.invoke(cli, ["min-uncertainty", "-n", "2", "-m", "3", "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert "R=" in result.output

        folder = out / "min-uncertainty"
        lines = (folder / "min_uncertainty_n2_m3.csv").read_text().splitlines()
        assert lines[0] == "n,m,xi,delta_tau2,delta_omega2,R"
        assert lines[1].startswith("2,3,")
        detail = json.loads((folder / "min_uncertainty_n2_m3.json").read_text())
        assert detail["result"]["product"] >= 0.0
        manifest = json.loads((folder / "manifest.json").read_text())
        assert manifest["command"] == "min-uncertainty"
        assert "min_uncertainty_n2_m3.csv" in manifest["outputs"]

    def test_cached_rerun_is_identical(self, runner, out, isolated_cache):
        args = ["min-uncertainty", "-n", "2", "-m", "3", "-o", str(out)]
        assert runner.invoke(cli, args).exit_code == 0
        path = out / "min-uncertainty" / "min_uncertainty_n2_m3.csv"
        first = path.read_bytes()
        assert len(list(isolated_cache.glob("*.json"))) == 1

        with patch("joint_uncertainty.cli.solve_cell") as solver:
            assert runner.invoke(cli, args).exit_code == 0
        solver.assert_not_called()
        assert path.read_bytes() == first

    def test_no_cache_recomputes(self, runner, out):
        args = ["min-uncertainty", "-n", "2", "-m", "2", "-o", str(out)]
        assert runner.invoke(cli, args).exit_code == 0
        with patch("joint_uncertainty.cli.solve_cell", wraps=solve_cell) as solver:
            assert runner.invoke(cli, args + ["--no-cache"]).exit_code == 0
        solver.assert_called_once()

    def test_config_file_supplies_parameters(self, runner, out, tmp_path):
        config_path = tmp_path / "run.yaml"
        config_path.write_text(f"photons: 2\nmodes: 2\noutput-dir: {out}\n")
        result = runner.invoke(cli, ["--config", str(config_path), "min-uncertainty"])
        assert result.exit_code == 0, result.output
        assert (out / "min-uncertainty" / "min_uncertainty_n2_m2.csv").exists()

    def test_missing_photons(self, runner, out):
        result = runner.invoke(cli, ["min-uncertainty", "-m", "3", "-o", str(out)])
        assert result.exit_code == 1

    def test_single_photon_rejected(self, runner, out):
        result = runner.invoke(cli, ["min-uncertainty", "-n", "1", "-m", "3", "-o", str(out)])
        assert result.exit_code == 1
        assert "photon number" in result.output

    def test_numerical_failure_writes_diagnostic(self, runner, out):
        error = EigensolverError("Lanczos stalled", residual_norm=1e-4, iterations=50)
        with patch("joint_uncertainty.cli.solve_cell", side_effect=error):
            result = runner.invoke(cli, ["min-uncertainty", "-n", "3", "-m", "4", "-o", str(out)])
        assert result.exit_code == 2
        diagnostic = json.loads((out / "min-uncertainty" / "diagnostic.json").read_text())
        assert diagnostic["error"] == "EigensolverError"
        assert diagnostic["iterations"] == 50
        assert diagnostic["config"]["parameters"]["photons"] == 3


class TestSweep:
    """Tests for the sweep command."""

    def test_small_sweep(self, runner, out):
        result = runner.invoke(
            cli, ["sweep", "-n", "2", "-m", "2-5", "--order", "1", "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
        folder = out / "sweep"
        rows = (folder / "sweep.csv").read_text().splitlines()
        assert rows[0] == "n,m,xi,delta_tau2,delta_omega2,R,status"
        assert len(rows) == 5
        assert all(row.endswith(",ok") for row in rows[1:])
        summary = json.loads((folder / "sweep_summary.json").read_text())
        assert summary["cells"] == 4
        assert summary["failed_cells"] == 0
        assert summary["series"]["2"]["order"] == 1
        assert (folder / "sweep_n2.csv").exists()

    def test_rerun_uses_cache(self, runner, out):
        args = ["sweep", "-n", "2", "-m", "2-3", "--order", "1", "-o", str(out)]
        assert runner.invoke(cli, args).exit_code == 0
        with patch("joint_uncertainty.cli.solve_cell") as solver:
            result = runner.invoke(cli, args)
        assert result.exit_code == 0
        solver.assert_not_called()
        summary = json.loads((out / "sweep" / "sweep_summary.json").read_text())
        assert summary["cached_cells"] == 2

    def test_failed_cell_exit_code(self, runner, out):
        error = EigensolverError("stalled", residual_norm=1e-3, iterations=10)
        with patch("joint_uncertainty.cli.solve_cell", side_effect=error):
            result = runner.invoke(cli, ["sweep", "-n", "2", "-m", "2-3", "-o", str(out)])
        assert result.exit_code == 2
        rows = (out / "sweep" / "sweep.csv").read_text().splitlines()
        assert "EigensolverError: stalled" in rows[1]

    @pytest.mark.slow
    def test_default_grid(self, runner, out):
        result = runner.invoke(cli, ["sweep", "-o", str(out)])
        assert result.exit_code == 0, result.output
        folder = out / "sweep"
        rows = (folder / "sweep.csv").read_text().splitlines()
        assert rows[0].split(",") == ["n", "m", "xi", "delta_tau2", "delta_omega2", "R", "status"]
        assert len(rows) == 1 + 4 * 14
        summary = json.loads((folder / "sweep_summary.json").read_text())
        assert summary["cells"] == 56
        for n in (2, 3, 4, 5):
            series = summary["series"][str(n)]
            assert series["r_inf"] == pytest.approx(1.0 - 2.0 / n, abs=0.02)
            assert series["monotonicity_violations"] == []
            assert (folder / f"sweep_n{n}.csv").exists()

    def test_bad_range(self, runner, out):
        result = runner.invoke(cli, ["sweep", "-n", "1-3", "-m", "2-4", "-o", str(out)])
        assert result.exit_code == 1


class TestExtrapolate:
    """Tests for the extrapolate command."""

    def test_recovers_intercept(self, runner, out, tmp_path):
        rows = [{"n": 3, "m": m, "R": 0.5 + 0.3 / m + 0.1 / m**2} for m in range(2, 11)]
        source = write_csv(tmp_path / "sweep.csv", ["n", "m", "R"], rows)
        result = runner.invoke(
            cli, ["extrapolate", "-i", str(source), "--order", "2", "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
        fits = json.loads((out / "extrapolate" / "extrapolation.json").read_text())
        assert fits["3"]["r_inf"] == pytest.approx(0.5, abs=1e-9)
        assert (out / "extrapolate" / "extrapolation.csv").exists()

    def test_too_few_points(self, runner, out, tmp_path):
        rows = [{"n": 2, "m": m, "R": 0.1} for m in (2, 3)]
        source = write_csv(tmp_path / "sweep.csv", ["n", "m", "R"], rows)
        result = runner.invoke(cli, ["extrapolate", "-i", str(source), "-o", str(out)])
        assert result.exit_code == 1
        assert "underdetermined" in result.output

    def test_missing_input(self, runner, out, tmp_path):
        result = runner.invoke(cli, ["extrapolate", "-i", str(tmp_path / "absent.csv")])
        assert result.exit_code == 1


class TestGaussian:
    """Tests for the gaussian command."""

    def test_closed_form_against_oracle(self, runner, out):
        result = runner.invoke(
            cli, ["gaussian", "-n", "2", "--ratios", "0.5,1", "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
        rows = (out / "gaussian" / "gaussian.csv").read_text().splitlines()
        assert len(rows) == 3
        errors = [float(row.split(",")[4]) for row in rows[1:]]
        assert max(errors) < 1e-6
        assert (out / "gaussian" / "gaussian_minimum_condition.csv").exists()


class TestMixtureBound:
    """Tests for the mixture-bound command."""

    def test_distributions_and_chain(self, runner, out):
        result = runner.invoke(
            cli,
            ["mixture-bound", "-d", "poisson:5", "-d", "bsv:3", "--random", "20", "-o", str(out)],
        )
        assert result.exit_code == 0, result.output
        folder = out / "mixture-bound"
        rows = (folder / "mixture_bound.csv").read_text().splitlines()
        assert rows[0].startswith("distribution,mean,pair_mean")
        assert rows[1].startswith("poisson:5,")
        chain = json.loads((folder / "mixture_chain.json").read_text())
        assert chain == {"failures": [], "samples": 20}

    def test_requires_input(self, runner, out):
        result = runner.invoke(cli, ["mixture-bound", "-o", str(out)])
        assert result.exit_code == 1

    def test_bad_distribution(self, runner, out):
        result = runner.invoke(cli, ["mixture-bound", "-d", "gamma:2", "-o", str(out)])
        assert result.exit_code == 1


class TestBsvScan:
    """Tests for the bsv-scan command."""

    def test_single_target(self, runner, out):
        result = runner.invoke(cli, ["bsv-scan", "--mean-n", "10", "-o", str(out)])
        assert result.exit_code == 0, result.output
        folder = out / "bsv-scan"
        lines = (folder / "bsv_scan.csv").read_text().splitlines()
        assert lines[0] == "mean_n,mu,gain,product,mixture_bound,mode_count,evaluations"
        product = float(lines[1].split(",")[3])
        assert 0.8 <= product < 1.0
        # one point is not enough for the scaling fit
        assert not (folder / "bsv_fit.json").exists()

    def test_rejects_nonpositive_mean(self, runner, out):
        result = runner.invoke(cli, ["bsv-scan", "--mean-n", "0", "-o", str(out)])
        assert result.exit_code == 1

    @pytest.mark.slow
    def test_default_targets(self, runner, out):
        result = runner.invoke(cli, ["bsv-scan", "-o", str(out)])
        assert result.exit_code == 0, result.output
        folder = out / "bsv-scan"
        assert not (folder / "diagnostic.json").exists()
        rows = (folder / "bsv_scan.csv").read_text().splitlines()
        assert len(rows) == 6
        fit = json.loads((folder / "bsv_fit.json").read_text())
        assert 0.85 <= fit["k"] <= 1.15


class TestVerify:
    """Tests for the verify command (checks replaced by stubs)."""

    def test_pass(self, runner, out):
        fake = {"always": lambda options: (0.0, 1.0, "")}
        with patch("joint_uncertainty.verify.CHECKS", fake):
            result = runner.invoke(cli, ["verify", "-o", str(out)])
        assert result.exit_code == 0, result.output
        report = json.loads((out / "verify" / "verify.json").read_text())
        assert report["passed"] is True

    def test_failure_exit_code(self, runner, out):
        fake = {"never": lambda options: (1.0, 0.0, "")}
        with patch("joint_uncertainty.verify.CHECKS", fake):
            result = runner.invoke(cli, ["verify", "-o", str(out)])
        assert result.exit_code == 3
        assert "[FAIL] never" in result.output

    def test_perturbed_oracle(self, runner, out):
        from joint_uncertainty import verify

        fake = {"hg_quadrature_oracle": verify.CHECKS["hg_quadrature_oracle"]}
        with patch("joint_uncertainty.verify.CHECKS", fake):
            result = runner.invoke(cli, ["verify", "--perturb-t2", "1e-3", "-o", str(out)])
        assert result.exit_code == 3


class TestInitAndStatus:
    """Tests for init, status and plot."""

    def test_init_writes_loadable_config(self, runner, tmp_path):
        result = runner.invoke(cli, ["init", "-o", str(tmp_path / "config")])
        assert result.exit_code == 0
        config = RunConfig.from_yaml(tmp_path / "config" / "config.yaml")
        assert config.solver == RunConfig.default().solver

    def test_status(self, runner, isolated_cache):
        result = runner.invoke(cli, ["status"])
        assert result.exit_code == 0
        assert "Entries: 0" in result.output
        assert str(isolated_cache) in result.output

    def test_plot_without_results(self, runner, tmp_path):
        result = runner.invoke(cli, ["plot", "-i", str(tmp_path)])
        assert result.exit_code == 1

    def test_plot_sweep(self, runner, tmp_path):
        pytest.importorskip("matplotlib")
        rows = [{"n": 2, "m": m, "R": 0.1 / m, "status": "ok"} for m in (2, 3, 4)]
        write_csv(tmp_path / "sweep" / "sweep.csv", ["n", "m", "R", "status"], rows)
        result = runner.invoke(cli, ["plot", "-i", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "plot" / "convergence.svg").exists()
        assert (tmp_path / "plot" / "manifest.json").exists()
