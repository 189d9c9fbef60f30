"""
Tests for avg_cli

Validates:
- Config loading, validation errors with key paths, command-line overrides
- Streamed iterated-sum contractions against ordered-tuple enumeration
- Law comparisons and log-log rate fits
- Every experiment runner at small scale
- The command line: exit codes, result files, byte-identical reruns
"""

import itertools
import json

import numpy as np
import pytest

from roughflow.avg_cli import (
    CheckResult,
    ComparisonEngine,
    ExperimentReport,
    fit_rate,
    load_config,
    run_diffusion_continuous,
    run_diffusion_discrete,
    run_em_rate,
    run_experiment,
    run_invariance,
    run_lil,
    run_lil_constant,
    running_contraction,
)
from roughflow.avg_cli import cli as cli_module
from roughflow.avg_cli import experiments as experiments_module
from roughflow.avg_cli.cli import main
from roughflow.avg_cli.experiments import lil_running_max
from roughflow.avg_cli.output import REPORT_FILE, SERIES_FILE, load_report
from roughflow.errors import ConfigError, ExplosionError, InvalidParameterError
from tests.utils.oracles import ordered_iterated_sum

SMALL_OPTIMIZER = {"m": 4, "restarts": 4, "max_iter": 400}


@pytest.mark.unit
class TestConfig:
    """Config files and overrides."""

    def test_overrides(self, write_config):
        """
        Expected:
        - seed, replicas and threads from the command line win over the file
        """
        path = write_config({"kind": "invariance", "seed": 3, "replicas": 100, "N": 64})
        config = load_config(path, "invariance", seed=9, replicas=50, threads=2)
        assert (config.seed, config.replicas, config.threads, config.N) == (9, 50, 2, 64)

    def test_kind_mismatch(self, write_config):
        path = write_config({"kind": "lil"})
        with pytest.raises(ConfigError) as info:
            load_config(path, "invariance")
        assert info.value.fields[0]["loc"] == "kind"

    def test_validation_errors_keep_key_paths(self, write_config):
        """
        Expected:
        - a decreasing N_list and an out-of-range p are both reported
        - unknown keys are rejected
        """
        path = write_config({"N_list": [64, 16], "p": 3.5})
        with pytest.raises(ConfigError) as info:
            load_config(path, "diffusion-discrete")
        locs = {item["loc"] for item in info.value.fields}
        assert {"N_list", "p"} <= locs, f"locs {locs}"
        with pytest.raises(ConfigError):
            load_config(write_config({"replica": 5}, "typo.json"), "invariance")

    def test_unreadable_and_invalid_json(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json", "invariance")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(bad, "invariance")

    def test_em_rate_divisibility(self, write_config):
        """
        Expected:
        - every N must divide fine_cells
        """
        with pytest.raises(ConfigError):
            load_config(write_config({"fine_cells": 100, "N_list": [8, 16]}), "em-rate")

    def test_preset_and_inline_chain(self, write_config):
        """
        Expected:
        - a preset name and an inline chain resolve to the same law
        """
        inline = {"states": 2, "P": [[0.7, 0.3], [0.3, 0.7]], "g": [1.0, -1.0]}
        by_name = load_config(write_config({"chain": "two-state-0.3"}), "invariance").resolve_chain()
        by_value = load_config(write_config({"chain": inline}, "inline.json"), "invariance").resolve_chain()
        assert np.allclose(by_name.transition, by_value.transition)
        assert np.allclose(by_name.observable, by_value.observable)

    def test_committed_configs_validate(self):
        """
        Expected:
        - every file under configs/ validates for its own kind
        """
        from tests.conftest import CONFIGS_DIR

        for path in sorted(CONFIGS_DIR.glob("*.json")):
            kind = json.loads(path.read_text())["kind"]
            assert load_config(path, kind).kind == kind


@pytest.mark.unit
class TestStreaming:
    """Iterated-sum contractions along one trajectory."""

    @pytest.mark.parametrize("ell", [1, 2, 3])
    def test_matches_enumeration(self, rng_factory, ell):
        """
        Test every prefix against the ordered-tuple oracle, chunk size 4.

        Expected:
        - <A, level-ell sum of xi(0..n-1)> agrees for n = 1..10
        """
        rng = rng_factory(10 + ell)
        xi = rng.normal(size=(10, 2))
        A = rng.normal(size=(2,) * ell)
        values = running_contraction(xi, A, chunk=4)
        for n in range(1, 11):
            expected = sum(A[idx] * ordered_iterated_sum(xi[:n], idx)
                           for idx in itertools.product(range(2), repeat=ell))
            assert abs(values[n - 1] - expected) < 1e-10, f"n={n}: {values[n - 1]} vs {expected}"

    def test_chunking_invariance(self, rng_factory):
        xi = rng_factory(20).choice([-1.0, 1.0], size=(50, 1))
        A = np.ones((1, 1, 1))
        assert np.allclose(running_contraction(xi, A, chunk=7), running_contraction(xi, A), atol=1e-9)

    def test_level_limit(self):
        with pytest.raises(ConfigError):
            running_contraction(np.ones((4, 1)), np.ones((1, 1, 1, 1)))

    def test_running_max(self):
        """
        Expected:
        - -inf before burn_in, nondecreasing afterwards
        """
        values = np.sin(np.arange(1, 41, dtype=float)) * np.arange(1, 41)
        running = lil_running_max(values, 1, burn_in=5)
        assert np.all(np.isneginf(running[:4]))
        assert np.all(np.diff(running[4:]) >= 0.0)


@pytest.mark.unit
class TestComparisons:
    """Law comparisons, rate fits and report bookkeeping."""

    def test_mean_within_se(self, rng_factory):
        """
        Expected:
        - a sample centred at 0 passes against 0 and fails against 1
        """
        sample = rng_factory(30).normal(size=(2000, 2))
        engine = ComparisonEngine(tolerance=5.0)
        assert engine.compare_mean(sample, 0.0)["passed"]
        failed = engine.compare_mean(sample, 1.0)
        assert not failed["passed"] and len(failed["differences"]) == 2

    def test_ks(self, rng_factory):
        """
        Expected:
        - identical samples have KS statistic 0 and pass
        - a shift of one standard deviation fails
        """
        x = rng_factory(31).normal(size=(500, 1))
        engine = ComparisonEngine(bootstrap=50, seed=1)
        same = engine.compare_ks(x, x.copy())
        assert same["passed"] and same["statistics"] == [0.0]
        assert not engine.compare_ks(x, x + 1.0)["passed"]

    def test_fit_rate(self):
        """
        Expected:
        - errors 3 N^{-1/2} give delta = 1/2 with r2 = 1
        - fewer than two positive errors raise
        """
        N = np.array([16, 64, 256, 1024])
        fit = fit_rate(N, 3.0 * N ** -0.5)
        assert abs(fit.delta - 0.5) < 1e-12 and abs(fit.r2 - 1.0) < 1e-12
        assert fit.passes(0.05, 0.8)
        with pytest.raises(InvalidParameterError):
            fit_rate([16, 64], [0.0, 1.0])

    def test_controls_invert_pass(self):
        """
        Expected:
        - a failing control is ok, a passing control is not
        - errors fail the whole report
        """
        report = ExperimentReport(kind="invariance", config={}, version="test", seed=0, streams=[])
        report.add_check(CheckResult(name="real", passed=True))
        report.add_check(CheckResult(name="control", passed=False, expect_failure=True))
        assert report.finalize().passed
        report.add_check(CheckResult(name="bad control", passed=True, expect_failure=True))
        assert not report.finalize().passed
        ok = ExperimentReport(kind="invariance", config={}, version="test", seed=0, streams=[])
        ok.add_error("boom")
        assert not ok.finalize().passed


@pytest.mark.integration
class TestRunners:
    """Each experiment at small scale."""

    def test_invariance(self, write_config):
        """
        Test two-state-0.3 at N = 64 with 400 replicas.

        Expected:
        - mean, covariance and area checks pass at 5 SE
        - one series row per replica
        """
        config = load_config(write_config({"N": 64, "replicas": 400, "se_factor": 5.0}), "invariance", seed=1)
        result = run_invariance(config)
        assert result.report.passed, [c.name for c in result.report.checks if not c.ok]
        assert result.header == ["replica", "s_1", "ss_11"]
        assert result.series.shape == (400, 3)
        assert result.report.streams == ["chain"]
        assert abs(result.report.targets["varsigma"][0][0] - 7.0 / 3.0) < 1e-10

    def test_invariance_rejects_swap(self, write_config):
        """
        Expected:
        - the swap chain is reported as an error, not a crash
        """
        config = load_config(write_config({"chain": "swap", "N": 16, "replicas": 10}), "invariance")
        result = run_invariance(config)
        assert not result.report.passed
        assert result.report.errors and "summable" in result.report.errors[0]

    def test_diffusion_discrete(self, write_config):
        """
        Expected:
        - one row per N, four checks including the uncorrected control
        """
        config = load_config(write_config({
            "N_list": [16, 64], "replicas": 200, "bootstrap": 20, "sde_steps": 64,
        }), "diffusion-discrete", seed=2)
        result = run_diffusion_discrete(config)
        assert result.series.shape == (2, 5)
        names = [c.name for c in result.report.checks]
        assert "mean X_N(T) vs Xi(T) without correction" in names
        assert sum(c.expect_failure for c in result.report.checks) == 1
        assert np.allclose(result.report.targets["gamma_hat"], [[2.0 / 3.0]])

    def test_diffusion_continuous(self, write_config):
        """
        Expected:
        - targets carry taubar = 7/6 and varsigma^eta = 6/7
        - both controls are present for a non-unit roof mean
        """
        config = load_config(write_config({
            "suspension": "two-state-roof", "eps_list": [0.25, 0.125], "replicas": 200,
            "bootstrap": 20, "sde_steps": 64,
        }), "diffusion-continuous", seed=3)
        result = run_diffusion_continuous(config)
        targets = result.report.targets
        assert abs(targets["taubar"] - 7.0 / 6.0) < 1e-12
        assert abs(targets["varsigma_eta"][0][0] - 6.0 / 7.0) < 1e-10
        controls = [c.name for c in result.report.checks if c.expect_failure]
        assert "law X(T) vs Xi(taubar T)" in controls
        assert result.series.shape == (2, 4)

    def test_unit_roof_skips_time_control(self, write_config):
        config = load_config(write_config({
            "suspension": "unit-roof", "eps": 0.25, "replicas": 50, "bootstrap": 10, "sde_steps": 32,
        }), "diffusion-continuous")
        result = run_diffusion_continuous(config)
        assert "time_change_control" in result.report.summary

    def test_em_rate(self, write_config):
        """
        Expected:
        - distances decrease from N = 4 to N = 32 and the fits are finite
        - one seed column per seed after the medians
        """
        config = load_config(write_config({
            "fine_cells": 64, "N_list": [4, 8, 16, 32], "seeds": 4, "p_list": [2.2],
        }), "em-rate")
        result = run_em_rate(config)
        assert result.header[:4] == ["N", "median_distance", "median_level1", "median_p2.2"]
        assert result.series.shape == (4, 4 + 4)
        assert result.series[-1, 1] < result.series[0, 1]
        assert set(result.fits) == {"full", "level1", "p=2.2"}
        assert all(np.isfinite(fit.delta) for fit in result.fits.values())

    def test_lil(self, write_config):
        """
        Expected:
        - level-1 target M = 1 for fair signs
        - the median running maximum is nondecreasing in n
        """
        config = load_config(write_config({
            "chain": "iid-rademacher", "indices": [0], "n_max": 4096, "seeds": 3,
            "checkpoints": 8, "optimizer": SMALL_OPTIMIZER,
        }), "lil")
        result = run_lil(config)
        assert abs(result.report.targets["M"] - 1.0) < 1e-6
        median = result.series[:, -1]
        assert np.all(np.diff(median) >= 0.0)
        assert result.series[-1, 0] == 4096
        names = [check.name for check in result.report.checks]
        assert len(names) == 2 * 3, f"checks {names}"

    def test_lil_checks_every_seed(self, write_config, mocker):
        """
        Test one runaway seed among well-behaved ones.

        Expected:
        - the band is checked on each seed, not only on the median
        - a seed whose sum grows linearly fails its upper band and the report
        """
        real = experiments_module.sample_sequence

        def runaway(spec, n, seed, replica=0):
            if replica == 1:
                return np.ones((n, spec.dim))
            return real(spec, n, seed, replica=replica)

        mocker.patch("roughflow.avg_cli.experiments.sample_sequence", side_effect=runaway)
        config = load_config(write_config({
            "chain": "iid-rademacher", "indices": [0], "n_max": 4096, "seeds": 3,
            "checkpoints": 8, "optimizer": SMALL_OPTIMIZER,
        }), "lil")
        result = run_lil(config)
        checks = {check.name: check for check in result.report.checks}
        assert not checks["seed 1 running max never exceeds band"].ok, "runaway seed passed its band"
        assert not result.report.passed
        assert float(np.median(result.series[-1, 1:4])) == result.series[-1, -1]

    def test_lil_constant(self, write_config):
        """
        Expected:
        - M = 1/6 for ell = 3, every check passes
        """
        config = load_config(write_config({
            "indices": [0, 0, 0], "sigma": [[1.0]], "expected_M": 1.0 / 6.0, "optimizer": SMALL_OPTIMIZER,
        }), "lil-constant")
        result = run_lil_constant(config)
        assert result.report.passed
        assert result.series.shape == (4, 3)

    def test_unknown_kind(self, write_config):
        config = load_config(write_config({}), "lil-constant")
        with pytest.raises(ConfigError):
            run_experiment("no-such-kind", config)


@pytest.mark.smoke
class TestCli:
    """The roughflow command line."""

    def _lil_constant_args(self, write_config, out):
        path = write_config({"indices": [0, 0], "sigma": [[1.0]], "expected_M": 0.5,
                             "optimizer": SMALL_OPTIMIZER})
        return ["lil-constant", "--config", str(path), "--seed", "0", "--replicas", "2", "--out", str(out)]

    def test_success_writes_files(self, write_config, tmp_path, capsys):
        """
        Expected:
        - exit code 0 with report.json and series.csv in --out
        - the report records the restart stream and passes
        """
        out = tmp_path / "run"
        assert main(self._lil_constant_args(write_config, out)) == 0
        report = load_report(out / REPORT_FILE)
        assert report["passed"] is True and report["streams"] == ["restart"]
        assert (out / SERIES_FILE).read_text().splitlines()[0] == "restart,value,iterations"
        assert "ALL CHECKS PASSED" in capsys.readouterr().out

    def test_reruns_are_byte_identical(self, write_config, tmp_path):
        """
        Expected:
        - report.json and series.csv match byte for byte across thread counts
        - the recorded config carries no thread count
        """
        args_a = self._lil_constant_args(write_config, tmp_path / "a") + ["--threads", "1"]
        args_b = self._lil_constant_args(write_config, tmp_path / "b") + ["--threads", "8"]
        assert main(args_a) == 0 and main(args_b) == 0
        for name in (REPORT_FILE, SERIES_FILE):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), f"{name} differs"
        assert "threads" not in load_report(tmp_path / "a" / REPORT_FILE)["config"]

    def test_invalid_config_exit_code(self, write_config, tmp_path, capsys):
        """
        Expected:
        - exit code 1 and the offending key printed
        """
        path = write_config({"p": 1.5})
        assert main(["em-rate", "--config", str(path), "--out", str(tmp_path / "x")]) == 1
        assert "p:" in capsys.readouterr().out

    def test_failed_check_exit_code(self, write_config, tmp_path):
        """
        Expected:
        - a wrong expected_M makes the run exit 1 while still writing results
        """
        path = write_config({"indices": [0, 0], "sigma": [[1.0]], "expected_M": 0.9,
                             "optimizer": SMALL_OPTIMIZER})
        out = tmp_path / "fail"
        assert main(["lil-constant", "--config", str(path), "--out", str(out)]) == 1
        assert load_report(out / REPORT_FILE)["passed"] is False

    def test_bad_seed(self, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(["lil-constant", "--seed", "-1", "--out", str(tmp_path)])
        assert info.value.code == 2

    def test_solver_error_exit_code(self, write_config, tmp_path, capsys, mocker):
        """
        Expected:
        - a library error inside the runner exits 1 with its class name printed
        """
        mocker.patch("roughflow.avg_cli.cli.run_experiment",
                     side_effect=ExplosionError("state left the explosion bound at step 3", step=3))
        assert main(self._lil_constant_args(write_config, tmp_path / "boom")) == 1
        assert "ExplosionError" in capsys.readouterr().out

    def test_overrides_reach_loader(self, write_config, tmp_path, mocker):
        """
        Expected:
        - --seed, --replicas and --threads are passed through to load_config
        """
        spy = mocker.spy(cli_module, "load_config")
        args = self._lil_constant_args(write_config, tmp_path / "spy") + ["--threads", "2"]
        assert main(args) == 0
        assert spy.call_args.args[2:] == (0, 2, 2)


@pytest.mark.acceptance
@pytest.mark.slow
class TestCommittedConfigs:
    """Committed configs run end to end with fewer replicas."""

    def test_lil_constant_config(self, tmp_path):
        """
        Expected:
        - the level-3 scalar constant 1/6 is found and the run exits 0
        """
        from tests.conftest import CONFIGS_DIR

        out = tmp_path / "lil-constant"
        args = ["lil-constant", "--config", str(CONFIGS_DIR / "lil-constant.json"), "--seed", "0", "--out", str(out)]
        assert main(args) == 0
        report = load_report(out / REPORT_FILE)
        assert abs(report["summary"]["M"] - 1.0 / 6.0) < 1e-6, f"M = {report['summary']['M']}"

    def test_invariance_config(self, tmp_path):
        """
        Test two-state-0.3 at N = 4096 with 400 replicas.

        Expected:
        - every check passes and one series row is written per replica
        """
        from tests.conftest import CONFIGS_DIR

        out = tmp_path / "invariance"
        args = ["invariance", "--config", str(CONFIGS_DIR / "invariance.json"), "--seed", "7",
                "--replicas", "400", "--out", str(out)]
        assert main(args) == 0
        assert len((out / SERIES_FILE).read_text().splitlines()) == 401
