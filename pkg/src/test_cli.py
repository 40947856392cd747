# test_cli.py - Tests for the recurflow command line
import json
import os

import pytest

from src.cli import build_parser, load_run_config, main
from src.cli.output import TRACE_FILE, TRACE_META_FILE, config_hash, load_cached_trace
from src.errors import ConfigurationError
from src.kernel.polynomial import RealPolynomial
from src.schemas import REPORT_MODELS, RunConfig


def _read_json(path):
    with open(path) as fh:
        return json.load(fh)


@pytest.mark.unit
class TestParser:
    """Test flag parsing and RunConfig assembly"""

    def test_defaults(self):
        cfg = load_run_config(build_parser().parse_args(["spectrum"]))
        assert cfg.f_coeffs == [4.0, -10.0, 6.0]
        assert cfg.P == 2048
        assert cfg.precision == "double-double"

    def test_flags(self):
        args = build_parser().parse_args([
            "verify", "--f", "1,2", "--P", "100", "--precision", "double",
            "--checks", "identity_residual,e3_bound", "--fit-range", "10,90",
            "--threshold", "epsilon=0.1", "--threshold", "plateau_rtol=0.2", "--threads", "2",
        ])
        cfg = load_run_config(args)
        assert cfg.f_coeffs == [1.0, 2.0]
        assert cfg.P == 100
        assert cfg.precision == "double"
        assert cfg.checks == ["identity_residual", "e3_bound"]
        assert cfg.fit_range == (10, 90)
        assert cfg.thresholds == {"epsilon": 0.1, "plateau_rtol": 0.2}
        assert cfg.threads == 2

    def test_stability_flags(self):
        cfg = load_run_config(build_parser().parse_args(
            ["stability", "--kernel", "0:3", "--q0", "2,5"]))
        assert cfg.kernel == "0:3"
        assert cfg.q0 == [2, 5]

    def test_config_file_with_override(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"f_coeffs": [1.0], "P": 64, "thresholds": {"epsilon": 0.1}}))
        args = build_parser().parse_args(["simulate", "--config", str(path), "--P", "32",
                                          "--threshold", "bound_ratio=2"])
        cfg = load_run_config(args)
        assert cfg.f_coeffs == [1.0]
        assert cfg.P == 32
        assert cfg.thresholds == {"epsilon": 0.1, "bound_ratio": 2.0}

    def test_config_file_must_hold_object(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigurationError):
            load_run_config(build_parser().parse_args(["simulate", "--config", str(path)]))

    def test_missing_config_file(self, tmp_path):
        args = build_parser().parse_args(["simulate", "--config", str(tmp_path / "missing.json")])
        with pytest.raises(ConfigurationError):
            load_run_config(args)

    def test_unknown_config_key(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"horizon": 10}))
        with pytest.raises(ConfigurationError) as exc:
            load_run_config(build_parser().parse_args(["simulate", "--config", str(path)]))
        assert exc.value.details["errors"][0]["field"] == "horizon"

    def test_unknown_check_rejected(self):
        with pytest.raises(ConfigurationError):
            load_run_config(build_parser().parse_args(["verify", "--checks", "bogus"]))

    def test_usage_errors_raise(self):
        with pytest.raises(ConfigurationError):
            build_parser().parse_args(["nope"])
        with pytest.raises(ConfigurationError):
            build_parser().parse_args(["spectrum", "--P", "many"])
        with pytest.raises(ConfigurationError):
            build_parser().parse_args(["verify", "--threshold", "epsilon"])

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            build_parser().parse_args(["--version"])
        assert exc.value.code == 0
        assert "recurflow" in capsys.readouterr().out


@pytest.mark.integration
class TestSpectrumCommand:
    """Test the spectrum command and its exit codes"""

    def test_standard_f_passes(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["spectrum", "--f", "4,-10,6", "--output-dir", str(out)]) == 0
        report = _read_json(out / "spectrum.json")
        assert report["sigma_G"] == pytest.approx(-0.5)
        assert report["alpha_f"] == pytest.approx(1.5)
        assert os.path.exists(out / "assumption.json")
        assert json.loads(capsys.readouterr().out)["sigma_G"] == pytest.approx(-0.5)

    def test_roots_outside_strip(self, tmp_path):
        assert main(["spectrum", "--f=0,6,-6", "--output-dir", str(tmp_path)]) == 2

    def test_constant_f_is_an_error(self, tmp_path, capsys):
        assert main(["spectrum", "--f", "1", "--output-dir", str(tmp_path)]) == 1
        err = capsys.readouterr().err
        assert '"error_type": "DegenerateKernel"' in err
        assert '"exit_code": 1' in err

    def test_usage_error_exit_code(self, capsys):
        assert main(["spectrum", "--precision", "quad"]) == 1
        assert '"error_type": "ConfigurationError"' in capsys.readouterr().err

    def test_invalid_config_exit_code(self, tmp_path):
        assert main(["verify", "--checks", "bogus", "--output-dir", str(tmp_path)]) == 1


@pytest.mark.integration
class TestSimulateAndVerify:
    """Test simulation output, the trace cache and verification"""

    def test_tiny_horizon(self, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--P", "2", "--output-dir", str(out)]) == 0
        summary = _read_json(out / "summary.json")
        assert summary["P"] == 2
        assert summary["x_star"] is None
        with open(out / TRACE_FILE) as fh:
            assert len(fh.read().strip().splitlines()) >= 2

    def test_simulate_writes_cache(self, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--P", "256", "--output-dir", str(out)]) == 0
        meta = _read_json(out / TRACE_META_FILE)
        cfg = RunConfig(P=256, output_dir=str(out))
        assert meta["config_hash"] == config_hash(cfg)
        summary = _read_json(out / "summary.json")
        assert summary["x_star"] is not None
        assert summary["alpha_f"] == pytest.approx(1.5)

        cached = load_cached_trace(cfg, RealPolynomial.parse("4,-10,6"))
        assert cached is not None and cached.P == 256
        assert load_cached_trace(RunConfig(P=128, output_dir=str(out)),
                                 RealPolynomial.parse("4,-10,6")) is None

    def test_corrupt_metadata_is_ignored(self, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--P", "64", "--output-dir", str(out)]) == 0
        (out / TRACE_META_FILE).write_text("{not json")
        cfg = RunConfig(P=64, output_dir=str(out))
        assert load_cached_trace(cfg, RealPolynomial.parse("4,-10,6")) is None

    def test_verify_reuses_trace(self, tmp_path):
        out = tmp_path / "out"
        assert main(["simulate", "--P", "256", "--output-dir", str(out)]) == 0
        stamp = os.path.getmtime(out / TRACE_FILE)
        code = main(["verify", "--P", "256", "--output-dir", str(out),
                     "--checks", "identity_residual,hat_xi_bound,e3_bound"])
        assert code == 0
        assert os.path.getmtime(out / TRACE_FILE) == stamp
        report = _read_json(out / "verification.json")
        assert report["all_passed"] is True
        assert set(report["checks"]) == {"identity_residual", "hat_xi_bound", "e3_bound"}
        assert report["checks"]["e3_bound"]["pass"] is True

    def test_verify_simulates_without_cache(self, tmp_path):
        out = tmp_path / "out"
        assert main(["verify", "--P", "64", "--output-dir", str(out), "--checks", "e3_bound"]) == 0
        assert os.path.exists(out / TRACE_FILE)
        assert os.path.exists(out / TRACE_META_FILE)


@pytest.mark.integration
class TestLinearAndStability:
    """Test the linear and stability commands"""

    def test_zero_initial_value(self, tmp_path):
        out = tmp_path / "out"
        code = main(["linear", "--kernel", "0:-4,1:6", "--xi2", "0", "--P", "200",
                     "--output-dir", str(out)])
        assert code == 0
        report = _read_json(out / "linear.json")
        assert report["sup_scaled"] == 0.0
        assert report["fit"] is None
        with open(out / "linear.csv") as fh:
            lines = fh.read().strip().splitlines()
        assert lines[0] == "p,xi_p,abs_xi_p,h_p"
        assert len(lines) == 200

    def test_homogeneous_decay(self, tmp_path):
        out = tmp_path / "out"
        assert main(["linear", "--P", "2000", "--output-dir", str(out)]) == 0
        report = _read_json(out / "linear.json")
        assert report["sigma_G"] == pytest.approx(-0.5)
        assert report["plateau_detected"] is True
        assert report["matrix_path_mismatch"] < 1e-8

    def test_forced_run_is_labelled(self, tmp_path):
        out = tmp_path / "out"
        main(["linear", "--P", "500", "--forcing-exponent", "-0.75", "--output-dir", str(out)])
        report = _read_json(out / "linear.json")
        assert report["forcing"] == "1.0*p^-0.75"

    def test_stability(self, tmp_path):
        out = tmp_path / "out"
        assert main(["stability", "--q0", "2,10", "--P", "5000", "--output-dir", str(out)]) == 0
        report = _read_json(out / "stability.json")
        assert report["passed"] is True
        assert report["eigen"]["passed"] is True

    def test_q0_beyond_horizon(self, tmp_path):
        assert main(["stability", "--q0", "500", "--P", "100", "--output-dir", str(tmp_path)]) == 1


@pytest.mark.unit
class TestSchemasCommand:
    """Test JSON schema generation"""

    def test_writes_every_model(self, tmp_path):
        schema_dir = tmp_path / "schemas"
        assert main(["schemas", "--schema-dir", str(schema_dir)]) == 0
        written = sorted(os.listdir(schema_dir))
        assert written == sorted(f"{name}.json" for name in REPORT_MODELS)
        check = _read_json(schema_dir / "check_result.json")
        assert "pass" in check["properties"]
