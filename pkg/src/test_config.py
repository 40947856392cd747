# test_config.py - Tests for configuration, logging setup and error payloads
import logging

import pytest

from src.config import Config, config
from src.errors import ConfigurationError, HypothesisViolated, NormBlowup, RecurflowError
from src.logging_config import build_logging_config, configure_logging, log_stage


@pytest.mark.unit
class TestConfig:
    """Test environment-driven configuration"""

    def test_defaults(self):
        assert config.app_name == "recurflow"
        assert config.tolerances.identity_residual == 1e-8
        assert config.tolerances.plateau_rtol == 0.05
        assert config.engine.chunk_size >= 2

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("RECURFLOW_THREADS", "4")
        monkeypatch.setenv("RECURFLOW_OUTPUT_DIR", "results")
        monkeypatch.setenv("LOG_LEVEL", "debug")
        cfg = Config()
        assert cfg.engine.threads == 4
        assert cfg.output_dir == "results"
        assert cfg.logging.level == "DEBUG"

    @pytest.mark.parametrize("name,value", [
        ("RECURFLOW_THREADS", "0"),
        ("RECURFLOW_THREADS", "many"),
        ("RECURFLOW_CHUNK_SIZE", "1"),
        ("RECURFLOW_RENORM_THRESHOLD", "0"),
        ("LOG_LEVEL", "LOUD"),
    ])
    def test_invalid_environment(self, monkeypatch, name, value):
        monkeypatch.setenv(name, value)
        with pytest.raises(ConfigurationError):
            Config()

    def test_repr(self):
        assert "recurflow" in repr(config)


@pytest.mark.unit
class TestErrors:
    """Test error payloads and exit codes"""

    def test_to_dict(self):
        error = ConfigurationError("bad value", {"field": "P"})
        assert error.to_dict() == {
            "error": "bad value",
            "error_type": "ConfigurationError",
            "exit_code": 1,
            "details": {"field": "P"},
        }

    def test_check_failures_exit_two(self):
        assert NormBlowup("too large").exit_code == 2
        assert HypothesisViolated("N0", "too small").exit_code == 2

    def test_configuration_error_is_value_error(self):
        assert isinstance(ConfigurationError("x"), ValueError)
        assert isinstance(ConfigurationError("x"), RecurflowError)


@pytest.mark.unit
class TestLogging:
    """Test logging configuration helpers"""

    def test_console_only(self):
        cfg = build_logging_config("debug", "")
        assert list(cfg["handlers"]) == ["console"]
        assert cfg["handlers"]["console"]["level"] == "DEBUG"
        assert cfg["loggers"]["src"]["handlers"] == ["console"]

    def test_file_handler(self, tmp_path):
        cfg = build_logging_config("INFO", str(tmp_path / "run.log"))
        assert cfg["handlers"]["file"]["filename"] == str(tmp_path / "run.log")
        assert cfg["loggers"]["src"]["handlers"] == ["console", "file"]

    def test_configure_logging_creates_log_directory(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        logger = configure_logging("INFO", str(log_file))
        logger.info("configured")
        for handler in logger.handlers:
            handler.flush()
        assert log_file.exists()
        configure_logging("WARNING", "")

    def test_log_stage(self, caplog):
        logger = logging.getLogger("stage_test")
        with caplog.at_level(logging.INFO, logger="stage_test"):
            with log_stage(logger, "demo"):
                pass
        messages = [r.getMessage() for r in caplog.records]
        assert "Stage demo: started" in messages
        assert any(m.startswith("Stage demo: done") for m in messages)

    def test_log_stage_reraises(self, caplog):
        logger = logging.getLogger("stage_test")
        with caplog.at_level(logging.INFO, logger="stage_test"):
            with pytest.raises(RuntimeError):
                with log_stage(logger, "broken"):
                    raise RuntimeError("boom")
        assert any("failed" in r.getMessage() for r in caplog.records if r.levelno == logging.ERROR)

    def test_reconfigure_does_not_stack_handlers(self):
        logger = configure_logging("INFO", "")
        count = len(logger.handlers)
        assert count == 1
        assert configure_logging("DEBUG", "") is logger
        assert len(logger.handlers) == count
        assert logger.level == logging.DEBUG
        configure_logging("WARNING", "")
