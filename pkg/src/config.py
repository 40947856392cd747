"""
Configuration Management Module

Centralized configuration for recurflow. Values come from environment
variables (a local ``.env`` file is honoured through python-dotenv) and are
validated once at load time. Every library operation takes explicit arguments
that override these defaults.
"""

import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

from src.errors import ConfigurationError

load_dotenv()


@dataclass
class LoggingConfig:
    """Logging configuration.

    Attributes:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        format: Log message format
        file_path: Optional path of a rotating log file (None = console only)
        max_bytes: Maximum log file size in bytes
        backup_count: Number of backup log files to keep
    """
    level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file_path: Optional[str] = None
    max_bytes: int = 10485760  # 10MB
    backup_count: int = 5


@dataclass
class EngineSettings:
    """Recurrence engine defaults.

    Attributes:
        threads: Upper bound on worker threads for the chunked convolution
        renorm_threshold: Binary exponent magnitude that triggers a rescale
        chunk_size: Convolution terms per reduction chunk
        xi_double_limit: Largest p for which xi is reported at double precision
    """
    threads: int = 1
    renorm_threshold: int = 100
    chunk_size: int = 4096
    xi_double_limit: int = 4096


@dataclass
class ToleranceConfig:
    """Numerical tolerances shared by the checks.

    Attributes:
        root_tol: Step-size tolerance of the simultaneous root iteration
        residual_tol: Max back-substitution residual accepted for a root
        distinct_rel: Relative separation below which roots count as coincident
        root_max_iter: Iteration cap of the root finder
        identity_residual: Relative residual threshold of the decomposition identity
        norm_cap: Product norm above which a scan aborts
        plateau_rtol: Relative growth of a running sup still counted as a plateau
    """
    root_tol: float = 1e-14
    residual_tol: float = 1e-10
    distinct_rel: float = 1e-8
    root_max_iter: int = 500
    identity_residual: float = 1e-8
    norm_cap: float = 1e8
    plateau_rtol: float = 0.05


class Config:
    """Main configuration object.

    Environment Variables:
        LOG_LEVEL: Logging level
        LOG_FILE: Optional rotating log file
        RECURFLOW_THREADS: Cap on internal parallelism
        RECURFLOW_RENORM_THRESHOLD: Exponent magnitude triggering renormalization
        RECURFLOW_CHUNK_SIZE: Convolution chunk size
        RECURFLOW_OUTPUT_DIR: Default output directory of the CLI

    Example:
        >>> config = Config()
        >>> config.engine.threads
        1
    """

    def __init__(self):
        self.logging = self._load_logging_config()
        self.engine = self._load_engine_settings()
        self.tolerances = ToleranceConfig()
        self.output_dir = os.getenv("RECURFLOW_OUTPUT_DIR", "out")
        self.app_name = "recurflow"
        self.app_version = "1.0.0"
        self._validate()

    def _load_logging_config(self) -> LoggingConfig:
        return LoggingConfig(
            level=os.getenv("LOG_LEVEL", "INFO").upper(),
            file_path=os.getenv("LOG_FILE") or None,
        )

    def _load_engine_settings(self) -> EngineSettings:
        try:
            return EngineSettings(
                threads=int(os.getenv("RECURFLOW_THREADS", 1)),
                renorm_threshold=int(os.getenv("RECURFLOW_RENORM_THRESHOLD", 100)),
                chunk_size=int(os.getenv("RECURFLOW_CHUNK_SIZE", 4096)),
            )
        except ValueError as e:
            raise ConfigurationError(f"Invalid engine setting in environment: {e}") from e

    def _validate(self) -> None:
        """Validate configuration settings.

        Raises:
            ConfigurationError: If a value is out of range
        """
        if self.logging.level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ConfigurationError(f"Unknown LOG_LEVEL {self.logging.level!r}")
        if self.engine.threads < 1:
            raise ConfigurationError(
                f"RECURFLOW_THREADS must be >= 1, got {self.engine.threads}"
            )
        if self.engine.renorm_threshold < 1:
            raise ConfigurationError(
                f"RECURFLOW_RENORM_THRESHOLD must be >= 1, got {self.engine.renorm_threshold}"
            )
        if self.engine.chunk_size < 2:
            raise ConfigurationError(
                f"RECURFLOW_CHUNK_SIZE must be >= 2, got {self.engine.chunk_size}"
            )

    def __repr__(self) -> str:
        return (
            f"Config(app_name='{self.app_name}', version={self.app_version}, "
            f"threads={self.engine.threads})"
        )


# Global configuration instance
config = Config()
