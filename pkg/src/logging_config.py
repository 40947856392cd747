"""Logging setup for recurflow runs"""
import logging
import logging.config
import os
import time
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional

from src.config import config


def build_logging_config(level: Optional[str] = None,
                         log_file: Optional[str] = None) -> Dict[str, Any]:
    """Return a dictConfig mapping with console and optional rotating file handlers."""
    level = (level or config.logging.level).upper()
    log_file = log_file if log_file is not None else config.logging.file_path

    handlers: Dict[str, Any] = {
        'console': {
            'class': 'logging.StreamHandler',
            'level': level,
            'formatter': 'default',
            'stream': 'ext://sys.stderr',
        },
    }
    if log_file:
        handlers['file'] = {
            'class': 'logging.handlers.RotatingFileHandler',
            'level': 'DEBUG',
            'formatter': 'detailed',
            'filename': log_file,
            'maxBytes': config.logging.max_bytes,
            'backupCount': config.logging.backup_count,
        }

    return {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'default': {
                'format': config.logging.format,
            },
            'detailed': {
                'format': '%(asctime)s - %(name)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s',
            },
        },
        'handlers': handlers,
        'loggers': {
            'src': {'handlers': list(handlers), 'level': level, 'propagate': False},
        },
        'root': {
            'handlers': ['console'],
            'level': 'WARNING',
        },
    }


def configure_logging(level: Optional[str] = None,
                      log_file: Optional[str] = None) -> logging.Logger:
    if log_file:
        os.makedirs(os.path.dirname(os.path.abspath(log_file)), exist_ok=True)
    logging.config.dictConfig(build_logging_config(level, log_file))
    logger = logging.getLogger('src')
    logger.debug(f"Logging configured (level={level or config.logging.level})")
    return logger


@contextmanager
def log_stage(logger: logging.Logger, stage: str) -> Iterator[None]:
    """Log start, duration and failure of one pipeline stage."""
    start = time.perf_counter()
    logger.info(f"Stage {stage}: started")
    try:
        yield
    except Exception as e:
        duration = (time.perf_counter() - start) * 1000
        logger.error(f"Stage {stage}: failed after {duration:.1f}ms - {e}")
        raise
    duration = (time.perf_counter() - start) * 1000
    logger.info(f"Stage {stage}: done in {duration:.1f}ms")
