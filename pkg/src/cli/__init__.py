"""Command-line front end: ``python -m src`` or ``recurflow.py``."""

import logging
from typing import List, Optional

from src.cli.commands import (
    COMMANDS,
    cmd_linear,
    cmd_schemas,
    cmd_simulate,
    cmd_spectrum,
    cmd_stability,
    cmd_verify,
    emit_error,
    handle_errors,
)
from src.cli.parser import build_parser, load_run_config
from src.errors import ConfigurationError
from src.logging_config import configure_logging
from src.schemas import ErrorReport

logger = logging.getLogger(__name__)


@handle_errors
def dispatch(args) -> int:
    if args.command == "schemas":
        return cmd_schemas(args.schema_dir)
    cfg = load_run_config(args)
    logger.debug(f"Run configuration: {cfg.model_dump()}")
    return COMMANDS[args.command](cfg)


def main(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, configure logging once and run the chosen command."""
    try:
        args = build_parser().parse_args(argv)
    except ConfigurationError as e:
        emit_error(ErrorReport(**e.to_dict()))
        return e.exit_code
    configure_logging(getattr(args, "log_level", None), getattr(args, "log_file", None))
    return dispatch(args)


__all__ = [
    "COMMANDS",
    "build_parser",
    "cmd_linear",
    "cmd_schemas",
    "cmd_simulate",
    "cmd_spectrum",
    "cmd_stability",
    "cmd_verify",
    "dispatch",
    "handle_errors",
    "load_run_config",
    "main",
]
