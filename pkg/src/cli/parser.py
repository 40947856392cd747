"""Argument parsing and RunConfig assembly for the recurflow command line."""

import argparse
import json
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from src import __version__
from src.errors import ConfigurationError
from src.schemas import CHECK_NAMES, RunConfig

COMMAND_HELP = {
    "spectrum": "Characteristic roots, sigma_G and alpha_f of f",
    "simulate": "Run the recurrence and estimate x*",
    "linear": "Solve the linear system and fit its decay",
    "stability": "Matrix-product norm scan and eigenvalue cross-check",
    "verify": "Run the lemma verification suite on a (cached) trace",
    "schemas": "Regenerate the JSON schemas of every report",
}

# flag dest -> RunConfig field
FIELD_NAMES = {
    "f": "f_coeffs",
    "P": "P",
    "precision": "precision",
    "seed": "seed",
    "output_dir": "output_dir",
    "checks": "checks",
    "fit_range": "fit_range",
    "threads": "threads",
    "kernel": "kernel",
    "xi2": "xi2",
    "forcing_exponent": "forcing_exponent",
    "forcing_amplitude": "forcing_amplitude",
    "q0": "q0",
}


class RecurflowArgumentParser(argparse.ArgumentParser):
    """Usage errors raise ConfigurationError so they exit 1 like every other error."""

    def error(self, message):
        raise ConfigurationError(f"{self.prog}: {message}")


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _fit_range(text: str) -> List[int]:
    values = _int_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected lo,hi, got {text!r}")
    return values


def _threshold(text: str):
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"threshold {name!r} is not a number: {value!r}") from e


def _common_flags() -> argparse.ArgumentParser:
    common = RecurflowArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--f", help='Coefficients of f, lowest degree first, e.g. "4,-10,6"')
    common.add_argument("--P", type=int, help="Horizon")
    common.add_argument("--precision", choices=["double", "double-double"])
    common.add_argument("--seed", type=int)
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--checks", help=f"Comma-separated subset of: {', '.join(CHECK_NAMES)}")
    common.add_argument("--fit-range", dest="fit_range", type=_fit_range, metavar="LO,HI")
    common.add_argument("--threshold", dest="thresholds", type=_threshold, action="append",
                        metavar="NAME=VALUE", help="Override a check threshold (repeatable)")
    common.add_argument("--threads", type=int)
    common.add_argument("--config", dest="config_file", metavar="FILE.json",
                        help="RunConfig JSON; flags override its values")
    common.add_argument("--log-level", dest="log_level",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--log-file", dest="log_file")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = RecurflowArgumentParser(
        prog="recurflow",
        description="Simulate and verify the quadratic convolution recurrence.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    common = _common_flags()

    commands = {name: subparsers.add_parser(name, parents=[common], help=text,
                                          argument_default=argparse.SUPPRESS)
                for name, text in COMMAND_HELP.items()}

    for name in ("linear", "stability"):
        sub = commands[name]
        sub.add_argument("--kernel", help='Monomial kernel "alpha:C,..." (default: G of f)')
    commands["linear"].add_argument("--xi2", type=float)
    commands["linear"].add_argument("--forcing-exponent", dest="forcing_exponent", type=float)
    commands["linear"].add_argument("--forcing-amplitude", dest="forcing_amplitude", type=float)
    commands["stability"].add_argument("--q0", type=_int_list, metavar="Q0,...")
    commands["schemas"].add_argument("--schema-dir", dest="schema_dir", default="schemas")
    return parser


def load_run_config(args: argparse.Namespace) -> RunConfig:
    """RunConfig from --config (if given) with explicitly passed flags on top.

    Raises:
        ConfigurationError: If the file cannot be read or a value is invalid
    """
    data: Dict[str, Any] = {}
    config_file: Optional[str] = getattr(args, "config_file", None)
    if config_file:
        try:
            with open(config_file) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"Cannot read config file {config_file}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigurationError(f"{config_file} must hold a JSON object")

    for dest, name in FIELD_NAMES.items():
        if hasattr(args, dest):
            data[name] = getattr(args, dest)
    if hasattr(args, "thresholds"):
        data["thresholds"] = {**data.get("thresholds", {}), **dict(args.thresholds)}

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        errors = [{"field": ".".join(str(x) for x in err["loc"]), "message": err["msg"]}
                  for err in e.errors()]
        raise ConfigurationError(f"Invalid run configuration: {errors[0]['message']}",
                                 {"errors": errors}) from e
