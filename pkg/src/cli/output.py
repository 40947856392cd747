"""Report files and the trace cache of a run directory."""

import hashlib
import json
import logging
import os
from typing import Optional

from pydantic import BaseModel

from src.kernel.polynomial import RealPolynomial
from src.recurrence.export import read_trace_csv, write_trace_csv
from src.recurrence.trace import RecurrenceTrace
from src.schemas import RunConfig

logger = logging.getLogger(__name__)

TRACE_FILE = "trace.csv"
TRACE_META_FILE = "trace.meta.json"


def write_json(report: BaseModel, path: str) -> str:
    """Write a report model as indented JSON (NaN and infinities become null)."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(report.model_dump_json(indent=2, by_alias=True))
        fh.write("\n")
    logger.info(f"Wrote {path}")
    return path


def config_hash(cfg: RunConfig) -> str:
    """sha256 of the settings that determine a recurrence trace."""
    key = json.dumps({"f": cfg.f_coeffs, "P": cfg.P, "precision": cfg.precision}, sort_keys=True)
    return hashlib.sha256(key.encode("utf-8")).hexdigest()


def save_trace(trace: RecurrenceTrace, cfg: RunConfig) -> str:
    """Write trace.csv and the metadata that lets later runs reuse it."""
    path = write_trace_csv(trace, os.path.join(cfg.output_dir, TRACE_FILE))
    meta = {
        "config_hash": config_hash(cfg),
        "f_coeffs": cfg.f_coeffs,
        "P": cfg.P,
        "precision": cfg.precision,
        "x_star": trace.x_star,
    }
    with open(os.path.join(cfg.output_dir, TRACE_META_FILE), "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")
    return path


def load_cached_trace(cfg: RunConfig, f: RealPolynomial) -> Optional[RecurrenceTrace]:
    """The trace in output_dir when its stored config hash matches ``cfg``, else None."""
    meta_path = os.path.join(cfg.output_dir, TRACE_META_FILE)
    csv_path = os.path.join(cfg.output_dir, TRACE_FILE)
    if not (os.path.exists(meta_path) and os.path.exists(csv_path)):
        return None
    try:
        with open(meta_path) as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        logger.warning(f"Ignoring unreadable trace metadata {meta_path}: {e}")
        return None
    if meta.get("config_hash") != config_hash(cfg):
        logger.info("Cached trace was built with other settings; simulating again")
        return None
    logger.info(f"Reusing cached trace {csv_path}")
    return read_trace_csv(csv_path, f)
