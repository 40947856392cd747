"""CSV export of recurrence traces (p, log_c, a_p, xi_p, delta_p)."""

import csv
import logging
import os

import numpy as np

from src.errors import ConfigurationError
from src.kernel.polynomial import RealPolynomial
from src.recurrence.trace import RecurrenceTrace

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("p", "log_c", "a_p", "xi_p", "delta_p")


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def write_trace_csv(trace: RecurrenceTrace, path: str) -> str:
    """Write rows p = 1..P with 17 significant digits; NaN is written as ``nan``."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for p in range(1, trace.P + 1):
            writer.writerow([
                p,
                format_float(trace.log_c[p]),
                format_float(trace.a[p]),
                format_float(trace.xi[p]),
                format_float(trace.delta[p]),
            ])
    logger.info(f"Wrote trace with {trace.P} rows to {path}")
    return path


def read_trace_csv(path: str, f: RealPolynomial) -> RecurrenceTrace:
    """Load a trace written by ``write_trace_csv``.

    Raises:
        ConfigurationError: If the header or the p column is not as written
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != TRACE_COLUMNS:
            raise ConfigurationError(f"{path} is not a trace file (header {header})")
        rows = [row for row in reader if row]
    P = len(rows)
    data = np.full((P + 1, 4), np.nan)
    for i, row in enumerate(rows, start=1):
        if len(row) != len(TRACE_COLUMNS):
            raise ConfigurationError(f"{path}: row {i} has {len(row)} fields",
                                     {"expected": len(TRACE_COLUMNS)})
        try:
            p = int(row[0])
            values = [float(v) for v in row[1:]]
        except ValueError as e:
            raise ConfigurationError(f"{path}: row {i} is not numeric ({e})") from e
        if p != i:
            raise ConfigurationError(f"{path}: expected p = {i}, found {row[0]}")
        data[i] = values
    logger.debug(f"Read trace with {P} rows from {path}")
    return RecurrenceTrace.from_columns(f, data[:, 0], data[:, 1], data[:, 2], data[:, 3])
