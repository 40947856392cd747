"""Simulation of the quadratic convolution recurrence and its asymptotics."""

from src.recurrence.asymptotics import XStarEstimate, compute_R, estimate_x_star
from src.recurrence.engine import EngineConfig, run_recurrence
from src.recurrence.export import TRACE_COLUMNS, read_trace_csv, write_trace_csv
from src.recurrence.oracle import oracle_recurrence
from src.recurrence.trace import RecurrenceTrace

__all__ = [
    "EngineConfig",
    "RecurrenceTrace",
    "TRACE_COLUMNS",
    "XStarEstimate",
    "compute_R",
    "estimate_x_star",
    "oracle_recurrence",
    "read_trace_csv",
    "run_recurrence",
    "write_trace_csv",
]
