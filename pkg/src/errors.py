"""
Error Hierarchy

Every failure raised by the library derives from RecurflowError. The CLI turns
these into exit codes (1 = error, 2 = check failure) and a JSON document on
stderr built from ``to_dict()``.
"""

from typing import Any, Dict, Optional


class RecurflowError(Exception):
    """Base class for all recurflow failures.

    Attributes:
        message: Human readable description
        exit_code: Process exit code the CLI should use
        details: Structured context (offending index, measured values, ...)
    """

    exit_code: int = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": self.message,
            "error_type": type(self).__name__,
            "exit_code": self.exit_code,
            "details": self.details,
        }


class ConfigurationError(RecurflowError, ValueError):
    """Invalid configuration value."""


class DegenerateKernel(RecurflowError):
    """The kernel has no n >= 1 terms, so there is no characteristic equation."""


class RootFindingFailure(RecurflowError):
    """Simultaneous iteration did not converge or a root failed back-substitution."""


class NonFinite(RecurflowError, ValueError):
    """A matrix or sequence contains NaN or infinite entries."""


class DivideByZero(RecurflowError, ZeroDivisionError):
    """Exact rational division by zero."""


class SignDegeneracy(RecurflowError):
    """c_p <= 0, so a_p = c_p^(-1/p) is not a positive normalizer.

    The partially built trace (indices below ``p``) is attached as ``trace``.
    """

    def __init__(self, p: int, value: float, trace: Any = None):
        super().__init__(
            f"c_p is not positive at p={p} (mantissa {value!r})",
            {"p": p, "value": value},
        )
        self.p = p
        self.trace = trace


class InsufficientHorizon(RecurflowError):
    """The trace is too short for the requested estimate."""


class ZeroInput(RecurflowError, ValueError):
    """x = 0 has no scaling ratio R."""


class NormBlowup(RecurflowError):
    """A product norm exceeded the configured cap."""

    exit_code = 2


class HypothesisViolated(RecurflowError):
    """A lemma hypothesis does not hold on the given trace."""

    exit_code = 2

    def __init__(self, item: str, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, {"item": item, **(details or {})})
        self.item = item


class InsufficientData(RecurflowError):
    """Too few usable points for a fit."""
