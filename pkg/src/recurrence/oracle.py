"""Exact rational evaluation of the recurrence for small horizons."""

import logging
from fractions import Fraction
from typing import List

from src.errors import ConfigurationError
from src.kernel.polynomial import as_polynomial
from src.numerics.rational import (
    RationalLike,
    rational_div,
    rational_eval,
    rational_mul,
    rational_sum,
    to_rational,
)

logger = logging.getLogger(__name__)

ORACLE_MAX_P = 16


def oracle_recurrence(f, P: int, x: RationalLike = 1) -> List[Fraction]:
    """Lambda_p(x) for p = 0..P in exact arithmetic (entry 0 is 0).

    Coefficients of ``f`` are taken at their exact value (floats by their
    binary expansion), so the result is the ground truth the engine is
    compared against.

    Raises:
        ConfigurationError: If P > 16 or P < 1
    """
    if not 1 <= P <= ORACLE_MAX_P:
        raise ConfigurationError(f"oracle_recurrence supports 1 <= P <= {ORACLE_MAX_P}, got {P}")
    f = as_polynomial(f)
    coeffs = [to_rational(c) for c in f.coeffs]
    lam = [Fraction(0)] * (P + 1)
    lam[1] = to_rational(x)
    for p in range(2, P + 1):
        terms = (rational_mul(rational_eval(coeffs, Fraction(p1, p)), lam[p1] * lam[p - p1])
                 for p1 in range(1, p))
        lam[p] = rational_div(rational_sum(terms), p)
    logger.debug(f"Oracle Lambda_{P}({x}) has a {lam[P].denominator.bit_length()}-bit denominator")
    return lam
