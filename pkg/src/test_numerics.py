# test_numerics.py - Double-double, scaled reals, norms, quadrature and rationals
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import beta

from src.errors import DivideByZero, NonFinite
from src.numerics.accumulate import CompensatedAccumulator, compensated_sum, dd_cumsum
from src.numerics.double_double import (
    chunked_pairwise_sum,
    dd_add,
    dd_div,
    dd_from_fraction,
    dd_mul,
    dd_ratio,
    pairwise_sum,
    two_prod,
    two_sum,
)
from src.numerics.linalg import faddeev_leverrier, power_iteration, spectral_norm
from src.numerics.quadrature import c_sigma, gauss_quadrature
from src.numerics.rational import rational_div, rational_eval, rational_pow, to_rational
from src.numerics.scaled import ScaledReal, normalize_arrays


def _exact(hi, lo) -> Fraction:
    return Fraction(float(hi)) + Fraction(float(lo))


@pytest.mark.unit
class TestErrorFreeTransforms:
    def test_two_sum_recovers_rounding_error(self):
        s, e = two_sum(1.0, 1e-17)
        assert s == 1.0
        assert e == 1e-17

    def test_two_prod_is_exact(self):
        a, b = 0.1, 0.3
        p, e = two_prod(a, b)
        assert _exact(p, e) == Fraction(a) * Fraction(b)

    def test_dd_from_fraction_third(self):
        hi, lo = dd_from_fraction(Fraction(1, 3))
        assert abs(_exact(hi, lo) - Fraction(1, 3)) < Fraction(1, 10 ** 31)

    def test_dd_arithmetic_keeps_extra_digits(self):
        ah, al = dd_from_fraction(Fraction(1, 3))
        bh, bl = dd_from_fraction(Fraction(2, 7))
        sh, sl = dd_add(ah, al, bh, bl)
        assert abs(_exact(sh, sl) - Fraction(13, 21)) < Fraction(1, 10 ** 30)
        mh, ml = dd_mul(ah, al, bh, bl)
        assert abs(_exact(mh, ml) - Fraction(2, 21)) < Fraction(1, 10 ** 30)
        qh, ql = dd_div(ah, al, bh, bl)
        assert abs(_exact(qh, ql) - Fraction(7, 6)) < Fraction(1, 10 ** 30)

    def test_dd_ratio_of_integers(self):
        hi, lo = dd_ratio(np.array([1.0, 2.0]), 3)
        assert abs(_exact(hi[0], lo[0]) - Fraction(1, 3)) < Fraction(1, 10 ** 31)
        assert abs(_exact(hi[1], lo[1]) - Fraction(2, 3)) < Fraction(1, 10 ** 31)


@pytest.mark.unit
class TestSummation:
    def test_pairwise_sum_of_tenths(self):
        values = np.full(10, 0.1)
        hi, lo = pairwise_sum(values, np.zeros(10))
        assert abs(hi + lo - 1.0) <= 1e-16

    def test_pairwise_sum_empty(self):
        assert pairwise_sum(np.array([]), np.array([])) == (0.0, 0.0)

    def test_chunked_sum_is_independent_of_executor(self):
        rng = np.random.default_rng(3)
        hi = rng.standard_normal(10_000)
        lo = np.zeros_like(hi)
        serial = chunked_pairwise_sum(hi, lo, chunk_size=512)
        with ThreadPoolExecutor(max_workers=4) as executor:
            threaded = chunked_pairwise_sum(hi, lo, chunk_size=512, executor=executor)
        assert serial == threaded

    def test_compensated_sum_cancellation(self):
        assert compensated_sum([1e16, 1.0, -1e16]) == 1.0

    def test_accumulator_scalar_path(self):
        acc = CompensatedAccumulator()
        for x in (1e16, 1.0, -1e16):
            acc.add(x)
        assert acc.value == 1.0
        assert float(acc) == 1.0

    def test_dd_cumsum_prefixes(self):
        hi, lo = dd_cumsum(np.full(10, 0.1))
        assert abs(hi[-1] + lo[-1] - 1.0) <= 1e-16
        assert abs(hi[4] + lo[4] - 0.5) <= 1e-16


@pytest.mark.unit
class TestScaledReal:
    def test_from_float_normalizes(self):
        x = ScaledReal.from_float(3.0)
        assert x.mantissa == 1.5
        assert x.exponent == 1
        assert x.to_float() == 3.0

    def test_unnormalized_mantissa_rejected(self):
        with pytest.raises(ValueError):
            ScaledReal(3.0, 0)

    def test_products_beyond_double_range(self):
        big = ScaledReal.from_float(1.5, 2000)
        small = ScaledReal.from_float(1.0, -1500)
        product = big * small
        assert product.exponent == 500
        assert product.mantissa == 1.5
        assert (big * big).to_float() == math.inf

    def test_integer_power(self):
        x = ScaledReal.from_float(2.0) ** 3000
        assert x.mantissa == 1.0
        assert x.exponent == 3000

    def test_addition_aligns_exponents(self):
        total = ScaledReal.from_float(1.0, 10) + ScaledReal.from_float(1.0, 9)
        assert total.to_float() == 1536.0

    def test_normalize_arrays(self):
        m, e = normalize_arrays(np.array([3.0, 0.0, 0.75]), np.array([0, 5, 2]))
        np.testing.assert_array_equal(m, [1.5, 0.0, 1.5])
        np.testing.assert_array_equal(e, [1, 0, 1])


@pytest.mark.unit
class TestLinalg:
    def test_spectral_norm_diagonal(self):
        assert spectral_norm(np.diag([3.0, 1.0])) == pytest.approx(3.0, rel=1e-12)

    def test_spectral_norm_matches_svd(self):
        rng = np.random.default_rng(7)
        M = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert spectral_norm(M) == pytest.approx(np.linalg.norm(M, 2), rel=1e-8)

    def test_zero_matrix(self):
        norm, _ = power_iteration(np.zeros((3, 3)))
        assert norm == 0.0

    def test_non_finite_rejected(self):
        with pytest.raises(NonFinite):
            power_iteration(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_faddeev_leverrier_generator(self):
        coeffs = faddeev_leverrier(np.array([[-5.0, 6.0], [-4.0, 4.0]]))
        np.testing.assert_allclose(coeffs, [1.0, 1.0, 4.0], atol=1e-14)


@pytest.mark.unit
class TestQuadrature:
    def test_polynomial_exact(self):
        assert gauss_quadrature(lambda g: 6 * g ** 5, nodes=8) == pytest.approx(1.0, abs=1e-14)

    def test_c_sigma_half_is_pi(self):
        assert c_sigma(0.5) == pytest.approx(math.pi, rel=1e-12)

    def test_c_sigma_zero_is_one(self):
        assert c_sigma(0.0) == pytest.approx(1.0, rel=1e-10)

    def test_c_sigma_beta_function(self):
        assert c_sigma(0.75) == pytest.approx(beta(0.25, 0.25), rel=1e-9)
        assert c_sigma(0.25) == pytest.approx(beta(0.75, 0.75), rel=1e-6)

    def test_c_sigma_domain(self):
        with pytest.raises(ValueError):
            c_sigma(1.0)

    def test_bad_substitution(self):
        with pytest.raises(ValueError):
            gauss_quadrature(np.ones_like, substitution="tanh")


@pytest.mark.unit
class TestRational:
    def test_decimal_strings_are_exact(self):
        assert to_rational("0.1") == Fraction(1, 10)

    def test_eval_standard_polynomial(self):
        assert rational_eval([4, -10, 6], Fraction(1, 2)) == Fraction(1, 2)

    def test_division_by_zero(self):
        with pytest.raises(DivideByZero):
            rational_div(1, 0)
        with pytest.raises(DivideByZero):
            rational_pow(0, -1)

    def test_divide_by_zero_is_zero_division_error(self):
        with pytest.raises(ZeroDivisionError):
            rational_div(Fraction(3, 4), "0")
