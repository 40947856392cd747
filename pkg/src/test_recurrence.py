# test_recurrence.py - Engine, exact oracle, x* estimation and trace export
import math
from fractions import Fraction

import numpy as np
import pytest

from src.errors import ConfigurationError, InsufficientHorizon, SignDegeneracy, ZeroInput
from src.kernel.polynomial import RealPolynomial
from src.recurrence.asymptotics import X_STAR_MIN_P, compute_R, estimate_x_star, tail_exponents
from src.recurrence.engine import EngineConfig, run_recurrence
from src.recurrence.export import TRACE_COLUMNS, read_trace_csv, write_trace_csv
from src.recurrence.oracle import oracle_recurrence
from src.recurrence.trace import RecurrenceTrace
from src.verify.fitting import fit_decay


@pytest.mark.unit
class TestOracle:
    def test_first_coefficients(self, standard_f):
        lam = oracle_recurrence(standard_f, 3)
        assert lam == [0, 1, Fraction(1, 4), Fraction(1, 9)]

    def test_homogeneity(self, standard_f):
        lam = oracle_recurrence(standard_f, 3, x=2)
        assert lam[3] == Fraction(8, 9)

    def test_horizon_limits(self, standard_f):
        with pytest.raises(ConfigurationError):
            oracle_recurrence(standard_f, 17)
        with pytest.raises(ConfigurationError):
            oracle_recurrence(standard_f, 0)


@pytest.mark.unit
class TestEngineConfig:
    def test_horizon_too_small(self):
        with pytest.raises(ConfigurationError):
            EngineConfig(P=1)

    def test_unknown_precision(self):
        with pytest.raises(ConfigurationError):
            EngineConfig(P=10, precision="quad")

    def test_workers(self):
        assert EngineConfig(P=10, threads=4).workers == 1
        assert EngineConfig(P=10, parallel=True, threads=4).workers == 4


@pytest.mark.unit
class TestEngine:
    @pytest.mark.parametrize("precision, rtol", [("double-double", 1e-14), ("double", 1e-12)])
    def test_matches_exact_oracle(self, standard_f, precision, rtol):
        exact = oracle_recurrence(standard_f, 16)
        trace = run_recurrence(standard_f, EngineConfig(P=16, precision=precision))
        for p in range(1, 17):
            assert trace.c_true(p).to_float() == pytest.approx(float(exact[p]), rel=rtol)
            assert math.exp(trace.log_c[p]) == pytest.approx(float(exact[p]), rel=rtol)

    def test_first_fluctuations(self, short_trace):
        assert short_trace.a[2] == pytest.approx(2.0, rel=1e-15)
        assert short_trace.xi[2] == pytest.approx(8.0, rel=1e-13)
        expected_xi3 = 27.0 * (9.0 ** (1.0 / 3.0) / 2.0 - 1.0)
        assert short_trace.xi[3] == pytest.approx(expected_xi3, rel=1e-12)
        assert expected_xi3 == pytest.approx(1.081, abs=1e-3)

    def test_horizon_two(self, standard_f):
        trace = run_recurrence(standard_f, EngineConfig(P=2))
        assert trace.P == 2
        assert trace.log_c.shape == (3,)

    def test_lambda_at_uses_homogeneity(self, short_trace):
        assert short_trace.lambda_at(3, 2.0) == pytest.approx(8.0 / 9.0, rel=1e-14)
        assert short_trace.lambda_at(3, 0.0) == 0.0

    def test_sign_degeneracy(self):
        with pytest.raises(SignDegeneracy) as excinfo:
            run_recurrence(RealPolynomial.parse("-1"), EngineConfig(P=10))
        assert excinfo.value.p == 2
        assert excinfo.value.details["p"] == 2
        assert excinfo.value.trace.P == 1

    def test_parallel_run_is_bit_identical(self, standard_f):
        serial = run_recurrence(standard_f, EngineConfig(P=300, chunk_size=16))
        threaded = run_recurrence(standard_f, EngineConfig(P=300, chunk_size=16, parallel=True, threads=4))
        np.testing.assert_array_equal(serial.log_c[1:], threaded.log_c[1:])
        np.testing.assert_array_equal(serial.mantissa_hi[1:], threaded.mantissa_hi[1:])

    def test_renormalization_leaves_mantissas_alone(self, standard_f):
        rescaled = run_recurrence(standard_f, EngineConfig(P=300))
        raw = run_recurrence(standard_f, EngineConfig(P=300, renorm_threshold=10 ** 9))
        assert rescaled.renormalizations >= 1
        assert raw.renormalizations == 0
        assert raw.scale_log2 == 0
        np.testing.assert_array_equal(rescaled.mantissa_hi[1:], raw.mantissa_hi[1:])
        np.testing.assert_allclose(rescaled.log_c[1:], raw.log_c[1:], rtol=1e-14, atol=1e-12)

    def test_truncated(self, standard_trace):
        cut = standard_trace.truncated(100)
        assert cut.P == 100
        assert cut.x_star is None
        np.testing.assert_array_equal(cut.xi[2:], standard_trace.xi[2:101])


@pytest.mark.unit
class TestSyntheticTraces:
    def test_from_xi(self, standard_f):
        xi = np.array([np.nan, np.nan, 8.0, 1.0, -2.0])
        trace = RecurrenceTrace.from_xi(xi, standard_f)
        assert trace.P == 4
        expected = math.log1p(8.0 / 8.0) + math.log1p(1.0 / 27.0)
        assert trace.log_a[3] == pytest.approx(expected, rel=1e-15)
        np.testing.assert_allclose(trace.xi[2:], xi[2:], rtol=1e-13)

    def test_from_log_c_round_trip(self, short_trace, standard_f):
        rebuilt = RecurrenceTrace.from_log_c(short_trace.log_c, standard_f)
        np.testing.assert_allclose(rebuilt.log_a[1:], short_trace.log_a[1:], rtol=1e-13, atol=1e-15)


@pytest.mark.unit
class TestXStar:
    def test_needs_horizon(self, short_trace):
        with pytest.raises(InsufficientHorizon):
            estimate_x_star(short_trace)
        assert X_STAR_MIN_P == 100

    def test_estimate_close_to_last_normalizer(self, standard_trace):
        assert standard_trace.x_star is not None
        assert standard_trace.x_star / standard_trace.a[standard_trace.P] - 1.0 == pytest.approx(0.0, abs=1e-5)
        assert standard_trace.x_star_err >= 0.0
        assert standard_trace.delta[1] == pytest.approx(standard_trace.x_star - 1.0, rel=1e-12)

    def test_tail_exponents(self):
        roots = (complex(-0.5, 1.9), complex(-0.5, -1.9))
        assert tail_exponents(roots) == (complex(-0.5, 1.9), complex(-1.0, 0.0))

    def test_compute_R(self, standard_trace):
        R, Cp = compute_R(standard_trace, 2.0, alpha_f=1.5)
        assert R == pytest.approx(2.0 / standard_trace.x_star)
        p = 1000
        assert Cp[p] == pytest.approx(standard_trace.delta[p] * p ** 1.5)

    def test_compute_R_rejects_zero(self, standard_trace):
        with pytest.raises(ZeroInput):
            compute_R(standard_trace, 0.0)

    @pytest.mark.slow
    def test_delta_decays_at_alpha_f(self, long_trace):
        fit = fit_decay(long_trace.delta, (256, 8192), oscillatory=True)
        assert -1.6 <= fit.exponent <= -1.4


@pytest.mark.unit
class TestExport:
    def test_csv_round_trip(self, short_trace, standard_f, tmp_path):
        path = write_trace_csv(short_trace, str(tmp_path / "trace.csv"))
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        assert tuple(header) == TRACE_COLUMNS
        loaded = read_trace_csv(path, standard_f)
        assert loaded.P == short_trace.P
        np.testing.assert_array_equal(loaded.log_c[1:], short_trace.log_c[1:])
        np.testing.assert_array_equal(loaded.xi[2:], short_trace.xi[2:])

    def test_csv_is_deterministic(self, short_trace, tmp_path):
        first = write_trace_csv(short_trace, str(tmp_path / "a.csv"))
        second = write_trace_csv(short_trace, str(tmp_path / "b.csv"))
        with open(first, "rb") as a, open(second, "rb") as b:
            assert a.read() == b.read()

    def test_horizon_two_rows(self, standard_f, tmp_path):
        trace = run_recurrence(standard_f, EngineConfig(P=2))
        path = write_trace_csv(trace, str(tmp_path / "trace.csv"))
        with open(path) as fh:
            rows = fh.read().splitlines()
        assert len(rows) == 3
        assert rows[1].startswith("1,") and rows[2].startswith("2,")

    def test_rejects_foreign_csv(self, standard_f, tmp_path):
        path = tmp_path / "other.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ConfigurationError):
            read_trace_csv(str(path), standard_f)

    def test_delta_column_survives(self, standard_trace, standard_f, tmp_path):
        path = write_trace_csv(standard_trace, str(tmp_path / "trace.csv"))
        loaded = read_trace_csv(path, standard_f)
        assert loaded.x_star == pytest.approx(standard_trace.x_star, rel=1e-13)

    def test_header_only_csv_is_rejected(self, standard_f, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text(",".join(TRACE_COLUMNS) + "\n")
        with pytest.raises(ConfigurationError):
            read_trace_csv(str(path), standard_f)

    def test_short_row_is_rejected(self, standard_f, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text(",".join(TRACE_COLUMNS) + "\n1,0,1\n")
        with pytest.raises(ConfigurationError):
            read_trace_csv(str(path), standard_f)

    def test_non_numeric_row_is_rejected(self, standard_f, tmp_path):
        path = tmp_path / "trace.csv"
        path.write_text(",".join(TRACE_COLUMNS) + "\n1,zero,1,nan,nan\n")
        with pytest.raises(ConfigurationError):
            read_trace_csv(str(path), standard_f)

    def test_empty_columns_are_rejected(self, standard_f):
        empty = np.array([])
        with pytest.raises(ConfigurationError):
            RecurrenceTrace.from_columns(standard_f, empty, empty, empty)
        with pytest.raises(ConfigurationError):
            RecurrenceTrace.from_columns(standard_f, np.array([np.nan]), np.array([np.nan]),
                                         np.array([np.nan]), np.array([np.nan]))

    def test_mismatched_columns_are_rejected(self, standard_f):
        with pytest.raises(ConfigurationError):
            RecurrenceTrace.from_columns(standard_f, np.zeros(5), np.ones(5), np.zeros(4))
