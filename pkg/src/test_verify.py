# test_verify.py - Tests for the decomposition, bound checks, decay fits and the verification suite
import math

import numpy as np
import pytest

from src.errors import ConfigurationError, HypothesisViolated, InsufficientData
from src.kernel.polynomial import RealPolynomial, kernel_G, symmetrize
from src.linear.system import run_linear
from src.recurrence.engine import EngineConfig, run_recurrence
from src.schemas import CHECK_NAMES
from src.verify.bounds import (
    AnsatzConstants,
    ansatz_check,
    base_case_verifier,
    bound_ratio,
    e3_bound_check,
    fit_ansatz_constants,
    fit_nonlinear_constants,
    hat_xi,
    hat_xi_bound_check,
    hat_xi_value,
    inductive_step_check,
    last_finite,
    nonlinear_bound_check,
    running_plateau,
)
from src.verify.decomposition import (
    ProductTable,
    decomposition_terms,
    h_sequence,
    identity_residuals,
    main_lemma_residual,
    r1_increments,
    riemann_sum,
)
from src.verify.fitting import crossing_period, fit_decay, fit_envelope
from src.verify.suite import DEFAULT_THRESHOLDS, VerifySettings, run_verification_suite


@pytest.mark.unit
class TestDecomposition:
    """Test the linearization identity and its pieces"""

    def test_riemann_sum_of_constant(self):
        assert riemann_sum(RealPolynomial.parse("1"), 10) == 9.0

    def test_riemann_sum_closed_form(self, standard_f):
        # sum f(p1/p) = (p - 1)^2 / p for this f
        assert riemann_sum(standard_f, 10) == pytest.approx(8.1, rel=1e-15)

    def test_r1_increments_closed_form(self, standard_f):
        ps, inc = r1_increments(standard_f, 200)
        assert ps[0] == 4
        np.testing.assert_allclose(inc, 1.0 / (ps - 1.0), rtol=1e-7)

    def test_identity_holds_on_trace(self, standard_f, standard_trace):
        terms = decomposition_terms(standard_trace, standard_f, 100)
        assert terms.p == 100
        assert terms.relative_residual < 1e-8

    def test_identity_residuals_profile(self, standard_f, standard_trace):
        ps, res = identity_residuals(standard_trace, standard_f, 300)
        assert ps[0] == 3 and ps[-1] == 300
        assert np.max(res) < 1e-8

    def test_decomposition_index_out_of_range(self, standard_f, short_trace):
        with pytest.raises(ConfigurationError):
            decomposition_terms(short_trace, standard_f, 2)
        with pytest.raises(ConfigurationError):
            decomposition_terms(short_trace, standard_f, 65)

    def test_main_lemma_residual_needs_p4(self, standard_f, short_trace):
        with pytest.raises(ConfigurationError):
            main_lemma_residual(short_trace, symmetrize(standard_f), 3)

    def test_main_lemma_residual_is_small(self, standard_f, standard_trace):
        table = ProductTable.from_trace(standard_trace)
        res = main_lemma_residual(standard_trace, symmetrize(standard_f), 1000, table)
        assert math.isfinite(res)
        assert res < 1.0


@pytest.mark.unit
class TestProductTable:
    """Test the prefix-sum product table"""

    def test_log_products_match_direct_sum(self, short_trace):
        table = ProductTable.from_trace(short_trace)
        xi = np.asarray(short_trace.xi, dtype=np.float64)
        q = np.arange(6, 20, dtype=np.float64)
        direct = math.fsum(np.log1p(xi[6:20] / q ** 3))
        assert table.log_products(np.array([5]), 20)[0] == pytest.approx(direct, rel=1e-12, abs=1e-16)

    def test_first_deviation_is_zero(self, short_trace):
        table = ProductTable.from_trace(short_trace)
        D = table.deviations(30)
        assert D.shape == (30,)
        assert D[0] == 0.0

    def test_table_from_plain_array(self, short_trace):
        xi = np.asarray(short_trace.xi, dtype=np.float64)
        table = ProductTable.from_trace(xi)
        assert table.P == short_trace.P
        assert table.steps[0] == 0.0 and table.steps[1] == 0.0


@pytest.mark.unit
class TestHSequence:
    """Test the forcing sequence h_p"""

    def test_vanishes_on_homogeneous_solution(self, standard_kernel, homogeneous_linear):
        h = h_sequence(homogeneous_linear, standard_kernel)
        assert np.all(np.isnan(h[:3]))
        assert np.max(np.abs(h[3:])) < 1e-12

    def test_recovers_forcing(self, standard_kernel):
        trace = run_linear(standard_kernel, 1.0, lambda p: p ** -0.75, 200)
        h = h_sequence(trace, standard_kernel)
        p = np.arange(3, 201, dtype=np.float64)
        np.testing.assert_allclose(h[3:], p ** -0.75, rtol=1e-10, atol=1e-14)


@pytest.mark.unit
class TestBoundHelpers:
    """Test ratio, plateau and horizon helpers"""

    def test_bound_ratio(self):
        r = bound_ratio([1.0, 0.0, 1.0, 2.0], [2.0, 0.0, 0.0, 1.0])
        assert r[0] == 0.5
        assert r[1] == 0.0
        assert r[2] == math.inf
        assert r[3] == 2.0

    def test_bound_ratio_slack(self):
        assert bound_ratio([1.0], [1.0], slack=0.5)[0] == 0.5

    def test_running_plateau(self):
        top, half, plateau = running_plateau(np.array([1.0, 2.0, 2.0, 2.05]), 0.05)
        assert top == 2.05 and half == 2.0
        assert plateau is True
        assert running_plateau(np.array([1.0, 1.0, 3.0, 9.0]), 0.05)[2] is False

    def test_running_plateau_empty_and_zero(self):
        assert running_plateau(np.array([]), 0.05) == (0.0, 0.0, True)
        assert running_plateau(np.zeros(10), 0.05)[2] is True

    def test_last_finite(self):
        values = np.array([np.nan, np.nan, 1.0, 2.0, np.nan, 3.0])
        assert last_finite(values) == 3
        assert last_finite(np.array([np.nan, np.nan, 1.0, 2.0])) == 3
        assert last_finite(np.array([np.nan, np.nan, np.nan])) == 1


@pytest.mark.unit
class TestAnsatz:
    """Test the a-priori assumption constants"""

    def test_violations(self):
        bad = AnsatzConstants(A1=5.0, A2=1.0, A3=1.0, N0=3, epsilon=0.3)
        problems = bad.violations(sigma_G=-0.5)
        assert len(problems) == 2
        with pytest.raises(ConfigurationError):
            bad.validate(-0.5)

    def test_valid_constants(self):
        good = AnsatzConstants(A1=2.0, A2=1.0, A3=8.0, N0=3, epsilon=0.2)
        assert good.validate(-0.5) is good

    def test_fitted_constants_pass(self, standard_trace):
        constants = fit_ansatz_constants(standard_trace)
        assert constants.N0 >= max(3.0, constants.A1)
        assert constants.A3 >= 8.0
        result = ansatz_check(standard_trace, constants)
        assert result.name == "ansatz"
        assert result.passed
        assert result.measured_constant == pytest.approx(1.0)

    def test_tightened_constants_fail(self, standard_trace):
        fitted = fit_ansatz_constants(standard_trace)
        tight = AnsatzConstants(A1=fitted.A1, A2=fitted.A2, A3=fitted.A3 / 2, N0=fitted.N0)
        result = ansatz_check(standard_trace, tight)
        assert not result.passed
        assert result.details["items"]["xi_bounded_up_to_N0"] is False


@pytest.mark.unit
class TestNonlinearBound:
    """Test the nonlinear-term bound"""

    def test_constants_satisfy_condition(self, standard_trace):
        constants = fit_nonlinear_constants(standard_trace, 0.5, 500)
        assert constants.N0 >= constants.N0_minimum
        assert constants.C2 > 0

    def test_bound_holds_over_horizon(self, standard_f, standard_trace):
        p_max = min(2000, standard_trace.P)
        table = ProductTable.from_trace(standard_trace)
        constants = fit_nonlinear_constants(standard_trace, 0.5, p_max, table)
        f_tilde = symmetrize(standard_f)
        violations = []
        for p in range(2 * constants.N0, p_max + 1):
            bound = nonlinear_bound_check(standard_trace, f_tilde, constants, p, table)
            assert math.isfinite(bound.actual) and bound.bound > 0
            if not bound.holds:
                violations.append((p, bound.ratio))
        assert violations == []

    def test_horizon_hypothesis(self, standard_f, standard_trace):
        constants = fit_nonlinear_constants(standard_trace, 0.5, 500)
        with pytest.raises(HypothesisViolated):
            nonlinear_bound_check(standard_trace, symmetrize(standard_f), constants, 2 * constants.N0 - 1)


@pytest.mark.unit
class TestInductiveScheme:
    """Test the base case, xi-hat and the inductive step"""

    def test_base_case(self, standard_f, standard_trace):
        constants = AnsatzConstants(A1=1.0, A2=1.0, A3=1.0, N0=3, epsilon=0.2)
        result = base_case_verifier(standard_trace, kernel_G(symmetrize(standard_f)), constants)
        assert result.sigma_G == pytest.approx(-0.5)
        assert 0 < result.C4 < math.inf
        assert 3 <= result.p0 <= 500
        assert result.epsilon_admissible
        assert result.passed
        assert result.to_check().name == "base_case"

    def test_hat_xi(self, short_trace):
        assert hat_xi_value(0.0, 10) == 0.0
        p = 20
        expected = -p * p * ((1.0 + short_trace.xi[p] / p ** 3) ** -p - 1.0)
        assert hat_xi(short_trace, p) == pytest.approx(expected, rel=1e-9)
        with pytest.raises(ConfigurationError):
            hat_xi(short_trace, 1)

    def test_hat_xi_bound_holds(self, standard_trace):
        result = hat_xi_bound_check(standard_trace)
        assert result.passed
        assert result.details["checked"] > 0

    def test_inductive_step_reports_constant(self, standard_f, standard_trace):
        G = kernel_G(symmetrize(standard_f))
        result = inductive_step_check(standard_trace, G, 0.2)
        assert result.name == "inductive_step"
        assert math.isfinite(result.measured_constant)
        assert result.worst_p >= 10


@pytest.mark.unit
class TestQuadratureBound:
    """Test the first-moment quadrature bound"""

    @pytest.mark.parametrize("p", [4, 5, 10, 57, 200, 1000])
    def test_bound_holds(self, standard_f, p):
        assert e3_bound_check(symmetrize(standard_f), p).holds

    def test_small_p_rejected(self, standard_f):
        with pytest.raises(ConfigurationError):
            e3_bound_check(symmetrize(standard_f), 3)


@pytest.mark.unit
class TestFitting:
    """Test the decay fits"""

    def test_power_law(self):
        p = np.arange(1001, dtype=np.float64)
        seq = np.full(1001, np.nan)
        seq[2:] = 3.0 * p[2:] ** -1.5
        fit = fit_decay(seq, (10, 1000))
        assert fit.exponent == pytest.approx(-1.5, abs=1e-9)
        assert fit.amplitude == pytest.approx(3.0, rel=1e-9)
        assert not fit.oscillatory

    def test_oscillatory_power_law(self):
        omega = math.sqrt(15.0) / 2.0
        p = np.arange(5001, dtype=np.float64)
        seq = np.full(5001, np.nan)
        seq[2:] = p[2:] ** -1.5 * np.cos(omega * np.log(p[2:]) + 0.3)
        fit = fit_decay(seq, (10, 5000), oscillatory=True)
        assert fit.oscillatory
        assert fit.exponent == pytest.approx(-1.5, abs=1e-4)
        assert fit.log_period == pytest.approx(2.0 * math.pi / omega, rel=1e-3)
        assert fit.residual < 1e-6
        assert fit.to_report().fit_range == (10, 5000)

    def test_crossing_period(self):
        t = np.linspace(0.0, 20.0, 4001)
        assert crossing_period(t, np.sin(2.0 * t)) == pytest.approx(math.pi, rel=1e-6)
        assert math.isnan(crossing_period(t, np.exp(-t)))

    @pytest.mark.slow
    def test_fluctuations_oscillate_at_root_frequency(self, long_trace):
        expected_period = 4.0 * math.pi / math.sqrt(15.0)
        xi = long_trace.xi[:4097]
        fit = fit_decay(xi, (256, 4096), oscillatory=True)
        assert fit.exponent == pytest.approx(-0.5, abs=0.1)
        assert fit.log_period == pytest.approx(expected_period, abs=0.15)
        assert fit.crossing_period == pytest.approx(expected_period, abs=0.15)
        envelope_fit = fit_envelope(xi, (256, 4096))
        assert envelope_fit.exponent == pytest.approx(-0.5, abs=0.1)

    def test_envelope_of_decreasing_sequence(self):
        p = np.arange(1, 2001, dtype=np.float64)
        seq = np.concatenate([[np.nan], 1.0 / p])
        fit = fit_envelope(seq, (10, 2000))
        assert fit.exponent == pytest.approx(-1.0, abs=1e-9)

    def test_zero_sequence(self):
        with pytest.raises(InsufficientData):
            fit_decay(np.zeros(100), (10, 99))
        with pytest.raises(InsufficientData):
            fit_decay(np.zeros(100), (10, 99), oscillatory=True)

    def test_range_outside_sequence(self):
        with pytest.raises(ConfigurationError):
            fit_decay(np.ones(100), (10, 100))
        with pytest.raises(ConfigurationError):
            fit_decay(np.ones(100), (50, 20))


@pytest.mark.unit
class TestVerifySettings:
    """Test suite settings validation"""

    def test_defaults(self):
        settings = VerifySettings()
        assert tuple(settings.checks) == tuple(CHECK_NAMES)
        assert settings.threshold("epsilon") == DEFAULT_THRESHOLDS["epsilon"]

    def test_override_threshold(self):
        assert VerifySettings(thresholds={"epsilon": 0.1}).threshold("epsilon") == 0.1

    def test_unknown_check(self):
        with pytest.raises(ConfigurationError):
            VerifySettings(checks=["identity_residual", "no_such_check"])

    def test_unknown_threshold(self):
        with pytest.raises(ConfigurationError):
            VerifySettings(thresholds={"tolerance": 1.0})

    def test_workers(self):
        with pytest.raises(ConfigurationError):
            VerifySettings(workers=0)


@pytest.mark.integration
class TestVerificationSuite:
    """Test the verification suite end to end"""

    CHECKS = ["identity_residual", "ansatz", "hat_xi_bound", "e3_bound"]

    def test_selected_checks_pass(self, standard_f, standard_trace):
        settings = VerifySettings(checks=self.CHECKS, identity_p_max=200, lemma_p_max=300)
        report = run_verification_suite(standard_trace, standard_f, settings)
        assert list(report.checks) == ["identity_residual", "ansatz", "hat_xi_bound", "e3_bound"]
        assert report.all_passed, report.failed
        assert report.P == standard_trace.P
        assert report.f_coeffs == [4.0, -10.0, 6.0]

    def test_checks_in_canonical_order(self, standard_trace):
        settings = VerifySettings(checks=["e3_bound", "identity_residual"], identity_p_max=50,
                                  lemma_p_max=50)
        report = run_verification_suite(standard_trace, settings=settings)
        assert list(report.checks) == ["identity_residual", "e3_bound"]

    def test_threaded_matches_serial(self, standard_f, standard_trace):
        serial = run_verification_suite(
            standard_trace, standard_f,
            VerifySettings(checks=self.CHECKS, identity_p_max=100, lemma_p_max=100))
        threaded = run_verification_suite(
            standard_trace, standard_f,
            VerifySettings(checks=self.CHECKS, identity_p_max=100, lemma_p_max=100, workers=4))
        assert threaded.model_dump() == serial.model_dump()

    def test_decay_fit_skipped_on_short_horizon(self, standard_f, short_trace):
        report = run_verification_suite(short_trace, standard_f, VerifySettings(checks=["decay_fit"]))
        check = report.checks["decay_fit"]
        assert check.passed
        assert "skipped" in check.details

    def test_insufficient_horizon_is_reported(self, standard_f):
        trace = run_recurrence(standard_f, EngineConfig(P=8))
        report = run_verification_suite(trace, standard_f, VerifySettings(checks=["main_lemma_envelope"]))
        check = report.checks["main_lemma_envelope"]
        assert not check.passed
        assert check.details["error"]["error_type"] == "InsufficientHorizon"
        assert not report.all_passed
        assert report.failed == ["main_lemma_envelope"]

    def test_report_serializes_pass_alias(self, standard_f, short_trace):
        report = run_verification_suite(short_trace, standard_f, VerifySettings(checks=["e3_bound"]))
        dumped = report.model_dump(by_alias=True)
        assert "pass" in dumped["checks"]["e3_bound"]

    @pytest.mark.slow
    def test_decay_fit_on_long_trace(self, standard_f, long_trace):
        settings = VerifySettings(checks=["decay_fit"], fit_range=(256, 8192))
        report = run_verification_suite(long_trace, standard_f, settings)
        check = report.checks["decay_fit"]
        assert check.passed, check.details
        assert check.measured_constant == pytest.approx(-1.5, abs=0.1)
