"""Pytest fixtures and configuration"""
import pytest

from src.kernel.monomial import MonomialKernel
from src.kernel.polynomial import RealPolynomial
from src.linear.system import run_linear
from src.recurrence.asymptotics import estimate_x_star
from src.recurrence.engine import EngineConfig, run_recurrence
from src.schemas import RunConfig

STANDARD_F = "4,-10,6"
STANDARD_KERNEL = "0:-4,1:6"


@pytest.fixture(scope='session')
def standard_f():
    """f(gamma) = 4 - 10 gamma + 6 gamma^2"""
    return RealPolynomial.parse(STANDARD_F)


@pytest.fixture(scope='session')
def standard_kernel():
    """G(gamma) = 6 gamma - 4 as a monomial kernel"""
    return MonomialKernel.parse(STANDARD_KERNEL)


@pytest.fixture(scope='session')
def standard_trace(standard_f):
    """Double-double trace to P = 2048 with x* and delta filled"""
    trace = run_recurrence(standard_f, EngineConfig(P=2048))
    return estimate_x_star(trace).trace


@pytest.fixture(scope='session')
def short_trace(standard_f):
    """Double-double trace to P = 64, no x* estimate"""
    return run_recurrence(standard_f, EngineConfig(P=64))


@pytest.fixture(scope='session')
def long_trace(standard_f):
    """Double-double trace to P = 8192 (slow tests only)"""
    trace = run_recurrence(standard_f, EngineConfig(P=8192))
    return estimate_x_star(trace).trace


@pytest.fixture(scope='session')
def homogeneous_linear(standard_kernel):
    """Linear system with xi_2 = 1 and no forcing, P = 2000"""
    return run_linear(standard_kernel, 1.0, None, 2000)


@pytest.fixture
def run_config(tmp_path):
    """Small RunConfig writing into a temporary directory"""
    return RunConfig(f_coeffs=[4.0, -10.0, 6.0], P=256, output_dir=str(tmp_path / "out"), threads=1)
