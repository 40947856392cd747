"""Pydantic schemas for reports, run configuration and errors"""
from datetime import datetime
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.config import config

CHECK_NAMES = (
    "identity_residual",
    "r1_increment",
    "main_lemma_envelope",
    "nonlinear_bound",
    "ansatz",
    "base_case",
    "h_order_gap",
    "hat_xi_bound",
    "inductive_step",
    "e3_bound",
    "decay_fit",
    "appendix",
)

Precision = Literal["double", "double-double"]


# RUN CONFIGURATION
class RunConfig(BaseModel):
    """Everything a command needs; loaded from --config JSON and overridden by flags."""

    model_config = ConfigDict(extra="forbid")

    f_coeffs: List[float] = Field(default_factory=lambda: [4.0, -10.0, 6.0], min_length=1)
    P: int = Field(default=2048, ge=2)
    precision: Precision = "double-double"
    seed: int = 0
    output_dir: str = Field(default_factory=lambda: config.output_dir)
    checks: List[str] = Field(default_factory=lambda: list(CHECK_NAMES))
    fit_range: Optional[Tuple[int, int]] = None
    thresholds: Dict[str, float] = Field(default_factory=dict)
    threads: int = Field(default_factory=lambda: config.engine.threads, ge=1)
    kernel: Optional[str] = None
    xi2: float = 1.0
    forcing_exponent: Optional[float] = None
    forcing_amplitude: float = 1.0
    q0: List[int] = Field(default_factory=lambda: [2, 10, 100])

    @field_validator("f_coeffs", mode="before")
    @classmethod
    def parse_coefficients(cls, v):
        if isinstance(v, str):
            return [float(x) for x in v.split(",") if x.strip()]
        return v

    @field_validator("checks", mode="before")
    @classmethod
    def parse_checks(cls, v):
        if isinstance(v, str):
            v = [x.strip() for x in v.split(",") if x.strip()]
        unknown = [name for name in v if name not in CHECK_NAMES]
        if unknown:
            raise ValueError(f"Unknown check names {unknown}; known: {', '.join(CHECK_NAMES)}")
        return v

    @field_validator("q0")
    @classmethod
    def check_q0(cls, v):
        if not v or any(q < 2 for q in v):
            raise ValueError("q0 values must be integers >= 2")
        return v

    @model_validator(mode="after")
    def check_fit_range(self):
        if self.fit_range is not None:
            lo, hi = self.fit_range
            if not 2 <= lo < hi <= self.P:
                raise ValueError(f"fit_range {self.fit_range} must satisfy 2 <= lo < hi <= P = {self.P}")
        return self

    def f_exact(self) -> List[Fraction]:
        """Coefficients as the decimal rationals the user typed (0.1 -> 1/10)."""
        return [Fraction(repr(c)) for c in self.f_coeffs]


# KERNEL REPORTS
class SpectrumReport(BaseModel):
    roots: List[Tuple[float, float]]
    sigma_G: float
    alpha_f: float
    distinct: bool
    in_strip: bool
    max_residual: float = 0.0

    @classmethod
    def from_spectrum(cls, spectrum) -> "SpectrumReport":
        return cls(**spectrum.to_dict())


class AssumptionItem(BaseModel):
    name: str
    passed: bool
    measured: Optional[float] = None
    expected: Optional[float] = None
    details: Dict[str, Any] = Field(default_factory=dict)


class AssumptionReport(BaseModel):
    f_coeffs: List[float]
    f_tilde_coeffs: List[float]
    G_coeffs: List[float]
    items: List[AssumptionItem]
    all_passed: bool
    integral_G: float
    integral_G_closed_form: float
    integral_G_is_minus_one: bool
    integral_G_consistent: bool
    loss_of_control: float
    spectrum: Optional[SpectrumReport] = None

    def item(self, name: str) -> AssumptionItem:
        return next(i for i in self.items if i.name == name)


# FIT / SIMULATION
class FitReport(BaseModel):
    exponent: float
    amplitude: float
    log_period: Optional[float] = None
    crossing_period: Optional[float] = None
    residual: float
    fit_range: Tuple[int, int]
    n_points: int
    oscillatory: bool


class SimulationSummary(BaseModel):
    f_coeffs: List[float]
    P: int
    precision: Precision
    x_star: Optional[float] = None
    err_bound: Optional[float] = None
    alpha_f: Optional[float] = None
    fitted_exponent: Optional[float] = None
    sup_Cp: Optional[float] = None
    fit: Optional[FitReport] = None
    scale_log2: int = 0


# LINEAR SYSTEM
class LinearReport(BaseModel):
    kernel: str
    xi2: float
    P: int
    forcing: Optional[str] = None
    sigma_G: Optional[float] = None
    sup_scaled: float
    sup_scaled_half: float
    plateau_detected: bool
    moment_residual: float
    moment_sup_norm: float
    matrix_path_mismatch: Optional[float] = None
    fit: Optional[FitReport] = None
    passed: bool


class ScanEntry(BaseModel):
    q0: int
    sup_norm: float
    profile: List[Tuple[int, float]]
    plateau_detected: bool


class ScanReport(BaseModel):
    kernel: str
    shift: Tuple[float, float]
    P: int
    entries: List[ScanEntry]
    sup_norm: float
    plateau_detected: bool


class EigenReport(BaseModel):
    matrix: List[List[Tuple[float, float]]]
    eigenvalues: List[Tuple[float, float]]
    kernel_roots: List[Tuple[float, float]]
    mismatch: float
    numpy_mismatch: float
    passed: bool


class SimilarityReport(BaseModel):
    constant: float
    worst_p: int
    cond_S: float


class StabilityReport(BaseModel):
    scan: ScanReport
    eigen: EigenReport
    similarity: Optional[SimilarityReport] = None
    passed: bool


# VERIFICATION
class CheckResult(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    name: str
    passed: bool = Field(alias="pass")
    measured_constant: Optional[float] = None
    threshold: Optional[float] = None
    worst_p: Optional[int] = None
    details: Dict[str, Any] = Field(default_factory=dict)


class VerificationReport(BaseModel):
    f_coeffs: List[float]
    P: int
    checks: Dict[str, CheckResult]
    all_passed: bool

    @property
    def failed(self) -> List[str]:
        return [name for name, check in self.checks.items() if not check.passed]


# ERRORS
class ErrorReport(BaseModel):
    error: str
    error_type: str
    exit_code: int
    timestamp: datetime = Field(default_factory=datetime.utcnow)
    details: Optional[Dict[str, Any]] = None


REPORT_MODELS = {
    "run_config": RunConfig,
    "spectrum": SpectrumReport,
    "assumption": AssumptionReport,
    "simulation_summary": SimulationSummary,
    "fit": FitReport,
    "linear": LinearReport,
    "scan": ScanReport,
    "stability": StabilityReport,
    "check_result": CheckResult,
    "verification": VerificationReport,
    "error": ErrorReport,
}
