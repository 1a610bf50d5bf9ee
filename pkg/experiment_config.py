"""
Experiment Configuration

Typed experiment configs (one JSON file per experiment), validated with
pydantic before anything is computed, plus the optional worker cap read from
the environment.
"""

import json
import logging
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator, model_validator

from grid_core import DEFAULT_TOL, EMPIRICAL_TOL
from hausdorff_operator import ExponentSet
from weights import Direction

logger = logging.getLogger(__name__)

WORKERS_ENV = "HAUSDORFF_MAX_WORKERS"


def worker_count() -> int:
    """Thread-pool size for test-family evaluation; 1 unless the environment says otherwise."""
    load_dotenv()
    raw = os.getenv(WORKERS_ENV, "1")
    try:
        count = int(raw)
    except ValueError:
        logger.warning("%s=%r is not an integer; using 1 worker", WORKERS_ENV, raw)
        return 1
    return max(count, 1)


# ============================================================================
# ENUMS
# ============================================================================

class ExperimentName(str, Enum):
    """Experiments the CLI can dispatch to"""
    APPLY = "apply"
    NORMS = "norms"
    CONSTANTS = "constants"
    VERIFY_INCREASING = "verify-thm-increasing"
    VERIFY_DECREASING = "verify-thm-decreasing"
    HARDY_INEQ = "hardy-ineq"
    YOUNG = "young"
    COMMUTE = "commute"
    HYPOTHESES = "hypotheses"
    DECAY = "decay"
    SCALING = "scaling"
    DILATION = "dilation"
    AP = "ap"
    POWER_BOUND = "power-bound"
    WEAK_HARDY = "weak-hardy"


EXPERIMENT_DESCRIPTIONS: Dict[ExperimentName, str] = {
    ExperimentName.APPLY: "evaluate h_{Phi,beta} f on a log grid and on explicit points",
    ExperimentName.NORMS: "weighted strong and weak L^p norms of a test family",
    ExperimentName.CONSTANTS: "the constants A, B and K_{Phi,s,q,gamma}",
    ExperimentName.VERIFY_INCREASING: "two-sided operator-norm estimate for increasing weights",
    ExperimentName.VERIFY_DECREASING: "two-sided operator-norm estimate for decreasing weights",
    ExperimentName.HARDY_INEQ: "two-weight Hardy inequalities, inner and outer",
    ExperimentName.YOUNG: "Young inequality on the multiplicative group, seeded pairs",
    ExperimentName.COMMUTE: "Hilbert transform commutes with the operator",
    ExperimentName.HYPOTHESES: "integrability hypotheses on Phi^ and its radial profile",
    ExperimentName.DECAY: "Fourier-side decay of the operator kernel",
    ExperimentName.SCALING: "necessity of the exponent relation by dilation",
    ExperimentName.DILATION: "dilation invariance of the weighted Hardy quasi-norm",
    ExperimentName.AP: "A_p and A_1 characteristics of a weight",
    ExperimentName.POWER_BOUND: "power-weighted bound 2^{1/q'} K_{Phi,s,q,gamma}",
    ExperimentName.WEAK_HARDY: "weak Hardy quasi-norm and the Hilbert-Hardy equivalence band",
}


class FamilyKind(str, Enum):
    """Test-function families"""
    EXTREMAL = "extremal"
    GAUSSIAN = "gaussian"
    ODD_GAUSSIAN = "odd_gaussian"
    INDICATOR = "indicator"
    ZERO = "zero"


# ============================================================================
# NESTED SPECS
# ============================================================================

class KernelSpec(BaseModel):
    """Kernel description, e.g. {"kind": "fractional_hardy", "beta": 0.5}"""
    kind: str = Field(..., description="fractional_hardy, adjoint_hardy, fractional_hlp, cesaro_gamma, gaussian_hat, zero or sampled")
    beta: Optional[float] = Field(default=None, description="Order for the fractional kernels")
    g: Optional[float] = Field(default=None, description="Exponent of the Cesaro kernel")
    sigma: Optional[float] = Field(default=None, gt=0, description="Gaussian width parameter")
    path: Optional[str] = Field(default=None, description="CSV profile for sampled kernels")

    @field_validator("path")
    @classmethod
    def _path_exists(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and not Path(value).exists():
            raise ValueError(f"kernel profile not found: {value}")
        return value

    def as_dict(self) -> Dict[str, Any]:
        return self.model_dump(exclude_none=True)


class WeightSpec(BaseModel):
    """Weight description, e.g. {"kind": "power", "a": 1.0}"""
    kind: str = Field(..., description="power, constant, zero or even_monotone")
    a: Optional[float] = Field(default=None, description="Exponent of a power weight")
    c: Optional[float] = Field(default=None, gt=0, description="Value of a constant weight")
    path: Optional[str] = Field(default=None, description="CSV profile for monotone weights")
    direction: Optional[Direction] = Field(default=None, description="Monotonicity of a CSV profile")

    @field_validator("path")
    @classmethod
    def _path_exists(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and not Path(value).exists():
            raise ValueError(f"weight profile not found: {value}")
        return value

    @model_validator(mode="after")
    def _check_kind(self) -> "WeightSpec":
        if self.kind == "power" and self.a is None:
            raise ValueError("power weight needs 'a'")
        if self.kind == "even_monotone" and (self.path is None or self.direction is None):
            raise ValueError("even_monotone weight needs 'path' and 'direction'")
        return self

    def as_dict(self) -> Dict[str, Any]:
        return self.model_dump(exclude_none=True, mode="json")


class ExponentSpec(BaseModel):
    p: float = Field(..., gt=0)
    q: float = Field(..., gt=0)
    beta: float = Field(default=0.0, ge=0, lt=1)
    alpha: float = Field(default=0.0, gt=-1)
    gamma: float = Field(default=0.0, gt=-1)

    def to_exponent_set(self) -> ExponentSet:
        return ExponentSet(self.p, self.q, self.beta, self.alpha, self.gamma)


class GridSpec(BaseModel):
    """Log grid for sampled functions and uniform grid for FFT work"""
    r_min: float = Field(default=1e-4, gt=0)
    r_max: float = Field(default=1e4, gt=0)
    n_per_side: int = Field(default=257, ge=2)
    half_width: float = Field(default=64.0, gt=0)
    n_uniform: int = Field(default=2 ** 14, ge=8)

    @model_validator(mode="after")
    def _check_range(self) -> "GridSpec":
        if not self.r_min < self.r_max:
            raise ValueError("r_min must be below r_max")
        if self.n_uniform & (self.n_uniform - 1):
            raise ValueError("n_uniform must be a power of two")
        return self


class FamilySpec(BaseModel):
    """Test family; extremal families add near-extremal members for each epsilon"""
    kind: FamilyKind = Field(default=FamilyKind.EXTREMAL)
    a_grid: Optional[List[float]] = Field(default=None, description="Truncation points for extremal members")
    epsilons: List[float] = Field(default_factory=lambda: [0.1, 0.03, 0.01])
    widths: List[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0], description="Gaussian widths")
    count: int = Field(default=8, ge=1, description="Number of seeded random pairs")


class ToleranceSpec(BaseModel):
    quadrature: float = Field(default=DEFAULT_TOL, gt=0)
    empirical: float = Field(default=EMPIRICAL_TOL, gt=0)
    verdict: float = Field(default=1e-3, gt=0)


# ============================================================================
# EXPERIMENT CONFIG
# ============================================================================

class ExperimentConfig(BaseModel):
    """One experiment, fully described; identical configs give identical outputs"""
    experiment: ExperimentName
    kernel: Optional[KernelSpec] = None
    u: Optional[WeightSpec] = Field(default=None, description="Target-side weight")
    v: Optional[WeightSpec] = Field(default=None, description="Source-side weight")
    exponents: Optional[ExponentSpec] = None
    grid: GridSpec = Field(default_factory=GridSpec)
    family: FamilySpec = Field(default_factory=FamilySpec)
    tolerances: ToleranceSpec = Field(default_factory=ToleranceSpec)
    seed: int = Field(default=0, ge=0)
    output_dir: str = Field(default="results")

    # Experiment-specific settings
    direction: Optional[str] = Field(default=None, description="inner/outer for hardy-ineq")
    points: List[float] = Field(default_factory=list, description="Evaluation points for apply")
    p_values: List[float] = Field(default_factory=list, description="Exponents for ap, hypotheses and hardy norms")
    a_values: List[float] = Field(default_factory=list, description="Power-weight exponents for Hardy-space experiments")
    betas: List[float] = Field(default_factory=list, description="Operator orders for commute")
    m: int = Field(default=0, ge=0, description="Smoothness order for hypotheses and decay")
    p0: Optional[float] = Field(default=None, gt=0)
    scales: List[float] = Field(default_factory=list, description="Dilation factors for scaling and dilation")
    bounds: Optional[Dict[str, Any]] = Field(default=None, description="C1, C2, region for the sandwich checks")

    @model_validator(mode="after")
    def _check_requirements(self) -> "ExperimentConfig":
        needs_kernel = {
            ExperimentName.APPLY, ExperimentName.CONSTANTS, ExperimentName.VERIFY_INCREASING,
            ExperimentName.VERIFY_DECREASING, ExperimentName.COMMUTE, ExperimentName.HYPOTHESES,
            ExperimentName.DECAY, ExperimentName.SCALING, ExperimentName.POWER_BOUND,
        }
        needs_exponents = {
            ExperimentName.NORMS, ExperimentName.CONSTANTS, ExperimentName.VERIFY_INCREASING,
            ExperimentName.VERIFY_DECREASING, ExperimentName.HARDY_INEQ,
            ExperimentName.SCALING, ExperimentName.POWER_BOUND,
        }
        needs_weights = {
            ExperimentName.CONSTANTS, ExperimentName.VERIFY_INCREASING,
            ExperimentName.VERIFY_DECREASING, ExperimentName.HARDY_INEQ,
        }
        if self.experiment in needs_kernel and self.kernel is None:
            raise ValueError(f"experiment '{self.experiment.value}' needs a kernel")
        if self.experiment in needs_exponents and self.exponents is None:
            raise ValueError(f"experiment '{self.experiment.value}' needs exponents")
        if self.experiment in needs_weights and (self.u is None or self.v is None):
            raise ValueError(f"experiment '{self.experiment.value}' needs weights u and v")
        if self.experiment in {ExperimentName.VERIFY_INCREASING, ExperimentName.VERIFY_DECREASING} and not self.bounds:
            raise ValueError(f"experiment '{self.experiment.value}' needs kernel bounds C1, C2")
        if self.experiment == ExperimentName.AP and self.v is None:
            raise ValueError("ap needs the weight under test as 'v'")
        if self.experiment == ExperimentName.HARDY_INEQ and self.direction not in ("inner", "outer"):
            raise ValueError("hardy-ineq needs direction 'inner' or 'outer'")
        if self.exponents is not None:
            # Raises DomainError (a ValueError) for inconsistent exponents.
            self.exponents.to_exponent_set()
        return self


def _resolve_paths(raw: Dict[str, Any], base_dir: Path) -> Dict[str, Any]:
    for key in ("kernel", "u", "v"):
        spec = raw.get(key)
        if isinstance(spec, dict) and spec.get("path"):
            path = Path(spec["path"])
            if not path.is_absolute():
                spec["path"] = str(base_dir / path)
    return raw


def load_config(path: Union[str, Path], seed: Optional[int] = None, output_dir: Optional[str] = None) -> ExperimentConfig:
    """
    Read and validate an experiment config.

    Relative CSV paths are resolved against the config file's directory.

    Raises:
        pydantic.ValidationError: a field is missing or invalid
    """
    path = Path(path)
    with open(path, "r") as f:
        raw = json.load(f)
    raw = _resolve_paths(raw, path.parent)
    if seed is not None:
        raw["seed"] = seed
    if output_dir is not None:
        raw["output_dir"] = output_dir
    return ExperimentConfig.model_validate(raw)
