"""
Kernel Family

The functions Phi that define a fractional Hausdorff operator: the closed-form
members (fractional Hardy, its adjoint, their sum, the Cesaro kernels, a
Gaussian given through its Fourier transform) and kernels sampled from data.

Every kernel is evaluated through ``Kernel.values`` on numpy arrays; the
module-level ``evaluate`` is the checked scalar entry point.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
from scipy.special import eval_hermite

from grid_core import (
    EMPIRICAL_TOL,
    ConvergenceError,
    DomainError,
    GridFunction,
    Interval,
    LogGrid,
    integrate_with_error,
    make_log_grid,
    read_profile_csv,
)
from reports import VerificationReport

logger = logging.getLogger(__name__)


# ============================================================================
# KERNEL VARIANTS
# ============================================================================

class Kernel:
    """Base class for kernels. Subclasses implement ``values``."""

    name = "kernel"
    even = True
    # Phi in L^1(R); Fourier-side operations require it.
    integrable = True

    def values(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, t) -> np.ndarray:
        return self.values(np.asarray(t, dtype=float))

    def breakpoints(self) -> List[float]:
        """Positive points where Phi jumps or is singular."""
        return []

    def support_radius(self) -> float:
        """R with Phi = 0 for |t| > R (inf when unbounded)."""
        return math.inf

    def describe(self) -> Dict[str, Any]:
        return {"kernel": self.name}

    def __add__(self, other: "Kernel") -> "Kernel":
        return SumKernel(self, other)


class FractionalHardy(Kernel):
    """Phi(t) = |t|^(beta-1) for |t| > 1."""

    name = "fractional_hardy"
    integrable = False

    def __init__(self, beta: float = 0.0):
        if not 0 <= beta < 1:
            raise DomainError(f"beta must lie in [0, 1), got {beta}")
        self.beta = float(beta)

    def values(self, t):
        r = np.abs(t)
        with np.errstate(divide="ignore"):
            return np.where(r > 1, np.power(np.where(r > 1, r, 1.0), self.beta - 1), 0.0)

    def breakpoints(self):
        return [1.0]

    def describe(self):
        return {"kernel": self.name, "beta": self.beta}


class AdjointHardy(Kernel):
    """Phi(t) = 1 for 0 < |t| <= 1."""

    name = "adjoint_hardy"

    def values(self, t):
        r = np.abs(t)
        return np.where((r > 0) & (r <= 1), 1.0, 0.0)

    def breakpoints(self):
        return [1.0]

    def support_radius(self):
        return 1.0


class SumKernel(Kernel):
    """Pointwise sum of two kernels."""

    name = "sum"

    def __init__(self, first: Kernel, second: Kernel):
        self.parts = (first, second)
        self.even = first.even and second.even
        self.integrable = first.integrable and second.integrable

    def values(self, t):
        return self.parts[0].values(t) + self.parts[1].values(t)

    def breakpoints(self):
        return sorted(set(self.parts[0].breakpoints()) | set(self.parts[1].breakpoints()))

    def support_radius(self):
        return max(p.support_radius() for p in self.parts)

    def describe(self):
        return {"kernel": self.name, "parts": [p.describe() for p in self.parts]}


class FractionalHLP(SumKernel):
    """Fractional Hardy kernel plus its adjoint."""

    name = "fractional_hlp"

    def __init__(self, beta: float = 0.0):
        super().__init__(FractionalHardy(beta), AdjointHardy())
        self.beta = float(beta)

    def describe(self):
        return {"kernel": self.name, "beta": self.beta}


class CesaroGamma(Kernel):
    """Phi(t) = g (1 - t)^(g-1) for 0 < t < 1; not even."""

    name = "cesaro_gamma"
    even = False

    def __init__(self, g: float):
        if g <= 0:
            raise DomainError(f"Cesaro exponent must be positive, got {g}")
        self.g = float(g)

    def values(self, t):
        inside = (t > 0) & (t < 1)
        base = np.where(inside, 1.0 - t, 1.0)
        return np.where(inside, self.g * np.power(base, self.g - 1), 0.0)

    def breakpoints(self):
        return [1.0]

    def support_radius(self):
        return 1.0

    def describe(self):
        return {"kernel": self.name, "g": self.g}


class GaussianHat(Kernel):
    """
    Phi is the inverse Fourier transform of exp(-sigma xi^2):
    Phi(t) = sqrt(pi/sigma) exp(-pi^2 t^2 / sigma).
    """

    name = "gaussian_hat"

    def __init__(self, sigma: float = math.pi):
        if sigma <= 0:
            raise DomainError(f"sigma must be positive, got {sigma}")
        self.sigma = float(sigma)

    def values(self, t):
        return math.sqrt(math.pi / self.sigma) * np.exp(-(math.pi ** 2) * np.square(t) / self.sigma)

    def hat(self, xi) -> np.ndarray:
        return np.exp(-self.sigma * np.square(xi))

    def hat_derivative(self, xi, order: int) -> np.ndarray:
        """d^n/dxi^n exp(-sigma xi^2) = (-sqrt(sigma))^n H_n(sqrt(sigma) xi) exp(-sigma xi^2)."""
        root = math.sqrt(self.sigma)
        xi = np.asarray(xi, dtype=float)
        return (-root) ** order * eval_hermite(order, root * xi) * self.hat(xi)

    def describe(self):
        return {"kernel": self.name, "sigma": self.sigma}


class SampledKernel(Kernel):
    """Even extension of a nonnegative profile; zero off the profile's grid."""

    name = "sampled"

    def __init__(self, profile: GridFunction):
        positive = np.real(profile.positive_values)
        if np.any(positive < 0):
            raise DomainError("sampled kernel profile must be nonnegative")
        symmetric = np.concatenate([positive[::-1], positive])
        self.profile = GridFunction(profile.grid, symmetric)

    def values(self, t):
        return np.real(self.profile(np.abs(t)))

    def breakpoints(self):
        return [self.profile.grid.r_min, self.profile.grid.r_max]

    def support_radius(self):
        return self.profile.grid.r_max

    def describe(self):
        grid = self.profile.grid
        return {"kernel": self.name, "r_min": grid.r_min, "r_max": grid.r_max, "nodes": grid.n_per_side}


class ZeroKernel(Kernel):
    """Phi = 0."""

    name = "zero"

    def values(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def support_radius(self):
        return 0.0


# ============================================================================
# BOUNDS
# ============================================================================

class BoundRegion(str, Enum):
    OUTSIDE_UNIT = "outside_unit"
    INSIDE_UNIT = "inside_unit"


@dataclass(frozen=True)
class KernelBounds:
    """
    Two-sided kernel bounds.

    outside_unit: C1/|t|^(1-beta) <= Phi(t) <= C2/|t|^(1-beta) for |t| >= 1
    inside_unit: C1 <= Phi(t) <= C2 for |t| <= 1
    """
    C1: float
    C2: float
    region: BoundRegion = BoundRegion.OUTSIDE_UNIT

    def __post_init__(self):
        if self.C1 < 0 or self.C2 < 0 or self.C1 > self.C2:
            raise DomainError(f"kernel bounds need 0 <= C1 <= C2, got {self.C1}, {self.C2}")
        object.__setattr__(self, "region", BoundRegion(self.region))


# ============================================================================
# OPERATIONS
# ============================================================================

def kernel_support_breakpoints(k: Kernel) -> List[float]:
    """Sorted positive points where Phi jumps, is singular or leaves its support."""
    points = set(float(b) for b in k.breakpoints() if b > 0)
    radius = k.support_radius()
    if 0 < radius < math.inf:
        points.add(float(radius))
    return sorted(points)


def evaluate(k: Kernel, t: float) -> float:
    """Phi(t) for nonzero t."""
    if t == 0:
        raise DomainError("kernel evaluation at t = 0 is undefined")
    return float(k.values(np.asarray([t], dtype=float))[0])


def verify_bounds(
    k: Kernel,
    b: KernelBounds,
    probe: LogGrid,
    beta: Optional[float] = None,
    tol: float = 1e-12,
) -> VerificationReport:
    """
    Check the two-sided bound at every probe node strictly inside the
    declared region (the unit circle itself is a null set).

    Reports the tightest feasible (C1, C2) observed on the probe.
    """
    beta = getattr(k, "beta", 0.0) if beta is None else beta
    t = probe.nodes
    if b.region is BoundRegion.OUTSIDE_UNIT:
        t = t[np.abs(t) > 1]
        scaled = k.values(t) * np.power(np.abs(t), 1 - beta)
    else:
        t = t[np.abs(t) < 1]
        scaled = k.values(t)
    if t.size == 0:
        raise DomainError(f"no probe nodes in region {b.region.value}")

    observed_c1, observed_c2 = float(scaled.min()), float(scaled.max())
    report = VerificationReport("kernel_bounds", f"kernel bounds ({b.region.value})")
    report.quantities.update({"observed_C1": observed_c1, "observed_C2": observed_c2, "nodes": int(t.size)})
    report.add("lower_bound", b.C1, bound=observed_c1, tolerance=tol, region=b.region.value)
    report.add("upper_bound", observed_c2, bound=b.C2, tolerance=tol, region=b.region.value)
    return report


def fourier_of_kernel(k: Kernel, grid: LogGrid) -> GridFunction:
    """
    Fourier transform xi -> integral Phi(t) exp(-2 pi i t xi) dt at the grid nodes.

    Raises:
        DomainError: for kernels outside L^1; use spatial-side operations
    """
    if not k.integrable:
        raise DomainError(
            f"kernel '{k.name}' is not in L^1 (its tail integral diverges); "
            "use spatial-side operations only"
        )
    xi = grid.nodes
    if isinstance(k, GaussianHat):
        return GridFunction(grid, k.hat(xi).astype(complex))
    if isinstance(k, ZeroKernel):
        return GridFunction.zeros(grid, dtype=complex)
    if isinstance(k, AdjointHardy):
        return GridFunction(grid, (np.sin(2 * math.pi * xi) / (math.pi * xi)).astype(complex))
    if isinstance(k, SumKernel):
        parts = [fourier_of_kernel(p, grid).values for p in k.parts]
        return GridFunction(grid, parts[0] + parts[1])
    return GridFunction(grid, np.array([_fourier_quadrature(k, x) for x in xi]))


def _fourier_quadrature(k: Kernel, xi: float) -> complex:
    radius = k.support_radius()
    points = [-b for b in k.breakpoints()] + [0.0] + k.breakpoints()
    domain = Interval(-radius, radius) if math.isfinite(radius) else Interval(-math.inf, math.inf)

    def part(fn):
        try:
            return integrate_with_error(fn, domain, EMPIRICAL_TOL, points).value
        except ConvergenceError as exc:
            logger.warning("Fourier quadrature at xi=%g kept partial estimate (%s)", xi, exc)
            return exc.estimate

    real = part(lambda t: k.values(t) * np.cos(2 * math.pi * t * xi))
    imag = part(lambda t: -k.values(t) * np.sin(2 * math.pi * t * xi))
    return complex(real, imag)


def load_sampled_kernel(path: Union[str, Path]) -> SampledKernel:
    """
    Load a kernel profile from a two-column CSV (node, value).

    Nodes must be positive and strictly ascending; the profile is resampled
    onto a log grid with the same endpoints and node count, then evenly
    extended.
    """
    nodes, values = read_profile_csv(path)
    grid = make_log_grid(nodes[0], nodes[-1], len(nodes))
    resampled = np.interp(np.log(grid.positive_nodes), np.log(nodes), values)
    return SampledKernel(GridFunction(grid, np.concatenate([resampled[::-1], resampled])))


def kernel_from_spec(spec: Dict[str, Any], base_dir: Optional[Path] = None) -> Kernel:
    """Build a kernel from its config description."""
    kind = spec["kind"]
    if kind == "fractional_hardy":
        return FractionalHardy(spec.get("beta", 0.0))
    if kind == "adjoint_hardy":
        return AdjointHardy()
    if kind == "fractional_hlp":
        return FractionalHLP(spec.get("beta", 0.0))
    if kind == "cesaro_gamma":
        return CesaroGamma(spec["g"])
    if kind == "gaussian_hat":
        return GaussianHat(spec.get("sigma", math.pi))
    if kind == "zero":
        return ZeroKernel()
    if kind == "sampled":
        path = Path(spec["path"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return load_sampled_kernel(path)
    raise DomainError(f"unknown kernel kind '{kind}'")
