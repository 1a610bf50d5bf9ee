"""
Even Weights and Muckenhoupt Characteristics

Weights are even nonnegative functions on R given by power laws, constants,
or monotone profiles sampled on the positive half-line. This module measures
sets, probes the A_p and A_1 characteristics over families of balls and
reports the critical index of power weights.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from grid_core import (
    DEFAULT_TOL,
    DomainError,
    GridFunction,
    Interval,
    LadderResult,
    UnsupportedError,
    ladder_integral,
    log_space,
    read_profile_csv,
)

logger = logging.getLogger(__name__)


class Direction(str, Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


# ============================================================================
# WEIGHT VARIANTS
# ============================================================================

class Weight:
    """Base class for even weights. Subclasses implement ``profile`` on r > 0."""

    name = "weight"

    def profile(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def values(self, x) -> np.ndarray:
        r = np.abs(np.asarray(x, dtype=float))
        with np.errstate(divide="ignore"):
            return self.profile(r)

    def __call__(self, x) -> np.ndarray:
        return self.values(x)

    def singular_points(self) -> List[float]:
        """Points where the weight or one of its negative powers may blow up."""
        return []

    def is_monotone(self, direction: Direction) -> bool:
        return False

    def describe(self) -> Dict[str, Any]:
        return {"weight": self.name}


class PowerWeight(Weight):
    """w(x) = |x|^a with a > -1."""

    name = "power"

    def __init__(self, a: float):
        if a <= -1:
            raise DomainError(f"power weight needs a > -1 for local integrability, got {a}")
        self.a = float(a)

    def profile(self, r):
        if self.a == 0:
            return np.ones_like(r)
        return np.power(r, self.a)

    def singular_points(self):
        return [] if self.a == 0 else [0.0]

    def is_monotone(self, direction):
        if direction is Direction.INCREASING:
            return self.a >= 0
        return self.a <= 0

    def describe(self):
        return {"weight": self.name, "a": self.a}


class ConstantWeight(Weight):
    """w(x) = c with c > 0."""

    name = "constant"

    def __init__(self, c: float = 1.0):
        if c <= 0:
            raise DomainError(f"constant weight needs c > 0, got {c}")
        self.c = float(c)

    def profile(self, r):
        return np.full_like(r, self.c, dtype=float)

    def is_monotone(self, direction):
        return True

    def describe(self):
        return {"weight": self.name, "c": self.c}


class ZeroWeight(Weight):
    """w = 0; only meaningful as the target weight u of a two-weight inequality."""

    name = "zero"

    def profile(self, r):
        return np.zeros_like(r)

    def is_monotone(self, direction):
        return True


class EvenMonotoneWeight(Weight):
    """
    Even weight from a monotone profile on R+.

    Between nodes the profile is interpolated linearly in ln r; beyond the
    grid it is held at the end values, which keeps it monotone.
    """

    name = "even_monotone"

    def __init__(self, nodes: np.ndarray, values: np.ndarray, direction: Direction):
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        self.direction = Direction(direction)
        if nodes.shape != values.shape or nodes.size < 2:
            raise DomainError("monotone profile needs matching node and value arrays")
        if np.any(nodes <= 0) or np.any(np.diff(nodes) <= 0):
            raise DomainError("monotone profile nodes must be positive and ascending")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise DomainError("monotone profile values must be finite and nonnegative")
        steps = np.diff(values)
        if self.direction is Direction.INCREASING and np.any(steps < 0):
            raise DomainError("profile declared increasing but decreases on its grid")
        if self.direction is Direction.DECREASING and np.any(steps > 0):
            raise DomainError("profile declared decreasing but increases on its grid")
        self.nodes, self.profile_values = nodes, values
        self._log_nodes = np.log(nodes)

    @classmethod
    def from_grid_function(cls, profile: GridFunction, direction: Direction) -> "EvenMonotoneWeight":
        return cls(profile.grid.positive_nodes, np.real(profile.positive_values), direction)

    def profile(self, r):
        u = np.log(np.where(r > 0, r, self.nodes[0]))
        return np.interp(u, self._log_nodes, self.profile_values)

    def is_monotone(self, direction):
        return Direction(direction) is self.direction

    def describe(self):
        return {"weight": self.name, "direction": self.direction.value,
                "r_min": float(self.nodes[0]), "r_max": float(self.nodes[-1])}


# ============================================================================
# REPORT TYPES
# ============================================================================

@dataclass(frozen=True)
class MeasureValue:
    value: float
    divergent: bool = False


@dataclass
class ApReport:
    """Supremum of the A_p (or A_1, p = 1) product over the probed balls."""
    p: float
    characteristic: float
    balls_probed: int
    divergent: bool = False
    worst_ball: Optional[Interval] = None
    member: Optional[bool] = None
    per_ball: List[float] = field(default_factory=list, repr=False)


# ============================================================================
# OPERATIONS
# ============================================================================

def _power_of(w: Weight, exponent: float):
    def fn(x):
        with np.errstate(divide="ignore", over="ignore"):
            return np.power(w.values(x), exponent)
    return fn


def _measure(fn, w: Weight, interval: Interval, tol: float) -> LadderResult:
    return ladder_integral(fn, interval, w.singular_points(), tol)


def weight_measure(w: Weight, set: Interval, tol: float = DEFAULT_TOL) -> MeasureValue:
    """w(E) = integral of w over E, with a divergence flag."""
    if isinstance(w, ConstantWeight):
        return MeasureValue(w.c * set.length, not set.is_bounded)
    result = _measure(w.values, w, set, tol)
    return MeasureValue(float(result.value), result.divergent)


def _average(fn, w: Weight, ball: Interval, tol: float) -> LadderResult:
    result = _measure(fn, w, ball, tol)
    return LadderResult(result.value / ball.length, result.divergent, result.estimates)


def default_balls(
    centers: Sequence[float] = (0.0, 1.0, -1.0, 10.0, -10.0),
    r_min: float = 1e-3,
    r_max: float = 1e3,
    count: int = 13,
) -> List[Interval]:
    """Balls B(c, R) with R log-spaced over [r_min, r_max]."""
    return [Interval.ball(c, float(r)) for c in centers for r in log_space(r_min, r_max, count)]


def origin_balls(r_min: float = 1e-3, r_max: float = 1e3, count: int = 13) -> List[Interval]:
    return default_balls((0.0,), r_min, r_max, count)


def ap_characteristic(w: Weight, p: float, balls: Sequence[Interval], tol: float = 1e-10) -> ApReport:
    """
    sup over balls of (avg_B w)(avg_B w^(-1/(p-1)))^(p-1).

    A ball on which either average diverges makes the report divergent with
    an infinite characteristic.
    """
    if p <= 1:
        raise DomainError(f"A_p characteristic needs p > 1, got {p}")
    if not balls:
        raise DomainError("A_p characteristic needs at least one ball")
    if any(not b.is_bounded for b in balls):
        raise DomainError("A_p balls must be bounded")

    dual = _power_of(w, -1.0 / (p - 1))
    per_ball: List[float] = []
    worst, worst_ball = -math.inf, None
    for ball in balls:
        if isinstance(w, ConstantWeight):
            product = w.c * (w.c ** (-1.0 / (p - 1))) ** (p - 1)
        else:
            avg_w = _average(w.values, w, ball, tol)
            avg_dual = _average(dual, w, ball, tol)
            if avg_w.divergent or avg_dual.divergent:
                logger.info("A_%g factor diverges on ball [%g, %g]", p, ball.lo, ball.hi)
                return ApReport(p, math.inf, len(per_ball) + 1, True, ball, _membership(w, p), per_ball)
            product = avg_w.value * avg_dual.value ** (p - 1)
        if 1 - 1e-9 < product < 1:
            product = 1.0
        per_ball.append(float(product))
        if product > worst:
            worst, worst_ball = product, ball
    return ApReport(p, float(worst), len(balls), False, worst_ball, _membership(w, p), per_ball)


def a1_characteristic(w: Weight, balls: Sequence[Interval], tol: float = 1e-10) -> ApReport:
    """sup over balls of avg_B(w) / essinf_B(w); divergent when essinf vanishes."""
    if not balls:
        raise DomainError("A_1 characteristic needs at least one ball")
    per_ball: List[float] = []
    worst, worst_ball = -math.inf, None
    for ball in balls:
        floor = _essinf(w, ball)
        avg = _average(w.values, w, ball, tol)
        if avg.divergent or floor <= 0:
            return ApReport(1.0, math.inf, len(per_ball) + 1, True, ball, _membership(w, 1.0), per_ball)
        ratio = avg.value / floor
        if 1 - 1e-9 < ratio < 1:
            ratio = 1.0
        per_ball.append(float(ratio))
        if ratio > worst:
            worst, worst_ball = ratio, ball
    return ApReport(1.0, float(worst), len(balls), False, worst_ball, _membership(w, 1.0), per_ball)


def _essinf(w: Weight, ball: Interval) -> float:
    """Exact for even weights monotone in |x|: the minimum sits at an end or at 0."""
    candidates = [abs(ball.lo), abs(ball.hi)]
    if ball.lo < 0 < ball.hi:
        candidates.append(0.0)
    if isinstance(w, (PowerWeight, ConstantWeight, EvenMonotoneWeight, ZeroWeight)):
        if isinstance(w, PowerWeight) and 0.0 in candidates:
            if w.a > 0:
                return 0.0
            candidates.remove(0.0)
        return float(np.min(w.values(np.asarray(candidates))))
    grid = np.linspace(ball.lo, ball.hi, 4097)
    return float(np.min(w.values(grid[grid != 0])))


def is_ap_power(a: float, p: float) -> bool:
    """|x|^a in A_p iff -1 < a < p - 1 (p > 1); in A_1 iff -1 < a <= 0."""
    if p == 1:
        return -1 < a <= 0
    return -1 < a < p - 1


def _membership(w: Weight, p: float) -> Optional[bool]:
    if isinstance(w, PowerWeight):
        return is_ap_power(w.a, p)
    if isinstance(w, ConstantWeight):
        return True
    return None


def critical_index(w: Weight) -> float:
    """max(1, 1 + a) for |x|^a; 1 for constants."""
    if isinstance(w, ConstantWeight):
        return 1.0
    if isinstance(w, PowerWeight):
        return max(1.0, 1.0 + w.a)
    raise UnsupportedError(f"no closed-form critical index for '{w.name}' weights")


def load_weight_profile(path: Union[str, Path], direction: Direction) -> EvenMonotoneWeight:
    """Monotone weight profile from a two-column CSV (positive node, value)."""
    nodes, values = read_profile_csv(path)
    return EvenMonotoneWeight(nodes, values, direction)


def weight_from_spec(spec: Dict[str, Any], base_dir: Optional[Path] = None) -> Weight:
    """Build a weight from its config description."""
    kind = spec["kind"]
    if kind == "power":
        return PowerWeight(spec["a"])
    if kind == "constant":
        return ConstantWeight(spec.get("c", 1.0))
    if kind == "zero":
        return ZeroWeight()
    if kind == "even_monotone":
        path = Path(spec["path"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return load_weight_profile(path, Direction(spec["direction"]))
    raise DomainError(f"unknown weight kind '{kind}'")
