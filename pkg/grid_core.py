"""
Grid and Quadrature Core

Symmetric logarithmic grids over R\\{0}, functions sampled on them, and the
double-exponential quadrature every integral in the package goes through.

Quadrature rules:
1. Finite pieces use the tanh-sinh map, which clusters nodes at both ends so
   integrable power singularities converge at double-exponential rate
2. Half-infinite pieces use the exp-sinh map, which handles power-law tails
   and a singular left endpoint with the same rule
3. The whole line uses the sinh-sinh map
4. Pieces are split at declared breakpoints (kernel jumps) and bisected when
   level refinement alone does not converge
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from scipy.optimize import minimize_scalar
from scipy.special import expit

logger = logging.getLogger(__name__)

# Closed-form cross-checks and operator-norm empirics use two precision tiers.
DEFAULT_TOL = 1e-8
EMPIRICAL_TOL = 1e-4

# Truncation of the auxiliary variable t for each map.
_T_FINITE = 6.0
_T_TAIL = 6.7
_START_LEVEL = 3
_MAX_LEVEL = 8
_MAX_SUBDIVISIONS = 32


# ============================================================================
# ERRORS
# ============================================================================

class HausdorffError(Exception):
    """Base class for every error raised by the package."""


class DomainError(HausdorffError, ValueError):
    """An operation was called outside its domain."""


class PreconditionError(DomainError):
    """A theorem hypothesis required by a verification run does not hold."""

    def __init__(self, hypothesis: str, message: str = ""):
        self.hypothesis = hypothesis
        super().__init__(f"hypothesis '{hypothesis}' violated" + (f": {message}" if message else ""))


class UnsupportedError(DomainError):
    """The operation has no implementation for this variant."""


class DivergenceError(HausdorffError):
    """An integral diverges."""

    def __init__(self, message: str, estimate: float = math.inf):
        self.estimate = estimate
        super().__init__(message)


class ConvergenceError(HausdorffError):
    """Quadrature did not reach the requested tolerance."""

    def __init__(self, estimate: float, error_bound: float, message: str = ""):
        self.estimate = estimate
        self.error_bound = error_bound
        super().__init__(
            message or f"quadrature did not converge: estimate={estimate:.6g}, error bound={error_bound:.3g}"
        )


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True)
class Interval:
    """An interval of the extended real line; lo < hi."""
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or not self.lo < self.hi:
            raise DomainError(f"interval requires lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @classmethod
    def ball(cls, center: float, radius: float) -> "Interval":
        return cls(center - radius, center + radius)


@dataclass(frozen=True)
class LogGrid:
    """
    Symmetric logarithmic grid: nodes are +-exp(u_k) with u_k uniform on
    [ln r_min, ln r_max].

    Args:
        r_min: Innermost radius
        r_max: Outermost radius
        n_per_side: Number of nodes on each sign
    """
    r_min: float
    r_max: float
    n_per_side: int

    def __post_init__(self):
        if not (0 < self.r_min < self.r_max and math.isfinite(self.r_max)):
            raise DomainError(f"log grid requires 0 < r_min < r_max < inf, got {self.r_min}, {self.r_max}")
        if self.n_per_side < 2:
            raise DomainError(f"log grid requires n_per_side >= 2, got {self.n_per_side}")

    @property
    def log_nodes(self) -> np.ndarray:
        return np.linspace(math.log(self.r_min), math.log(self.r_max), self.n_per_side)

    @property
    def positive_nodes(self) -> np.ndarray:
        nodes = np.exp(self.log_nodes)
        nodes[0], nodes[-1] = self.r_min, self.r_max
        return nodes

    @property
    def nodes(self) -> np.ndarray:
        """All nodes, sorted ascending: negative side first."""
        positive = self.positive_nodes
        return np.concatenate([-positive[::-1], positive])

    @property
    def size(self) -> int:
        return 2 * self.n_per_side

    @property
    def log_step(self) -> float:
        return (math.log(self.r_max) - math.log(self.r_min)) / (self.n_per_side - 1)

    def compatible_with(self, other: "LogGrid") -> bool:
        """Same log step, so a Haar convolution of the two lands on a log grid."""
        return math.isclose(self.log_step, other.log_step, rel_tol=1e-9)


def make_log_grid(r_min: float, r_max: float, n_per_side: int) -> LogGrid:
    """Build a symmetric logarithmic grid; raises DomainError on bad arguments."""
    return LogGrid(float(r_min), float(r_max), int(n_per_side))


@dataclass
class GridFunction:
    """A real or complex function sampled at every node of a LogGrid."""
    grid: LogGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.shape != (self.grid.size,):
            raise DomainError(f"expected {self.grid.size} values, got shape {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise DomainError("grid function values must be finite")

    @classmethod
    def zeros(cls, grid: LogGrid, dtype=float) -> "GridFunction":
        return cls(grid, np.zeros(grid.size, dtype=dtype))

    @classmethod
    def from_callable(cls, grid: LogGrid, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        return cls(grid, np.asarray(fn(grid.nodes)))

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def positive_values(self) -> np.ndarray:
        return self.values[self.grid.n_per_side:]

    @property
    def negative_values(self) -> np.ndarray:
        """Values at -r for r ascending."""
        return self.values[: self.grid.n_per_side][::-1]

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.grid, values)

    def __call__(self, x) -> np.ndarray:
        """
        Log-linear interpolation; zero outside [r_min, r_max] in |x|.

        Between two positive samples the interpolation is a power law
        (linear in log-log); otherwise it is linear in ln|x|.
        """
        x = np.asarray(x, dtype=float)
        r = np.abs(x)
        inside = (r >= self.grid.r_min) & (r <= self.grid.r_max)
        u = np.log(np.where(inside, r, self.grid.r_min))
        pos = self.positive_values
        neg = self.negative_values
        out = np.where(x > 0, _loglinear(u, self.grid.log_nodes, pos), _loglinear(u, self.grid.log_nodes, neg))
        return np.where(inside, out, 0.0)

    def integral(self, weight_values: Optional[np.ndarray] = None) -> complex:
        """Trapezoid rule in u = ln|x| of values * weight over the grid's support."""
        g = self.values if weight_values is None else self.values * weight_values
        x = np.abs(self.nodes)
        u = np.log(x)
        n = self.grid.n_per_side
        neg, pos = g[:n] * x[:n], g[n:] * x[n:]
        total = trapezoid(pos, u[n:]) + trapezoid(neg[::-1], u[:n][::-1])
        return total.item() if np.iscomplexobj(total) else float(total)


def _loglinear(u: np.ndarray, nodes_u: np.ndarray, values: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(values):
        return np.interp(u, nodes_u, values.real) + 1j * np.interp(u, nodes_u, values.imag)
    linear = np.interp(u, nodes_u, values)
    if np.all(values > 0):
        return np.exp(np.interp(u, nodes_u, np.log(values)))
    idx = np.clip(np.searchsorted(nodes_u, u) - 1, 0, len(nodes_u) - 2)
    left, right = values[idx], values[idx + 1]
    both_positive = (left > 0) & (right > 0)
    safe_left = np.where(both_positive, left, 1.0)
    safe_right = np.where(both_positive, right, 1.0)
    frac = (u - nodes_u[idx]) / (nodes_u[idx + 1] - nodes_u[idx])
    power = np.exp((1 - frac) * np.log(safe_left) + frac * np.log(safe_right))
    return np.where(both_positive, power, linear)


# ============================================================================
# DOUBLE-EXPONENTIAL RULES
# ============================================================================

@lru_cache(maxsize=32)
def _abscissae(t_max: float, level: int) -> Tuple[np.ndarray, float]:
    h = 2.0 ** -level
    k = np.arange(-math.ceil(t_max / h), math.ceil(t_max / h) + 1)
    return k * h, h


def finite_rule(lo, hi, level: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Tanh-sinh nodes and weights on [lo, hi]. lo and hi may be arrays; the
    node axis is appended as the last axis. Degenerate pieces get zero weight.
    """
    t, h = _abscissae(_T_FINITE, level)
    lo = np.asarray(lo, dtype=float)[..., None]
    hi = np.asarray(hi, dtype=float)[..., None]
    z = math.pi * np.sinh(t)
    s, c = expit(z), expit(-z)
    span = hi - lo
    x = np.where(s <= 0.5, lo + span * s, hi - span * c)
    w = span * (h * math.pi) * np.cosh(t) * s * c
    return x, w


def tail_rule(lo, level: int) -> Tuple[np.ndarray, np.ndarray]:
    """Exp-sinh nodes and weights on [lo, inf)."""
    t, h = _abscissae(_T_TAIL, level)
    lo = np.asarray(lo, dtype=float)[..., None]
    e = np.exp(0.5 * math.pi * np.sinh(t))
    x = lo + e
    w = (h * 0.5 * math.pi) * np.cosh(t) * e
    return x, w + 0.0 * lo


def line_rule(level: int) -> Tuple[np.ndarray, np.ndarray]:
    """Sinh-sinh nodes and weights on the whole line."""
    t, h = _abscissae(_T_TAIL, level)
    inner = 0.5 * math.pi * np.sinh(t)
    x = np.sinh(inner)
    w = (h * 0.5 * math.pi) * np.cosh(t) * np.cosh(inner)
    return x, w


def _rule_for(lo: float, hi: float, level: int) -> Tuple[np.ndarray, np.ndarray]:
    if math.isfinite(lo) and math.isfinite(hi):
        return finite_rule(lo, hi, level)
    if math.isfinite(lo):
        return tail_rule(lo, level)
    if math.isfinite(hi):
        x, w = tail_rule(-hi, level)
        return -x, w
    return line_rule(level)


def weighted_sum(values: np.ndarray, weights: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sum values * weights along the last axis.

    Non-finite contributions at the outer tenth of the abscissa range come
    from overflow at the truncation ends and are dropped. Returns the sum and
    the magnitude of the two outermost contributions, the truncation error.
    """
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        contrib = values * weights
    n = contrib.shape[-1]
    edge = np.zeros(n, dtype=bool)
    edge[: max(1, n // 10)] = True
    edge[-max(1, n // 10):] = True
    bad = ~np.isfinite(contrib)
    if np.any(bad & ~edge):
        raise DivergenceError("integrand is not finite at interior quadrature nodes")
    contrib = np.where(bad, 0.0, contrib)
    truncation = np.abs(contrib[..., 0]) + np.abs(contrib[..., -1])
    return contrib.sum(axis=-1), truncation


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float


def _integrate_piece(f: Callable, lo: float, hi: float, tol: float, max_level: int) -> QuadratureResult:
    previous = None
    value, error = 0.0, math.inf
    for level in range(_START_LEVEL, max_level + 1):
        x, w = _rule_for(lo, hi, level)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            fx = np.asarray(f(x))
        total, truncation = weighted_sum(fx, w)
        value = complex(total) if np.iscomplexobj(total) else float(total)
        error = float(truncation) + (abs(value - previous) if previous is not None else math.inf)
        logger.debug("piece [%g, %g] level %d: %.12g (err %.2g)", lo, hi, level, abs(value), error)
        if previous is not None and error <= tol * abs(value) + 1e-300:
            return QuadratureResult(value, error)
        previous = value
    return QuadratureResult(value, error)


def _split_point(lo: float, hi: float) -> float:
    if math.isfinite(lo) and math.isfinite(hi):
        if lo > 0:
            return math.sqrt(lo * hi)
        if hi < 0:
            return -math.sqrt(lo * hi)
        return 0.5 * (lo + hi) if lo != 0 and hi != 0 else (hi / 64 if lo == 0 else lo / 64)
    if math.isfinite(lo):
        return lo + max(1.0, abs(lo))
    if math.isfinite(hi):
        return hi - max(1.0, abs(hi))
    return 0.0


def integrate_with_error(
    f: Callable[[np.ndarray], np.ndarray],
    domain: Interval,
    tol: float = DEFAULT_TOL,
    breakpoints: Iterable[float] = (),
    max_level: int = _MAX_LEVEL,
    max_subdivisions: int = _MAX_SUBDIVISIONS,
) -> QuadratureResult:
    """
    Adaptive double-exponential quadrature of a vectorized integrand.

    Args:
        f: Integrand accepting and returning numpy arrays
        domain: Integration interval (may be infinite)
        tol: Requested relative tolerance
        breakpoints: Interior points where f jumps or is singular
        max_level: Finest step 2**-max_level in the auxiliary variable
        max_subdivisions: Budget of bisections before giving up

    Returns:
        QuadratureResult with value and error bound

    Raises:
        ConvergenceError: carrying the partial estimate when the budget runs out
    """
    if tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    cuts = sorted({float(b) for b in breakpoints if domain.lo < b < domain.hi})
    edges = [domain.lo, *cuts, domain.hi]
    pending: List[Tuple[float, float]] = list(zip(edges[:-1], edges[1:]))
    value, error, budget = 0.0, 0.0, max_subdivisions
    while pending:
        lo, hi = pending.pop()
        result = _integrate_piece(f, lo, hi, tol, max_level)
        if result.error <= tol * abs(result.value) + 1e-300 or budget <= 0:
            value += result.value
            error += result.error
            continue
        mid = _split_point(lo, hi)
        if not lo < mid < hi:
            value += result.value
            error += result.error
            continue
        budget -= 1
        pending.extend([(lo, mid), (mid, hi)])
    if not error <= tol * abs(value) + 1e-300:
        raise ConvergenceError(value, error)
    return QuadratureResult(value, error)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    domain: Interval,
    tol: float = DEFAULT_TOL,
    breakpoints: Iterable[float] = (),
) -> float:
    """Integral of f over domain to relative tolerance tol. See integrate_with_error."""
    return integrate_with_error(f, domain, tol, breakpoints).value


# ============================================================================
# SUPREMUM OVER A SCALE PARAMETER
# ============================================================================

@dataclass(frozen=True)
class ScaleSupremum:
    arg: float
    value: float
    divergent: bool = False
    scan: Tuple[Tuple[float, float], ...] = ()


DEFAULT_SCALE_SEARCH = Interval(1e-6, 1e6)


def sup_over_scale(
    g: Callable[[float], float],
    search: Interval = DEFAULT_SCALE_SEARCH,
    refine_tol: float = DEFAULT_TOL,
    seeds_per_decade: int = 64,
) -> ScaleSupremum:
    """
    Supremum of g over a scale parameter alpha > 0.

    A log-uniform scan locates the best seed, then a bounded golden-section
    (Brent) search in ln(alpha) refines it. Growth that keeps going at either
    end of the scan is reported through the divergent flag.
    """
    lo = search.lo if search.lo > 0 else DEFAULT_SCALE_SEARCH.lo
    hi = search.hi if math.isfinite(search.hi) else DEFAULT_SCALE_SEARCH.hi
    decades = math.log10(hi / lo)
    n = max(3, int(math.ceil(decades * seeds_per_decade)) + 1)
    u = np.linspace(math.log(lo), math.log(hi), n)
    values = np.array([_finite_or(g(math.exp(ui))) for ui in u])
    scan = tuple((float(math.exp(ui)), float(v)) for ui, v in zip(u, values))

    if np.any(np.isposinf(values)):
        i = int(np.argmax(np.isposinf(values)))
        logger.warning("scale supremum unbounded at alpha=%g", math.exp(u[i]))
        return ScaleSupremum(float(math.exp(u[i])), math.inf, True, scan)

    i = int(np.argmax(values))
    best_u, best = float(u[i]), float(values[i])
    if i in (0, n - 1):
        step = max(1, int(round(seeds_per_decade)))
        inner = values[min(step, n - 1)] if i == 0 else values[max(n - 1 - step, 0)]
        if inner != 0 and np.isfinite(inner) and (best - inner) / abs(inner) > 0.023:
            logger.warning("scale supremum grows at the %s end of the scan", "lower" if i == 0 else "upper")
            return ScaleSupremum(float(math.exp(best_u)), best, True, scan)
        return ScaleSupremum(float(math.exp(best_u)), best, False, scan)

    if values[i - 1] < best and values[i + 1] < best:
        result = minimize_scalar(
            lambda v: -_finite_or(g(math.exp(v)), -math.inf),
            bounds=(float(u[i - 1]), float(u[i + 1])),
            method="bounded",
            options={"xatol": refine_tol * max(1.0, abs(best_u)), "maxiter": 500},
        )
        if np.isfinite(result.fun) and -result.fun >= best:
            best_u, best = float(result.x), float(-result.fun)
    return ScaleSupremum(float(math.exp(best_u)), best, False, scan)


def _finite_or(value: float, nan_value: float = -math.inf) -> float:
    value = float(value)
    return nan_value if math.isnan(value) else value


def log_space(lo: float, hi: float, count: int) -> np.ndarray:
    """Log-uniform sample of [lo, hi] with count points."""
    return np.exp(np.linspace(math.log(lo), math.log(hi), count))


def require(condition: bool, message: str) -> None:
    if not condition:
        raise DomainError(message)


def sorted_unique(points: Sequence[float]) -> List[float]:
    return sorted(set(float(p) for p in points))


# ============================================================================
# DIVERGENCE-AWARE INTEGRALS
# ============================================================================

@dataclass(frozen=True)
class LadderResult:
    value: float
    divergent: bool
    estimates: Tuple[float, ...] = ()


def ladder_integral(
    f: Callable[[np.ndarray], np.ndarray],
    domain: Interval,
    singular_points: Iterable[float] = (0.0,),
    tol: float = DEFAULT_TOL,
    breakpoints: Iterable[float] = (),
    rungs: int = 5,
    factor: float = 1e-3,
) -> LadderResult:
    """
    Integral with divergence detection at singular points and infinite ends.

    The domain is truncated around each singular point (holes of radius
    scale * factor**k) and at infinite ends (radius scale / factor**k). The
    integral is declared divergent when the truncated estimate doubles twice
    in a row, or when its increments stop shrinking.
    """
    singular = [float(s) for s in singular_points if domain.lo <= s <= domain.hi]
    infinite = not domain.is_bounded
    cuts = list(breakpoints) + singular
    if not singular and not infinite:
        return LadderResult(integrate_with_error(f, domain, tol, cuts).value, False)

    finite_ends = [abs(e) for e in (domain.lo, domain.hi) if math.isfinite(e)]
    scale = max([1.0] + finite_ends)
    hole_scale = min(
        [scale] + [abs(s - e) / 4 for s in singular for e in (domain.lo, domain.hi) if math.isfinite(e) and s != e]
    )
    estimates = []
    for k in range(1, rungs + 1):
        lo = domain.lo if math.isfinite(domain.lo) else -scale / factor ** k
        hi = domain.hi if math.isfinite(domain.hi) else scale / factor ** k
        eps = hole_scale * factor ** k
        edges = [lo]
        for s in sorted(singular):
            edges.extend([max(lo, s - eps), min(hi, s + eps)])
        edges.append(hi)
        total = 0.0
        for a, b in zip(edges[0::2], edges[1::2]):
            if b > a:
                try:
                    total += integrate_with_error(f, Interval(a, b), tol, cuts).value
                except ConvergenceError as exc:
                    total += exc.estimate
        estimates.append(total)

    divergent = _ladder_diverges(estimates, tol)
    if divergent:
        logger.warning("integral over [%g, %g] diverges (truncated estimates %s)",
                       domain.lo, domain.hi, ", ".join(f"{e:.4g}" for e in estimates))
        return LadderResult(estimates[-1], True, tuple(estimates))
    try:
        value = integrate_with_error(f, domain, tol, cuts).value
    except ConvergenceError as exc:
        value = exc.estimate if math.isfinite(exc.estimate) else estimates[-1]
    except DivergenceError:
        value = estimates[-1]
    return LadderResult(value, False, tuple(estimates))


def _ladder_diverges(estimates: Sequence[float], tol: float) -> bool:
    e = [abs(v) for v in estimates]
    for a, b, c in zip(e, e[1:], e[2:]):
        if a > 0 and b >= 2 * a and c >= 2 * b:
            return True
    d = [abs(b - a) for a, b in zip(estimates, estimates[1:])]
    tail = d[-3:]
    floor = max(tol, 1e-10) * max(e[-1], 1e-300)
    if len(tail) < 3 or not all(x > floor for x in tail):
        return False
    return tail[0] <= tail[1] * (1 + 1e-9) and tail[1] <= tail[2] * (1 + 1e-9)


# ============================================================================
# PROFILE FILES
# ============================================================================

def read_profile_csv(path) -> Tuple[np.ndarray, np.ndarray]:
    """
    Read a two-column (node, value) CSV, skipping a header row if present.

    Nodes must be positive and strictly ascending.
    """
    path = Path(path)
    if not path.exists():
        raise DomainError(f"profile file not found: {path}")
    frame = pd.read_csv(path, header=None, comment="#").apply(pd.to_numeric, errors="coerce").dropna()
    if frame.shape[1] < 2 or len(frame) < 2:
        raise DomainError(f"profile {path} needs two numeric columns and at least two rows")
    nodes = frame.iloc[:, 0].to_numpy(dtype=float)
    values = frame.iloc[:, 1].to_numpy(dtype=float)
    if np.any(nodes <= 0) or np.any(np.diff(nodes) <= 0):
        raise DomainError(f"profile {path} nodes must be positive and strictly ascending")
    return nodes, values
