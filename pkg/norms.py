"""
Weighted Norms and Theorem Constants

Strong and weak weighted Lebesgue norms of sampled or closed-form functions,
the kernel constants K_{Phi,beta,q} and K_{Phi,s,q,gamma}, and the two-weight
constants A (increasing weights) and B (decreasing weights).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from grid_core import (
    DEFAULT_SCALE_SEARCH,
    DEFAULT_TOL,
    ConvergenceError,
    DivergenceError,
    DomainError,
    GridFunction,
    Interval,
    ScaleSupremum,
    finite_rule,
    integrate_with_error,
    ladder_integral,
    sup_over_scale,
    weighted_sum,
)
from hausdorff_operator import ExponentSet, FunctionLike, conjugate, function_breakpoints
from kernels import Kernel
from weights import ConstantWeight, PowerWeight, Weight, ZeroWeight

logger = logging.getLogger(__name__)

__all__ = [
    "NormValue", "weighted_lp_norm", "weak_lp_norm", "k_constant", "k_general",
    "A_constant", "B_constant", "conjugate",
]


@dataclass
class NormValue:
    """A norm or constant; when divergent, value is the last finite refinement."""
    value: float
    divergent: bool = False
    quadrature_error: float = 0.0
    detail: Dict[str, Any] = field(default_factory=dict)

    def __float__(self) -> float:
        return float(self.value)


# ============================================================================
# STRONG NORMS
# ============================================================================

def _grid_integral(f: GridFunction, g: Callable[[np.ndarray], np.ndarray], level: int) -> Tuple[float, float]:
    """Integral of g(x) = integrand built from f over every grid segment, both signs."""
    r = f.grid.positive_nodes
    lo, hi = r[:-1], r[1:]
    x, w = finite_rule(lo, hi, level)
    total, trunc = weighted_sum(g(x) + g(-x), w)
    return float(total.sum()), float(trunc.sum())


def weighted_lp_norm(
    f: FunctionLike, w: Weight, p: float, tol: float = DEFAULT_TOL, check_divergence: bool = False,
) -> NormValue:
    """
    (integral of |f|^p w)^(1/p).

    Grid functions are integrated exactly segment by segment through their
    log-linear interpolant; closed forms go through the adaptive quadrature
    with their breakpoints, falling back to the divergence ladder when it
    fails to converge. check_divergence forces the ladder even when the
    plain quadrature converges.
    """
    if p <= 0:
        raise DomainError(f"norm exponent must be positive, got {p}")

    def integrand(x):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return np.power(np.abs(f(x)), p) * w.values(x)

    if isinstance(f, GridFunction):
        if not np.any(f.values):
            return NormValue(0.0)
        coarse, _ = _grid_integral(f, integrand, 2)
        fine, trunc = _grid_integral(f, integrand, 3)
        return NormValue(max(fine, 0.0) ** (1 / p), False, abs(fine - coarse) + trunc)

    def even_integrand(x):
        return integrand(x) + integrand(-x)

    cuts = function_breakpoints(f)
    domain = Interval(0.0, math.inf)
    if not check_divergence:
        try:
            result = integrate_with_error(even_integrand, domain, tol, cuts)
            return NormValue(max(result.value, 0.0) ** (1 / p), False, result.error)
        except (ConvergenceError, DivergenceError) as exc:
            logger.debug("norm quadrature failed (%s); checking for divergence", exc)
    ladder = ladder_integral(even_integrand, domain, [0.0], tol, breakpoints=cuts)
    if ladder.divergent:
        return NormValue(max(ladder.value, 0.0) ** (1 / p), True, math.inf)
    return NormValue(max(ladder.value, 0.0) ** (1 / p), False, abs(ladder.estimates[-1] - ladder.estimates[-2]))


# ============================================================================
# WEAK NORMS
# ============================================================================

def _sampled_profile(f: FunctionLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Ascending positive nodes with |f| at +nodes and at -nodes."""
    if isinstance(f, GridFunction):
        return f.grid.positive_nodes, np.abs(f.positive_values), np.abs(f.negative_values)
    nodes = np.exp(np.linspace(math.log(1e-8), math.log(1e8), 16001))
    extra = []
    for b in function_breakpoints(f):
        extra.extend([b * (1 - 1e-12), b * (1 + 1e-12)])
    nodes = np.unique(np.concatenate([nodes, np.asarray(extra, dtype=float)]))
    return nodes, np.abs(f(nodes)), np.abs(f(-nodes))


def _interval_mass(w: Weight, start: np.ndarray, stop: np.ndarray) -> np.ndarray:
    """w-measure of each [start_i, stop_i] on the positive half-line."""
    if isinstance(w, ZeroWeight):
        return np.zeros_like(start)
    if isinstance(w, ConstantWeight):
        return w.c * (stop - start)
    if isinstance(w, PowerWeight):
        e = w.a + 1
        return (np.power(stop, e) - np.power(start, e)) / e
    x, q = finite_rule(start, stop, 3)
    total, _ = weighted_sum(w.values(x), q)
    return total


class _LevelSets:
    """Distribution function of |f| on one half-line for the log-linear interpolant."""

    def __init__(self, nodes: np.ndarray, values: np.ndarray, w: Weight):
        self.lo, self.hi = nodes[:-1], nodes[1:]
        self.a, self.b = values[:-1], values[1:]
        self.w = w
        self.cell_mass = _interval_mass(w, self.lo, self.hi)

    def measure(self, lam: float) -> float:
        above_a, above_b = self.a > lam, self.b > lam
        total = float(self.cell_mass[above_a & above_b].sum())
        cross = above_a ^ above_b
        if not np.any(cross):
            return total
        la, lb = self.lo[cross], self.hi[cross]
        va, vb = self.a[cross], self.b[cross]
        positive = (va > 0) & (vb > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            log_va = np.log(np.where(positive, va, 1.0))
            log_vb = np.log(np.where(positive, vb, 1.0))
            frac_log = (math.log(lam) - log_va) / (log_vb - log_va)
            frac_lin = (lam - va) / (vb - va)
        frac = np.clip(np.where(positive, frac_log, frac_lin), 0.0, 1.0)
        star = np.exp(np.log(la) + frac * (np.log(lb) - np.log(la)))
        start = np.where(va > lam, la, star)
        stop = np.where(va > lam, star, lb)
        return total + float(_interval_mass(self.w, start, stop).sum())


def weak_lp_norm(f: FunctionLike, w: Weight, p: float) -> NormValue:
    """
    sup over lam > 0 of lam * w({|f| > lam})^(1/p).

    The distribution function of the log-linear interpolant is exact; the
    supremum is seeded at the function's own values (where simple functions
    attain it) and refined by golden-section search in ln(lam).
    """
    if p <= 0:
        raise DomainError(f"weak norm exponent must be positive, got {p}")
    nodes, plus, minus = _sampled_profile(f)
    values = np.concatenate([plus, minus])
    positive = values[values > 0]
    if positive.size == 0:
        return NormValue(0.0)

    right, left = _LevelSets(nodes, plus, w), _LevelSets(nodes, minus, w)

    def objective(lam: float) -> float:
        mass = right.measure(lam) + left.measure(lam)
        return lam * mass ** (1 / p)

    seeds = np.unique(positive)
    if seeds.size > 512:
        seeds = np.quantile(positive, np.linspace(0, 1, 512))
    below = seeds * (1 - 1e-9)
    scores = np.array([objective(lam) for lam in below])
    i = int(np.argmax(scores))
    best_lam, best = float(below[i]), float(scores[i])
    lo = math.log(below[i - 1]) if i > 0 else math.log(below[i]) - 1.0
    hi = math.log(below[i + 1]) if i + 1 < below.size else math.log(below[i]) + 1e-9
    if hi > lo:
        result = minimize_scalar(lambda u: -objective(math.exp(u)), bounds=(lo, hi), method="bounded",
                                 options={"xatol": 1e-10})
        if -result.fun > best:
            best_lam, best = math.exp(result.x), float(-result.fun)
    return NormValue(best, False, 0.0, {"lambda": best_lam})


# ============================================================================
# KERNEL CONSTANTS
# ============================================================================

def k_general(k: Kernel, s: float, q: float, gamma: float = 0.0, tol: float = 1e-10) -> NormValue:
    """
    K_{Phi,s,q,gamma} = (integral of |Phi(t)|^s |t|^((1+gamma)s/q - 1) dt)^(1/s).

    detail carries the |t| <= 1 and |t| > 1 parts and flags a dominant tail.
    """
    if s < 1:
        raise DomainError(f"K constant needs s >= 1, got {s}")
    power = (1 + gamma) * s / q - 1

    def integrand(t):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            return (np.power(np.abs(k.values(t)), s) + np.power(np.abs(k.values(-t)), s)) * np.power(t, power)

    cuts = k.breakpoints()
    core = ladder_integral(integrand, Interval(0.0, 1.0), [0.0], tol, breakpoints=cuts)
    tail = ladder_integral(integrand, Interval(1.0, math.inf), [], tol, breakpoints=cuts)
    total = core.value + tail.value
    divergent = core.divergent or tail.divergent
    detail = {"core": core.value, "tail": tail.value, "tail_dominates": tail.value > core.value,
              "core_divergent": core.divergent, "tail_divergent": tail.divergent}
    if detail["tail_dominates"] and tail.value > 0:
        logger.info("K constant for '%s' is dominated by its |t| > 1 part", k.name)
    value = max(total, 0.0) ** (1 / s)
    if divergent:
        logger.warning("K constant for '%s' diverges (s=%g, q=%g, gamma=%g)", k.name, s, q, gamma)
    return NormValue(value, divergent, tol * value, detail)


def k_constant(k: Kernel, beta: float, q: float, tol: float = 1e-10) -> NormValue:
    """K_{Phi,beta,q} = K_{Phi,s,q,0} with s = 1/(1-beta)."""
    if not 0 <= beta < 1:
        raise DomainError(f"beta must lie in [0, 1), got {beta}")
    return k_general(k, 1.0 / (1.0 - beta), q, 0.0, tol)


# ============================================================================
# TWO-WEIGHT CONSTANTS
# ============================================================================

def _power_weight_fn(w: Weight, exponent: float, extra: float = 0.0):
    def fn(x):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            out = np.power(w.values(x), exponent)
            if extra:
                out = out * np.power(np.abs(x), extra)
            return out
    return fn


def _is_zero(w: Weight) -> bool:
    return isinstance(w, ZeroWeight)


def _two_factor_sup(
    inner_fn, inner_exp: float, outer_fn, outer_exp: float,
    inner_zero: bool, outer_zero: bool,
    search: Interval, refine_tol: float, tol: float, label: str,
) -> Tuple[NormValue, float]:
    """
    sup over alpha of (2 int_0^alpha inner)^inner_exp * (2 int_alpha^inf outer)^outer_exp.
    """
    if inner_zero or outer_zero:
        return NormValue(0.0, False, 0.0, {"reason": "vanishing factor"}), 1.0

    core = ladder_integral(inner_fn, Interval(0.0, 1.0), [0.0], tol)
    tail = ladder_integral(outer_fn, Interval(1.0, math.inf), [], tol)
    if core.divergent or tail.divergent:
        which = "core" if core.divergent else "tail"
        logger.warning("%s constant: %s factor diverges for every scale", label, which)
        return NormValue(math.inf, True, math.inf, {"divergent_factor": which}), math.nan

    def product(alpha: float) -> float:
        a = integrate_with_error(inner_fn, Interval(0.0, alpha), tol).value
        b = integrate_with_error(outer_fn, Interval(alpha, math.inf), tol).value
        return (2 * a) ** inner_exp * (2 * b) ** outer_exp

    found: ScaleSupremum = sup_over_scale(product, search, refine_tol)
    scan = np.array([v for _, v in found.scan])
    spread = float(np.std(scan) / np.mean(scan)) if scan.size and np.mean(scan) > 0 else 0.0
    detail = {"alpha_relative_spread": spread}
    if found.divergent:
        return NormValue(found.value, True, math.inf, detail), found.arg
    return NormValue(found.value, False, refine_tol * abs(found.value), detail), found.arg


def A_constant(
    u: Weight, v: Weight, exps: ExponentSet,
    search: Interval = DEFAULT_SCALE_SEARCH, refine_tol: float = DEFAULT_TOL, tol: float = 1e-11,
) -> Tuple[NormValue, float]:
    """
    A = sup_alpha (int_{|x|>=alpha} u |x|^(-q(1-beta)))^(1/q) (int_{|x|<=alpha} v^(1-p'))^(1/p').

    Returns the value and the maximizing alpha.
    """
    if not (exps.p > 1 and exps.q > 1):
        raise DomainError(f"A constant needs p, q in (1, inf), got p={exps.p}, q={exps.q}")
    if exps.q * (1 - exps.beta) <= 1:
        raise DomainError(f"A constant needs q(1 - beta) > 1, got {exps.q * (1 - exps.beta)}")
    p_prime = exps.p_prime
    return _two_factor_sup(
        _power_weight_fn(v, 1 - p_prime), 1 / p_prime,
        _power_weight_fn(u, 1.0, -exps.q * (1 - exps.beta)), 1 / exps.q,
        False, _is_zero(u),
        search, refine_tol, tol, "A",
    )


def B_constant(
    u: Weight, v: Weight, exps: ExponentSet,
    search: Interval = DEFAULT_SCALE_SEARCH, refine_tol: float = DEFAULT_TOL, tol: float = 1e-11,
) -> Tuple[NormValue, float]:
    """
    B = sup_alpha (int_{|x|<=alpha} u)^(1/q) (int_{|x|>=alpha} v^(1-p') |x|^(-(1-beta)p'))^(1/p').

    A non-integrable tail (e.g. constant v with p'(1-beta) <= 1) is reported
    through the divergent flag.
    """
    if not (exps.p > 1 and exps.q > 1):
        raise DomainError(f"B constant needs p, q in (1, inf), got p={exps.p}, q={exps.q}")
    p_prime = exps.p_prime
    return _two_factor_sup(
        _power_weight_fn(u, 1.0), 1 / exps.q,
        _power_weight_fn(v, 1 - p_prime, -(1 - exps.beta) * p_prime), 1 / p_prime,
        _is_zero(u), False,
        search, refine_tol, tol, "B",
    )
