"""
Inequality Verification Harness

Empirical checks of the two-weight Lebesgue theorems (increasing and
decreasing weights), the two-weight Hardy inequalities, the Young inequality
on the multiplicative group and the power-weight boundedness bound.

Each check computes the theoretical constants, evaluates the operator on a
test family (the extremal functions f_a over an a-grid plus smooth
near-extremal power-decay members) and returns a report with a verdict.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from experiment_config import worker_count
from grid_core import (
    EMPIRICAL_TOL,
    ConvergenceError,
    DivergenceError,
    DomainError,
    GridFunction,
    LogGrid,
    PreconditionError,
    log_space,
    make_log_grid,
)
from hausdorff_operator import (
    ClosedForm,
    ExponentSet,
    FunctionLike,
    hausdorff_image,
    mult_convolve,
)
from kernels import AdjointHardy, BoundRegion, FractionalHardy, Kernel, KernelBounds, verify_bounds
from norms import A_constant, B_constant, NormValue, k_constant, k_general, weighted_lp_norm
from reports import VerificationReport
from weights import Direction, PowerWeight, Weight

logger = logging.getLogger(__name__)

VERDICT_TOL = 1e-3
DEFAULT_A_GRID = tuple(float(a) for a in log_space(1e-2, 1e2, 9))
DEFAULT_EPSILONS = (0.1, 0.03, 0.01)


@dataclass
class SandwichReport:
    """lower <= empirical <= upper up to a relative tolerance."""
    lower: float
    empirical: float
    upper: float
    passed: bool
    witnesses: Dict[str, Any] = field(default_factory=dict)
    constants: Dict[str, Any] = field(default_factory=dict)
    tolerance: float = VERDICT_TOL

    def to_report(self, title: str, provenance: str) -> VerificationReport:
        report = VerificationReport(title, provenance)
        report.quantities.update(self.constants)
        report.quantities["witness"] = self.witnesses
        report.add("lower_bound", self.lower, bound=self.empirical,
                   tolerance=self.tolerance * max(abs(self.lower), 1.0))
        report.add("upper_bound", self.empirical, bound=self.upper,
                   tolerance=self.tolerance * max(abs(self.upper), 1.0))
        return report


def _verdict(lower: float, empirical: float, upper: float, tol: float) -> bool:
    return lower - tol * abs(lower) <= empirical <= upper + tol * abs(upper)


# ============================================================================
# TEST FAMILIES
# ============================================================================

def extremal_test_function(
    kind: Direction, a: float, v: Weight, exps: ExponentSet, grid: Optional[LogGrid] = None,
) -> FunctionLike:
    """
    The extremal function f_a.

    increasing weights: v^(1-p') on |x| <= a
    decreasing weights: (|x|^(1-beta) v)^(1-p') on |x| >= a

    Returned as a closed form, or sampled on ``grid`` when one is given.

    Raises:
        DivergenceError: f_a^p v is not integrable
    """
    kind = Direction(kind)
    if a <= 0:
        raise DomainError(f"extremal cut-off must be positive, got {a}")
    power = 1 - exps.p_prime
    if kind is Direction.INCREASING:
        def fn(x):
            r = np.abs(x)
            with np.errstate(divide="ignore", over="ignore"):
                return np.where(r <= a, np.power(v.values(x), power), 0.0)
    else:
        def fn(x):
            r = np.abs(x)
            with np.errstate(divide="ignore", over="ignore"):
                return np.where(r >= a, np.power(np.power(r, 1 - exps.beta) * v.values(x), power), 0.0)

    f = ClosedForm(fn, (a,), f"f_a[{kind.value}]", (("a", a),))
    norm = weighted_lp_norm(f, v, exps.p, check_divergence=True)
    if norm.divergent or not math.isfinite(norm.value):
        raise DivergenceError(f"extremal function for a={a:g} has non-integrable f^p v")
    if grid is not None:
        return GridFunction.from_callable(grid, f)
    return f


def near_extremal_family(
    exps: ExponentSet, eps_list: Sequence[float] = DEFAULT_EPSILONS, kind: Direction = Direction.INCREASING,
) -> List[ClosedForm]:
    """
    |x|^(-1/p - eps) on |x| >= 1 (increasing) or |x|^(-1/p + eps) on |x| <= 1 (decreasing).
    """
    kind = Direction(kind)
    family = []
    for eps in eps_list:
        if eps <= 0:
            raise DomainError(f"near-extremal members need eps > 0, got {eps}")
        if kind is Direction.INCREASING:
            exponent = -1 / exps.p - eps

            def fn(x, e=exponent):
                r = np.abs(x)
                return np.where(r >= 1, np.power(np.maximum(r, 1.0), e), 0.0)
        else:
            exponent = -1 / exps.p + eps

            def fn(x, e=exponent):
                r = np.abs(x)
                return np.where((r <= 1) & (r > 0), np.power(np.where(r > 0, r, 1.0), e), 0.0)
        family.append(ClosedForm(fn, (1.0,), f"power[{kind.value}]", (("eps", eps),)))
    return family


def extremal_family(
    kind: Direction, v: Weight, exps: ExponentSet, a_grid: Sequence[float] = DEFAULT_A_GRID,
) -> List[FunctionLike]:
    """f_a over the a-grid; members with non-integrable f^p v are skipped."""
    members = []
    for a in a_grid:
        try:
            members.append(extremal_test_function(kind, a, v, exps))
        except DivergenceError as exc:
            logger.info("skipping extremal member: %s", exc)
    return members


# ============================================================================
# EMPIRICAL OPERATOR NORM
# ============================================================================

def _member_ratio(
    k: Kernel, beta: float, u: Weight, v: Weight, exps: ExponentSet, f: FunctionLike, tol: float,
) -> Optional[Tuple[float, Dict[str, Any]]]:
    denominator = weighted_lp_norm(f, v, exps.p, tol=tol)
    if denominator.divergent or not math.isfinite(denominator.value) or denominator.value == 0:
        return None
    try:
        numerator = weighted_lp_norm(hausdorff_image(k, beta, f, tol / 10), u, exps.q, tol=tol)
    except (DivergenceError, ConvergenceError) as exc:
        logger.info("family member %s dropped: %s", _describe(f), exc)
        return None
    if numerator.divergent:
        return math.inf, _describe(f)
    return numerator.value / denominator.value, _describe(f)


def _describe(f: FunctionLike) -> Dict[str, Any]:
    if hasattr(f, "describe"):
        return f.describe()
    return {"label": getattr(f, "__name__", "f")}


def empirical_operator_norm(
    k: Kernel,
    beta: float,
    u: Weight,
    v: Weight,
    exps: ExponentSet,
    family: Sequence[FunctionLike],
    tol: float = EMPIRICAL_TOL,
) -> Tuple[float, Dict[str, Any]]:
    """
    Best observed ||h f||_{L^q_u} / ||f||_{L^p_v} over the family.

    Members are evaluated on a thread pool capped by HAUSDORFF_MAX_WORKERS;
    ties keep the earliest member so the result does not depend on
    completion order.

    Raises:
        DomainError: no member has a finite nonzero L^p_v norm
    """
    if not family:
        raise DomainError("empirical operator norm needs a nonempty family")
    workers = min(worker_count(), len(family))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda f: _member_ratio(k, beta, u, v, exps, f, tol), family))
    else:
        results = [_member_ratio(k, beta, u, v, exps, f, tol) for f in family]

    admissible = [r for r in results if r is not None]
    if not admissible:
        raise DomainError("no admissible witness: every family member has zero or infinite norm")
    best = max(range(len(admissible)), key=lambda i: (admissible[i][0], -i))
    ratio, witness = admissible[best]
    logger.debug("empirical norm %.6g over %d members", ratio, len(admissible))
    return ratio, witness


# ============================================================================
# THEOREM SANDWICHES
# ============================================================================

def _require(condition: bool, hypothesis: str, message: str) -> None:
    if not condition:
        raise PreconditionError(hypothesis, message)


def _check_common(k: Kernel, bounds: KernelBounds, region: BoundRegion, beta: float, exps: ExponentSet,
                  u: Weight, v: Weight, direction: Direction) -> None:
    _require(exps.p > 1 and exps.q > 1, "exponent range", f"needs p, q in (1, inf), got {exps.p}, {exps.q}")
    _require(abs(exps.beta - beta) <= 1e-12, "exponent set", f"beta {beta} differs from exps.beta {exps.beta}")
    _require(exps.is_lebesgue_diagonal, "diagonal exponents",
             f"1/p - 1/q must equal beta (gap {exps.diagonal_gap:.3g})")
    _require(u.is_monotone(direction) and v.is_monotone(direction), "monotone weights",
             f"u and v must be even and {direction.value} on (0, inf)")
    _require(bounds.region is region, "kernel bounds", f"kernel bounds must be stated {region.value}")
    probe = make_log_grid(1e-4, 1e4, 257)
    bound_report = verify_bounds(k, bounds, probe, beta)
    _require(bound_report.passed, "kernel bounds",
             f"kernel '{k.name}' violates the stated bounds C1={bounds.C1}, C2={bounds.C2}")


def _empirical_with_extremals(
    k, beta, u, v, exps, family, kind: Direction, a_grid, tol,
) -> Tuple[float, Dict[str, Any]]:
    members = list(family) + extremal_family(kind, v, exps, a_grid)
    return empirical_operator_norm(k, beta, u, v, exps, members, tol)


def verify_sandwich_increasing(
    k: Kernel,
    bounds: KernelBounds,
    beta: float,
    u: Weight,
    v: Weight,
    exps: ExponentSet,
    family: Sequence[FunctionLike] = (),
    a_grid: Sequence[float] = DEFAULT_A_GRID,
    tol: float = VERDICT_TOL,
) -> SandwichReport:
    """
    C1 A <= C <= 2^(1/q') A {K 2^(beta-1) [q(1-beta)-1]^(1/q) (1 + 2^(1/q')) + C2 (p')^(1/p') p^(1/q)}
    for even increasing weights.

    Raises:
        PreconditionError: naming the hypothesis that fails
    """
    _check_common(k, bounds, BoundRegion.OUTSIDE_UNIT, beta, exps, u, v, Direction.INCREASING)
    _require(exps.q * (1 - beta) > 1, "q > 1/(1-beta)", f"q(1-beta) = {exps.q * (1 - beta):.6g} <= 1")
    kernel_k = k_constant(k, beta, exps.q)
    _require(not kernel_k.divergent or not _core_divergent(kernel_k), "kernel integrability near 0",
             "the |t| <= 1 part of K diverges")

    a_value, maximizer = A_constant(u, v, exps)
    if a_value.divergent:
        raise PreconditionError("A < inf", "the two-weight constant A is infinite")
    p_prime, q_prime = exps.p_prime, exps.q_prime
    A, K = a_value.value, kernel_k.value
    upper = 2 ** (1 / q_prime) * A * (
        K * 2 ** (beta - 1) * (exps.q * (1 - beta) - 1) ** (1 / exps.q) * (1 + 2 ** (1 / q_prime))
        + bounds.C2 * p_prime ** (1 / p_prime) * exps.p ** (1 / exps.q)
    )
    lower = bounds.C1 * A
    empirical, witness = _empirical_with_extremals(k, beta, u, v, exps, family, Direction.INCREASING, a_grid,
                                                   EMPIRICAL_TOL)
    constants = {"A": A, "A_maximizer": maximizer, "K": K, "K_divergent": kernel_k.divergent,
                 "K_tail_dominates": kernel_k.detail.get("tail_dominates", False)}
    return SandwichReport(lower, empirical, upper, _verdict(lower, empirical, upper, tol), witness, constants, tol)


def verify_sandwich_decreasing(
    k: Kernel,
    bounds: KernelBounds,
    beta: float,
    u: Weight,
    v: Weight,
    exps: ExponentSet,
    family: Sequence[FunctionLike] = (),
    a_grid: Sequence[float] = DEFAULT_A_GRID,
    tol: float = VERDICT_TOL,
) -> SandwichReport:
    """
    C1' B <= C <= 2^(1/q') B {K 2^(beta-1) [p'(1-beta)-1]^(1/p') (1 + 2^(1/q')) + C2' (p')^(1/p') p^(1/q)}
    for even decreasing weights.
    """
    _check_common(k, bounds, BoundRegion.INSIDE_UNIT, beta, exps, u, v, Direction.DECREASING)
    p_prime, q_prime = exps.p_prime, exps.q_prime
    _require(p_prime * (1 - beta) > 1, "p' > 1/(1-beta)", f"p'(1-beta) = {p_prime * (1 - beta):.6g} <= 1")
    kernel_k = k_constant(k, beta, exps.q)
    _require(not kernel_k.divergent or not _tail_divergent(kernel_k), "kernel integrability near infinity",
             "the |t| >= 1 part of K diverges")

    b_value, maximizer = B_constant(u, v, exps)
    if b_value.divergent:
        raise PreconditionError("B < inf", "the two-weight constant B is infinite")
    B, K = b_value.value, kernel_k.value
    upper = 2 ** (1 / q_prime) * B * (
        K * 2 ** (beta - 1) * (p_prime * (1 - beta) - 1) ** (1 / p_prime) * (1 + 2 ** (1 / q_prime))
        + bounds.C2 * p_prime ** (1 / p_prime) * exps.p ** (1 / exps.q)
    )
    lower = bounds.C1 * B
    empirical, witness = _empirical_with_extremals(k, beta, u, v, exps, family, Direction.DECREASING, a_grid,
                                                   EMPIRICAL_TOL)
    constants = {"B": B, "B_maximizer": maximizer, "K": K, "K_divergent": kernel_k.divergent,
                 "K_tail_dominates": kernel_k.detail.get("tail_dominates", False)}
    return SandwichReport(lower, empirical, upper, _verdict(lower, empirical, upper, tol), witness, constants, tol)


def _core_divergent(value: NormValue) -> bool:
    return bool(value.detail.get("core_divergent", value.divergent))


def _tail_divergent(value: NormValue) -> bool:
    return bool(value.detail.get("tail_divergent", value.divergent))


# ============================================================================
# TWO-WEIGHT HARDY INEQUALITIES
# ============================================================================

def hardy_inequality_check(
    u: Weight,
    v: Weight,
    exps: ExponentSet,
    direction: str,
    family: Sequence[FunctionLike],
    a_grid: Sequence[float] = DEFAULT_A_GRID,
    tol: float = VERDICT_TOL,
) -> SandwichReport:
    """
    inner: (int (|x|^(beta-1) int_{|y|<=|x|} f)^q u)^(1/q) <= C ||f||_{L^p_v}, A <= C <= A (p')^(1/p') p^(1/q)
    outer: (int (int_{|y|>=|x|} f |y|^(beta-1))^q u)^(1/q) <= C ||f||_{L^p_v}, same bracket with B

    The inner operator is h with the fractional Hardy kernel, the outer one h
    with the adjoint Hardy kernel.
    """
    if not 1 < exps.p <= exps.q < math.inf:
        raise DomainError(f"Hardy inequality needs 1 < p <= q < inf, got p={exps.p}, q={exps.q}")
    if direction not in ("inner", "outer"):
        raise DomainError(f"direction must be 'inner' or 'outer', got '{direction}'")
    supplied = [f for f in family if not _vanishes(f)]
    if not supplied:
        raise DomainError("no admissible witness: the family has no nonzero member")

    beta = exps.beta
    if direction == "inner":
        constant, maximizer = A_constant(u, v, exps)
        kernel: Kernel = FractionalHardy(beta)
        kind = Direction.INCREASING
    else:
        constant, maximizer = B_constant(u, v, exps)
        kernel = AdjointHardy()
        kind = Direction.DECREASING
    if constant.divergent:
        raise PreconditionError("finite two-weight constant", f"the {direction} constant is infinite")

    lower = constant.value
    upper = lower * exps.p_prime ** (1 / exps.p_prime) * exps.p ** (1 / exps.q)
    empirical, witness = _empirical_with_extremals(kernel, beta, u, v, exps, supplied, kind, a_grid, EMPIRICAL_TOL)
    constants = {"direction": direction, "constant": lower, "maximizer": maximizer}
    return SandwichReport(lower, empirical, upper, _verdict(lower, empirical, upper, tol), witness, constants, tol)


def _vanishes(f: FunctionLike) -> bool:
    if isinstance(f, GridFunction):
        return not np.any(f.values)
    probe = np.concatenate([-np.logspace(-6, 6, 121), np.logspace(-6, 6, 121)])
    return not np.any(np.asarray(f(probe)))


# ============================================================================
# MULTIPLICATIVE YOUNG INEQUALITY
# ============================================================================

def _haar_norm(f: GridFunction, p: float) -> float:
    """(int_0^inf |f|^p dx/x)^(1/p) as a Riemann sum in ln x."""
    values = np.abs(f.positive_values)
    return float((np.sum(values ** p) * f.grid.log_step) ** (1 / p))


def young_mult_check(
    f: GridFunction, g: GridFunction, p: float, q: float, s: float, tol: float = 1e-10,
) -> VerificationReport:
    """
    ||f * g||_q <= ||g||_s ||f||_p on (0, inf) with Haar measure dx/x,
    where 1/q = 1/p + 1/s - 1.
    """
    if min(p, q, s) < 1:
        raise DomainError(f"Young exponents must be >= 1, got p={p}, q={q}, s={s}")
    if abs(1 / q - (1 / p + 1 / s - 1)) > 1e-12:
        raise DomainError(f"exponents violate 1/q = 1/p + 1/s - 1 (p={p}, q={q}, s={s})")

    conv = mult_convolve(f, g)
    lhs = _haar_norm(conv, q)
    norm_f, norm_g = _haar_norm(f, p), _haar_norm(g, s)
    inverted = np.abs(g.positive_values[::-1])
    norm_g_inverted = float((np.sum(inverted ** s) * g.grid.log_step) ** (1 / s))

    report = VerificationReport("young_mult", "Young inequality on the multiplicative group")
    report.quantities.update({"p": p, "q": q, "s": s, "norm_f": norm_f, "norm_g": norm_g,
                              "norm_convolution": lhs})
    report.add("inversion_symmetry", abs(norm_g - norm_g_inverted), bound=0.0,
               tolerance=tol * max(norm_g, 1.0))
    report.add("young", lhs, bound=norm_g * norm_f, tolerance=tol * max(norm_g * norm_f, 1e-300))
    return report


def seeded_young_pairs(seed: int, count: int, grid: LogGrid) -> List[Tuple[GridFunction, GridFunction, float, float, float]]:
    """
    Random (f, g, p, q, s): f a nonnegative random profile, g a bump
    symmetric in ln x, exponents drawn with 1/q = 1/p + 1/s - 1 in (0, 1).
    """
    rng = np.random.default_rng(seed)
    u = grid.log_nodes
    pairs = []
    for _ in range(count):
        p = float(rng.uniform(1.1, 3.0))
        p_prime = p / (p - 1)
        s = float(1 + rng.uniform(0.05, 0.9) * (p_prime - 1))
        q = 1 / (1 / p + 1 / s - 1)
        center = float(rng.uniform(u[0] / 2, u[-1] / 2))
        width = float(rng.uniform(0.3, 2.0))
        profile = rng.uniform(0, 1, size=4) @ np.exp(-np.subtract.outer(rng.normal(center, 1, 4), u) ** 2)
        f_pos = np.abs(profile) * np.exp(-((u - center) / (4 * width)) ** 2)
        g_pos = np.exp(-(u / width) ** 2)
        f = GridFunction(grid, np.concatenate([np.zeros_like(f_pos), f_pos]))
        g = GridFunction(grid, np.concatenate([np.zeros_like(g_pos), g_pos]))
        pairs.append((f, g, p, q, s))
    return pairs


# ============================================================================
# POWER-WEIGHT BOUND AND WEIGHT GROWTH
# ============================================================================

def power_weight_bound_check(
    k: Kernel,
    beta: float,
    exps: ExponentSet,
    family: Sequence[FunctionLike],
    tol: float = VERDICT_TOL,
) -> VerificationReport:
    """
    ||h f||_{L^q_{|x|^gamma}} <= 2^(1/q') K_{Phi,s,q,gamma} ||f||_{L^p_{|x|^alpha}}
    when (1+gamma)/q = (1+alpha)/p - beta.
    """
    exps.require_hardy_scaling()
    if abs(exps.beta - beta) > 1e-12:
        raise DomainError(f"beta {beta} differs from exps.beta {exps.beta}")
    if not (exps.p >= 1 and exps.q >= 1):
        raise DomainError(f"power-weight bound needs p, q >= 1, got {exps.p}, {exps.q}")
    s = exps.s
    if s < 1:
        raise DomainError(f"power-weight bound needs s >= 1, got s={s}")

    kernel_k = k_general(k, s, exps.q, exps.gamma)
    bound = 2 ** (1 / exps.q_prime) * kernel_k.value if exps.q > 1 else 2 * kernel_k.value
    report = VerificationReport("power_bound", "power-weighted boundedness of the operator")
    report.quantities.update({"s": s, "K": kernel_k.value, "K_divergent": kernel_k.divergent, "bound": bound,
                              **exps.describe()})
    if kernel_k.divergent:
        report.add("kernel_constant_finite", math.inf, bound=math.inf, passed=False)
        return report
    empirical, witness = empirical_operator_norm(k, beta, PowerWeight(exps.gamma), PowerWeight(exps.alpha),
                                                 exps, family)
    report.quantities["witness"] = witness
    report.add("operator_bound", empirical, bound=bound, tolerance=tol * max(bound, 1e-300))
    return report


def weight_growth_check(
    u: Weight, v: Weight, exps: ExponentSet, direction: Direction, probe: Sequence[float] = (),
    tol: float = VERDICT_TOL,
) -> VerificationReport:
    """
    Pointwise consequence of a finite two-weight constant:
    increasing: u(t) <= 2^((beta-1)q) A^q [q(1-beta)-1] v(t)^(q/p)
    decreasing: u(t) <= B^q 2^(q(beta-1)) [(1-beta)p'-1]^(q/p') v(t)^(q/p)
    """
    direction = Direction(direction)
    t = np.asarray(probe if len(probe) else log_space(1e-4, 1e4, 81), dtype=float)
    beta, p, q = exps.beta, exps.p, exps.q
    if direction is Direction.INCREASING:
        constant, _ = A_constant(u, v, exps)
        factor = 2 ** ((beta - 1) * q) * constant.value ** q * (q * (1 - beta) - 1)
    else:
        constant, _ = B_constant(u, v, exps)
        factor = constant.value ** q * 2 ** (q * (beta - 1)) * ((1 - beta) * exps.p_prime - 1) ** (q / exps.p_prime)

    report = VerificationReport("weight_growth", f"pointwise weight growth ({direction.value})")
    report.quantities.update({"constant": constant.value, "factor": factor, "probe_points": int(t.size)})
    if constant.divergent:
        report.add("finite_constant", math.inf, bound=math.inf, passed=False)
        return report
    lhs = u.values(t)
    rhs = factor * np.power(v.values(t), q / p)
    worst = int(np.argmax(lhs - rhs))
    report.add("growth", float(lhs[worst]), bound=float(rhs[worst]),
               tolerance=tol * max(float(rhs[worst]), 1e-300), at=float(t[worst]))
    return report
