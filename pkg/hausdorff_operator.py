"""
Fractional Hausdorff Operator

    h_{Phi,beta} f(x) = integral over R of Phi(x/|y|) |y|^(beta-1) f(y) dy

Direct application substitutes y = +-|x| tau on each half-line, which turns
every kernel jump |t| = b into the fixed point tau = 1/b and lets all output
points share one set of quadrature nodes per piece. The multiplicative
representation rewrites the operator as four convolutions on (R+, dx/x)
and serves as an independent oracle on log grids.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.signal import fftconvolve

from grid_core import (
    EMPIRICAL_TOL,
    ConvergenceError,
    DivergenceError,
    DomainError,
    GridFunction,
    Interval,
    LogGrid,
    finite_rule,
    integrate_with_error,
    tail_rule,
    weighted_sum,
)
from kernels import Kernel, kernel_support_breakpoints

logger = logging.getLogger(__name__)


# ============================================================================
# EXPONENTS
# ============================================================================

def conjugate(p: float) -> float:
    """p' with 1/p + 1/p' = 1; infinite for p = 1."""
    if p < 1:
        raise DomainError(f"conjugate exponent needs p >= 1, got {p}")
    return math.inf if p == 1 else p / (p - 1)


@dataclass(frozen=True)
class ExponentSet:
    """
    Exponents (p, q, alpha, gamma, beta) with derived conjugates and the
    Young exponent s, 1/s = 1 + 1/q - 1/p.
    """
    p: float
    q: float
    beta: float = 0.0
    alpha: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0):
            raise DomainError(f"p and q must be positive, got p={self.p}, q={self.q}")
        if not 0 <= self.beta < 1:
            raise DomainError(f"beta must lie in [0, 1), got {self.beta}")
        if self.alpha <= -1 or self.gamma <= -1:
            raise DomainError(f"alpha and gamma must exceed -1, got {self.alpha}, {self.gamma}")

    @property
    def p_prime(self) -> float:
        return conjugate(self.p)

    @property
    def q_prime(self) -> float:
        return conjugate(self.q)

    @property
    def s(self) -> float:
        inverse = 1 + 1 / self.q - 1 / self.p
        if inverse <= 0:
            raise DomainError(f"no Young exponent: 1 + 1/q - 1/p = {inverse} <= 0")
        return 1 / inverse

    @property
    def diagonal_gap(self) -> float:
        """1/p - 1/q - beta; zero on the Lebesgue diagonal."""
        return 1 / self.p - 1 / self.q - self.beta

    @property
    def scaling_gap(self) -> float:
        """(1+alpha)/p - (1+gamma)/q - beta; zero under the Hardy-space scaling."""
        return (1 + self.alpha) / self.p - (1 + self.gamma) / self.q - self.beta

    @property
    def is_lebesgue_diagonal(self) -> bool:
        return abs(self.diagonal_gap) <= 1e-12

    @property
    def is_hardy_scaling(self) -> bool:
        return abs(self.scaling_gap) <= 1e-12

    def require_lebesgue_diagonal(self) -> None:
        if not self.is_lebesgue_diagonal:
            raise DomainError(f"exponents are off the diagonal 1/p - 1/q = beta (gap {self.diagonal_gap:.3g})")

    def require_hardy_scaling(self) -> None:
        if not self.is_hardy_scaling:
            raise DomainError(
                f"exponents violate (1+alpha)/p - (1+gamma)/q = beta (gap {self.scaling_gap:.3g})"
            )

    def replace(self, **changes: float) -> "ExponentSet":
        values = {"p": self.p, "q": self.q, "beta": self.beta, "alpha": self.alpha, "gamma": self.gamma}
        values.update(changes)
        return ExponentSet(**values)

    def describe(self) -> Dict[str, float]:
        return {"p": self.p, "q": self.q, "beta": self.beta, "alpha": self.alpha, "gamma": self.gamma}


# ============================================================================
# CLOSED-FORM FUNCTIONS
# ============================================================================

@dataclass(frozen=True)
class ClosedForm:
    """
    A vectorized function on R with the points |x| = b where it jumps or
    is singular.
    """
    fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    breakpoints: Tuple[float, ...] = ()
    label: str = "f"
    params: Tuple[Tuple[str, Any], ...] = ()

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.asarray(self.fn(x), dtype=float) * np.ones_like(x)

    def describe(self) -> Dict[str, Any]:
        return {"label": self.label, **dict(self.params)}

    def dilate(self, s: float, amplitude: float = 1.0) -> "ClosedForm":
        """x -> amplitude * f(s x)."""
        return ClosedForm(
            lambda x: amplitude * self.fn(s * x),
            tuple(b / s for b in self.breakpoints),
            f"{self.label}(s.)",
            self.params + (("dilation", s),),
        )


FunctionLike = Union[GridFunction, ClosedForm, Callable[[np.ndarray], np.ndarray]]


def function_breakpoints(f: FunctionLike) -> List[float]:
    if isinstance(f, GridFunction):
        return [f.grid.r_min, f.grid.r_max]
    return [b for b in getattr(f, "breakpoints", ()) if b > 0]


def _evaluate(f: FunctionLike, x: np.ndarray) -> np.ndarray:
    values = f(x)
    return np.real(values) if np.iscomplexobj(values) else values


def is_zero_function(f: FunctionLike) -> bool:
    return isinstance(f, GridFunction) and not np.any(f.values)


# ============================================================================
# DIRECT APPLICATION
# ============================================================================

def _tau_breakpoints(k: Kernel, f: FunctionLike, r: np.ndarray) -> np.ndarray:
    """Per-output-point tau breakpoints, sorted along the last axis."""
    columns = [np.full_like(r, 1.0)]
    columns += [np.full_like(r, 1.0 / b) for b in kernel_support_breakpoints(k)]
    columns += [c / r for c in function_breakpoints(f)]
    return np.sort(np.stack(columns, axis=-1), axis=-1)


def _apply_at_level(k: Kernel, beta: float, f: FunctionLike, x: np.ndarray, level: int) -> Tuple[np.ndarray, np.ndarray]:
    r = np.abs(x)
    sign = np.sign(x)[:, None]
    cuts = _tau_breakpoints(k, f, r)
    edges = np.concatenate([np.zeros((r.size, 1)), cuts], axis=1)

    def integrand(tau):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            y = r[:, None] * tau
            return k.values(sign / tau) * np.power(tau, beta - 1) * (_evaluate(f, y) + _evaluate(f, -y))

    total = np.zeros(r.size)
    truncation = np.zeros(r.size)
    for j in range(edges.shape[1] - 1):
        tau, w = finite_rule(edges[:, j], edges[:, j + 1], level)
        part, trunc = weighted_sum(integrand(tau), w)
        total += part
        truncation += trunc
    tau, w = tail_rule(edges[:, -1], level)
    part, trunc = weighted_sum(integrand(tau), w)
    total += part
    truncation += trunc
    scale = np.power(r, beta)
    return scale * total, scale * truncation


@dataclass
class OperatorValues:
    values: np.ndarray
    error: np.ndarray
    divergent: np.ndarray


def apply_at(
    k: Kernel,
    beta: float,
    f: FunctionLike,
    x,
    tol: float = EMPIRICAL_TOL,
    levels: Sequence[int] = (4, 5),
) -> OperatorValues:
    """
    h_{Phi,beta} f at many nonzero points at once.

    All points are integrated with a fixed pair of levels; points whose two
    levels disagree are redone two levels finer and then, if still
    unresolved, with the adaptive scalar quadrature. Points that stay
    unresolved are flagged divergent instead of raising.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x == 0):
        raise DomainError("the operator is evaluated at x != 0 only")
    values = np.zeros_like(x)
    error = np.zeros_like(x)
    divergent = np.zeros(x.shape, dtype=bool)
    if is_zero_function(f) or x.size == 0:
        return OperatorValues(values, error, divergent)

    pending = np.arange(x.size)
    for coarse, fine in (tuple(levels), (levels[0] + 2, levels[1] + 2)):
        if pending.size == 0:
            break
        try:
            v0, _ = _apply_at_level(k, beta, f, x[pending], coarse)
            v1, trunc = _apply_at_level(k, beta, f, x[pending], fine)
        except DivergenceError:
            break
        err = np.abs(v1 - v0) + trunc
        values[pending], error[pending] = v1, err
        floor = tol * max(float(np.max(np.abs(v1), initial=0.0)), 1e-300) * 1e-3
        ok = np.isfinite(v1) & (err <= tol * np.abs(v1) + floor)
        pending = pending[~ok]

    for i in pending:
        try:
            values[i] = apply_hausdorff(k, beta, f, float(x[i]), tol)
            error[i] = tol * abs(values[i])
        except (ConvergenceError, DivergenceError) as exc:
            logger.warning("operator diverges at x=%g: %s", x[i], exc)
            values[i] = getattr(exc, "estimate", 0.0) if math.isfinite(getattr(exc, "estimate", 0.0)) else 0.0
            divergent[i] = True
    return OperatorValues(values, error, divergent)


def apply_hausdorff(k: Kernel, beta: float, f: FunctionLike, x: float, tol: float = EMPIRICAL_TOL) -> float:
    """
    h_{Phi,beta} f(x) by adaptive quadrature, split at tau = 0, at the kernel
    breakpoints and at the breakpoints of f.

    Raises:
        DomainError: x = 0
        DivergenceError: the defining integral diverges
    """
    if x == 0:
        raise DomainError("the operator is evaluated at x != 0 only")
    if is_zero_function(f):
        return 0.0
    r, sign = abs(x), math.copysign(1.0, x)
    cuts = _tau_breakpoints(k, f, np.asarray([r]))[0].tolist()

    def integrand(tau):
        y = r * tau
        return k.values(sign / tau) * np.power(tau, beta - 1) * (_evaluate(f, y) + _evaluate(f, -y))

    try:
        result = integrate_with_error(integrand, Interval(0.0, math.inf), tol, cuts)
    except ConvergenceError as exc:
        raise DivergenceError(f"operator integral at x={x} does not converge", exc.estimate) from exc
    return r ** beta * result.value


@dataclass
class AppliedFunction(GridFunction):
    """Operator output on a grid, with nodes where the integral diverged."""
    divergent: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def divergent_nodes(self) -> np.ndarray:
        if self.divergent is None:
            return np.zeros(0)
        return self.nodes[self.divergent]


def apply_on_grid(
    k: Kernel,
    beta: float,
    f: FunctionLike,
    out_grid: LogGrid,
    tol: float = EMPIRICAL_TOL,
) -> AppliedFunction:
    """h_{Phi,beta} f at every node of out_grid; divergent nodes are recorded, not fatal."""
    result = apply_at(k, beta, f, out_grid.nodes, tol)
    if np.any(result.divergent):
        logger.warning("%d of %d nodes diverged", int(result.divergent.sum()), out_grid.size)
    return AppliedFunction(out_grid, result.values, result.divergent)


def image_breakpoints(k: Kernel, f: FunctionLike) -> List[float]:
    """|x| where h_{Phi,beta} f may have kinks: kernel breakpoint times f breakpoint."""
    kernel_points = [1.0] + kernel_support_breakpoints(k)
    return sorted({b * c for b in kernel_points for c in function_breakpoints(f)})


def hausdorff_image(k: Kernel, beta: float, f: FunctionLike, tol: float = EMPIRICAL_TOL) -> ClosedForm:
    """h_{Phi,beta} f as a lazily evaluated closed form."""

    def fn(x):
        x = np.asarray(x, dtype=float)
        flat = x.ravel()
        out = np.zeros_like(flat)
        nonzero = flat != 0
        if np.any(nonzero):
            result = apply_at(k, beta, f, flat[nonzero], tol)
            if np.any(result.divergent):
                raise DivergenceError("operator image diverges on part of the quadrature nodes")
            out[nonzero] = result.values
        return out.reshape(x.shape)

    return ClosedForm(fn, tuple(image_breakpoints(k, f)), "h f")


# ============================================================================
# MULTIPLICATIVE CONVOLUTION
# ============================================================================

def mult_convolve(f: GridFunction, g: GridFunction) -> GridFunction:
    """
    (f * g)(x) = integral over R+ of f(y) g(x/y) dy/y, using the positive
    halves of both inputs.

    In u = ln x this is an ordinary convolution with step du, computed by
    FFT. The output grid has the same step and spans the sum of both
    supports; its negative half is zero.
    """
    if not f.grid.compatible_with(g.grid):
        raise DomainError("multiplicative convolution needs log grids with a common step")
    step = f.grid.log_step
    a, b = f.positive_values, g.positive_values
    conv = fftconvolve(a, b) * step
    if not np.iscomplexobj(a) and not np.iscomplexobj(b):
        conv = np.real(conv)
    n = conv.size
    r_min = f.grid.r_min * g.grid.r_min
    grid = LogGrid(r_min, r_min * math.exp(step * (n - 1)), n)
    return GridFunction(grid, np.concatenate([np.zeros(n, dtype=conv.dtype), conv]))


def haar_bump(grid: LogGrid, center: float = 1.0, width: float = None) -> GridFunction:
    """Narrow Gaussian in ln x with Haar mass 1 on the positive half of grid."""
    width = width if width is not None else 2.0 * grid.log_step
    u = grid.log_nodes - math.log(center)
    bump = np.exp(-0.5 * (u / width) ** 2)
    bump /= bump.sum() * grid.log_step
    return GridFunction(grid, np.concatenate([np.zeros(grid.n_per_side), bump]))


# Decades of constant extension of f below r_min in the Haar convolutions.
MELLIN_PAD_DECADES = 12


def hausdorff_as_mellin(k: Kernel, beta: float, f: GridFunction, exps: ExponentSet) -> GridFunction:
    """
    h_{Phi,beta} f on f's grid from four Haar convolutions.

    With a = (1+alpha)/p and c = (1+gamma)/q, a - c = beta:
        x^c h f(j x) = sum over i = +-1 of (F_i * G_j)(x),
        F_i(y) = f(i y) y^a,  G_j(t) = Phi(j t) t^c.
    Below r_min, f is held at its innermost samples for
    MELLIN_PAD_DECADES decades, so mass near the origin is kept. Kernel
    jumps at t = 1 are sampled at the mean of the one-sided limits, and the
    trapezoid error at the jump is removed to order h^2 with the
    Euler-Maclaurin endpoint term.
    """
    if abs(exps.beta - beta) > 1e-12:
        raise DomainError(f"exponent set beta={exps.beta} does not match operator beta={beta}")
    exps.require_hardy_scaling()
    a = (1 + exps.alpha) / exps.p
    c = (1 + exps.gamma) / exps.q

    grid = f.grid
    step = grid.log_step
    n = grid.n_per_side
    pad = int(math.ceil(MELLIN_PAD_DECADES * math.log(10) / step))
    total_n = n + pad
    r_ext = grid.r_min * math.exp(-pad * step)
    ext_grid = LogGrid(r_ext, r_ext * math.exp(step * (total_n - 1)), total_n)
    y = np.exp(math.log(r_ext) + step * np.arange(total_n))

    width = total_n - 1
    kernel_u = step * np.arange(-width, width + 1)
    t = np.exp(kernel_u)
    kernel_grid = LogGrid(float(t[0]), float(t[-1]), t.size)

    halves = []
    for f_half in (f.positive_values, f.negative_values):
        samples = np.real(np.concatenate([np.full(pad, f_half[0]), f_half]))
        halves.append(samples * np.power(y, a))

    result = np.zeros(grid.size)
    for j, sign in ((1, 1.0), (0, -1.0)):
        g_values = _jump_averaged(k, sign, t, kernel_u, step) * np.power(t, c)
        g_fn = GridFunction(kernel_grid, np.concatenate([np.zeros(t.size), g_values]))
        jump, slope_jump = _jump_at_one(k, sign, c)
        total = np.zeros(n)
        for big_f in halves:
            f_fn = GridFunction(ext_grid, np.concatenate([np.zeros(total_n), big_f]))
            conv = mult_convolve(f_fn, g_fn).positive_values[width + pad: width + pad + n]
            f_now = big_f[pad:]
            df = np.gradient(big_f, step)[pad:]
            total += conv - step ** 2 / 12 * (df * jump - f_now * slope_jump)
        side = total * np.power(grid.positive_nodes, -c)
        if j == 1:
            result[n:] = side
        else:
            result[:n] = side[::-1]
    return GridFunction(grid, result)


def _jump_at_one(k: Kernel, sign: float, c: float, delta: float = 1e-4) -> Tuple[float, float]:
    """
    Jumps of G(v) = Phi(sign e^v) e^(c v) and of dG/dv across v = 0,
    from one-sided three-point differences.
    """
    offsets = 1e-9 + delta * np.arange(3)

    def side(direction: float) -> Tuple[float, float]:
        v = direction * offsets
        g = k.values(sign * np.exp(v)) * np.exp(c * v)
        slope = (-3 * g[0] + 4 * g[1] - g[2]) / (2 * delta) * direction
        return float(g[0]), float(slope)

    right, right_slope = side(1.0)
    left, left_slope = side(-1.0)
    return right - left, right_slope - left_slope


def _jump_averaged(k: Kernel, sign: float, t: np.ndarray, u: np.ndarray, step: float) -> np.ndarray:
    values = k.values(sign * t)
    for b in k.breakpoints() + [1.0]:
        idx = np.flatnonzero(np.abs(u - math.log(b)) < 1e-9 * max(step, 1.0))
        for i in idx:
            left = k.values(np.asarray([sign * t[i] * math.exp(-1e-9)]))[0]
            right = k.values(np.asarray([sign * t[i] * math.exp(1e-9)]))[0]
            values[i] = 0.5 * (left + right)
    return values
