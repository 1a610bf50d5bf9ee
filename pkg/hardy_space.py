"""
Weighted Hardy Spaces

Radial maximal function M f(x) = sup_s |phi_s * f(x)| over a geometric
dilation grid, power-weighted Hardy quasi-norms ||M f||_{L^p_w} for
0 < p <= 1, the Hilbert-transform characterization ||f||_{L^p_w} +
||H f||_{L^p_w}, dilation invariance and the scaling experiment showing the
exponent relation (1+alpha)/p - (1+gamma)/q = beta is necessary.

Convolutions phi_s * f are evaluated at the log-grid points either in
physical space (trapezoid rule on a step that resolves both f and phi_s) or,
for scales too small for that, from the band-limited spectrum of f.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.special import eval_hermite

from experiment_config import worker_count
from grid_core import DomainError, GridFunction, LogGrid, make_log_grid
from hausdorff_operator import ClosedForm, FunctionLike, hausdorff_image
from kernels import Kernel
from norms import NormValue, weak_lp_norm, weighted_lp_norm
from fourier import UniformGrid, fourier_transform, hilbert_transform
from reports import VerificationReport
from weights import PowerWeight, Weight

logger = logging.getLogger(__name__)

# Physical-space sums longer than this switch to the spectral path.
MAX_PHYSICAL_NODES = 4096
# M f below this fraction of its peak is rounding noise and is set to zero.
NOISE_FLOOR = 1e-13


# ============================================================================
# TEST FUNCTIONS
# ============================================================================

def gaussian(width: float = 1.0) -> ClosedForm:
    """exp(-pi (x/w)^2)."""
    return ClosedForm(lambda x: np.exp(-math.pi * np.square(x / width)), (), "gaussian", (("width", width),))


def gaussian_derivative(order: int, width: float = 1.0) -> ClosedForm:
    """
    d^k/dx^k exp(-pi (x/w)^2). Moments 0..k-1 vanish, so M f decays like
    |x|^(-k-1) and the Hardy quasi-norms are finite for p > (1+a)/(k+1).
    """
    scale = math.sqrt(math.pi) / width

    def fn(x):
        u = scale * x
        return (-scale) ** order * eval_hermite(order, u) * np.exp(-np.square(u))

    return ClosedForm(fn, (), f"gaussian_d{order}", (("order", order), ("width", width)))


def hermite_family(orders: Sequence[int] = (1, 2, 3, 4),
                   widths: Sequence[float] = (0.5, 0.75, 1.0, 1.5, 2.0)) -> List[ClosedForm]:
    """Mean-zero smooth family: Gaussian derivatives over a grid of widths."""
    return [gaussian_derivative(k, w) for k in orders for w in widths]


def required_order(p: float, a: float, margin: float = 2.0) -> int:
    """Smallest k >= 1 with (k+1) p >= 1 + a + margin, so |M f|^p |x|^a decays like |x|^(-1-margin)."""
    return max(1, math.ceil((1 + a + margin) / p - 1 - 1e-12))


# ============================================================================
# RADIAL MAXIMAL FUNCTION
# ============================================================================

def _unit_gaussian(x):
    return np.exp(-math.pi * np.square(x))


@dataclass(frozen=True)
class MaximalConfig:
    """
    Smooth profile phi with integral phi^(0) != 0 and the dilation grid
    s_min * density^k up to s_max.

    Args:
        phi: Profile in physical space
        phi_hat: Its Fourier transform
        density: Ratio of consecutive scales
        grid: Uniform grid used to sample f (decay and band limit)
        points: Log grid on which M f is returned
    """
    phi: Callable[[np.ndarray], np.ndarray] = _unit_gaussian
    phi_hat: Callable[[np.ndarray], np.ndarray] = _unit_gaussian
    density: float = 2 ** 0.125
    s_min: float = 2.0 ** -20
    s_max: float = 2.0 ** 20
    grid: UniformGrid = field(default_factory=lambda: UniformGrid(64.0, 2 ** 14))
    points: LogGrid = field(default_factory=lambda: make_log_grid(2.0 ** -16, 2.0 ** 16, 257))

    def __post_init__(self):
        if float(np.abs(self.phi_hat(np.zeros(1)))[0]) == 0:
            raise DomainError("phi must have nonzero integral")
        if not self.density > 1:
            raise DomainError(f"dilation density must exceed 1, got {self.density}")
        if not 0 < self.s_min < self.s_max:
            raise DomainError(f"need 0 < s_min < s_max, got {self.s_min}, {self.s_max}")

    @property
    def s_grid(self) -> np.ndarray:
        count = int(math.floor(math.log(self.s_max / self.s_min) / math.log(self.density) + 1e-9)) + 1
        return self.s_min * np.power(self.density, np.arange(count))

    def refined(self) -> "MaximalConfig":
        """Same bounds, twice the scale density."""
        return MaximalConfig(self.phi, self.phi_hat, math.sqrt(self.density), self.s_min, self.s_max,
                             self.grid, self.points)


def _threshold_extent(abscissae: np.ndarray, magnitude: np.ndarray, rel: float) -> float:
    peak = float(np.max(magnitude, initial=0.0))
    alive = np.nonzero(magnitude > rel * peak)[0]
    return float(np.max(np.abs(abscissae[alive]))) if alive.size else 0.0


@dataclass
class _Sampled:
    """f with its effective support half-width and band limit."""
    f: Callable[[np.ndarray], np.ndarray]
    width: float
    band: float
    frequencies: np.ndarray
    spectrum: np.ndarray


def _sample(f: FunctionLike, grid: UniformGrid) -> Optional[_Sampled]:
    values = np.real(np.asarray(f(grid.nodes), dtype=complex))
    if not np.any(values):
        return None
    spectrum = fourier_transform(grid, values)
    nu = grid.frequencies
    band = _threshold_extent(nu, np.abs(spectrum), 1e-14)
    if band >= 0.9 * float(np.max(np.abs(nu))):
        logger.warning("f is barely resolved by the uniform grid (band %.3g near Nyquist)", band)
    width = _threshold_extent(grid.nodes, np.abs(values), 1e-16) + 4 * grid.step
    keep = np.abs(nu) <= 1.2 * band
    return _Sampled(f, width, band, nu[keep], spectrum[keep])


def _phi_band(cfg: MaximalConfig) -> float:
    eta = np.exp(np.linspace(math.log(1e-3), math.log(1e3), 1201))
    return _threshold_extent(eta, np.abs(cfg.phi_hat(eta)) + np.abs(cfg.phi_hat(-eta)), 1e-16) or 1.0


def _convolve_at(sampled: _Sampled, cfg: MaximalConfig, s: float, x: np.ndarray, phi_band: float) -> np.ndarray:
    """|phi_s * f| at the points x."""
    h = 1.0 / (1.25 * (sampled.band + phi_band / s))
    count = int(math.ceil(sampled.width / h))
    if 2 * count + 1 <= MAX_PHYSICAL_NODES:
        y = h * np.arange(-count, count + 1)
        fy = np.real(np.asarray(sampled.f(y), dtype=complex))
        kernel = cfg.phi((x[:, None] - y[None, :]) / s) / s
        return np.abs(h * (kernel @ fy))
    out = np.zeros_like(x)
    inside = np.abs(x) < cfg.grid.half_width
    xi = sampled.frequencies
    weights = sampled.spectrum * cfg.phi_hat(s * xi) * cfg.grid.frequency_step
    out[inside] = np.abs(np.exp(2j * math.pi * np.outer(x[inside], xi)) @ weights)
    return out


def radial_maximal(f: FunctionLike, cfg: MaximalConfig = MaximalConfig()) -> GridFunction:
    """
    M f = max over the scale grid of |phi_s * f| at the nodes of ``cfg.points``.

    Raises:
        DomainError: f has not decayed at the edges of ``cfg.grid``
    """
    x = cfg.points.nodes
    sampled = _sample(f, cfg.grid)
    if sampled is None:
        return GridFunction.zeros(cfg.points)
    phi_band = _phi_band(cfg)
    scales = cfg.s_grid

    def at_scale(s: float) -> np.ndarray:
        return _convolve_at(sampled, cfg, float(s), x, phi_band)

    workers = min(worker_count(), len(scales))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            layers = list(pool.map(at_scale, scales))
    else:
        layers = [at_scale(s) for s in scales]
    best = np.zeros_like(x)
    for layer in layers:
        np.maximum(best, layer, out=best)
    best[best < NOISE_FLOOR * float(np.max(best, initial=0.0))] = 0.0
    logger.debug("maximal function over %d scales, band %.3g, support %.3g", len(scales), sampled.band, sampled.width)
    return GridFunction(cfg.points, best)


# ============================================================================
# QUASI-NORMS
# ============================================================================

def _require_hardy_p(p: float) -> None:
    if not 0 < p <= 1:
        raise DomainError(f"Hardy quasi-norms need 0 < p <= 1, got {p}")


def hardy_quasi_norm(f: FunctionLike, a: float, p: float, cfg: MaximalConfig = MaximalConfig()) -> NormValue:
    """||M f||_{L^p_{|x|^a}} over the range of ``cfg.points``."""
    _require_hardy_p(p)
    return weighted_lp_norm(radial_maximal(f, cfg), PowerWeight(a), p)


def weak_hardy_quasi_norm(f: FunctionLike, a: float, p: float, cfg: MaximalConfig = MaximalConfig()) -> NormValue:
    """Weak-type quasi-norm sup_lam lam |{M f > lam}|_w^(1/p)."""
    _require_hardy_p(p)
    return weak_lp_norm(radial_maximal(f, cfg), PowerWeight(a), p)


def _uniform_norm(values: np.ndarray, x: np.ndarray, w: Weight, p: float, step: float) -> float:
    keep = x != 0
    total = np.sum(np.power(np.abs(values[keep]), p) * w.values(x[keep])) * step
    return float(total) ** (1 / p)


def hilbert_hardy_quasi_norm(f: FunctionLike, w: Weight, p: float,
                             grid: UniformGrid = UniformGrid(64.0, 2 ** 14)) -> NormValue:
    """
    ||f||_{L^p_w} + ||H f||_{L^p_w} on the uniform grid.

    H f decays like (integral f) / (pi x), so a nonzero mean makes the
    second summand infinite for power weights |x|^a with p <= 1 + a; that
    case is flagged divergent.
    """
    if p <= 0:
        raise DomainError(f"quasi-norm exponent must be positive, got {p}")
    x = grid.nodes
    values = np.real(np.asarray(f(x), dtype=complex))
    if not np.any(values):
        return NormValue(0.0)
    hf = hilbert_transform(grid, values)
    direct = _uniform_norm(values, x, w, p, grid.step)
    conjugate_part = _uniform_norm(hf, x, w, p, grid.step)
    mean = float(np.sum(values) * grid.step)
    mass = float(np.sum(np.abs(values)) * grid.step)
    divergent = False
    if abs(mean) > 1e-8 * mass:
        a = w.a if isinstance(w, PowerWeight) else 0.0
        divergent = p <= 1 + a
    if divergent:
        logger.warning("H f is not in L^p_w: f has nonzero mean %.3g", mean)
    return NormValue(direct + conjugate_part, divergent, 0.0, {"lp": direct, "hilbert": conjugate_part})


# ============================================================================
# CHECKS
# ============================================================================

def dilation_invariance_check(
    f: FunctionLike, s: float, p: float, a: float,
    cfg: MaximalConfig = MaximalConfig(), tol: float = 1e-3,
) -> VerificationReport:
    """
    ||s^((1+a)/p) f(s.)||_{H^p} / ||f||_{H^p}, which is exactly 1.

    Raises:
        DomainError: s leaves [10 s_min, s_max/10]
    """
    if not 10 * cfg.s_min <= s <= cfg.s_max / 10:
        raise DomainError(f"dilation {s} outside [{10 * cfg.s_min:g}, {cfg.s_max / 10:g}]")
    factor = s ** ((1 + a) / p)
    dilated = ClosedForm(lambda x: factor * np.real(np.asarray(f(s * x), dtype=complex)), (),
                         "dilated", (("s", s),))
    base = hardy_quasi_norm(f, a, p, cfg).value
    scaled = hardy_quasi_norm(dilated, a, p, cfg).value
    ratio = 1.0 if base == 0 and scaled == 0 else scaled / base
    report = VerificationReport("dilation", "dilation invariance of the weighted Hardy quasi-norm")
    report.quantities.update({"s": s, "p": p, "a": a, "norm": base, "dilated_norm": scaled, "ratio": ratio})
    report.add("dilation_ratio", abs(ratio - 1), bound=tol)
    return report


def exponent_relation_probe(
    k: Kernel, beta: float, p: float, q: float, a: float, g: float,
    f: FunctionLike, s_list: Sequence[float], tol: float = 1e-7,
) -> VerificationReport:
    """
    Fit ln ||h(f(s.))||_{L^q_{|x|^g}} + (1+a)/p ln s against ln s.

    Since h(f(s.)) = s^(-beta) (h f)(s.), the slope is
    (1+a)/p - (1+g)/q - beta: the fitted slope vanishes exactly when the
    exponent relation holds. The fitted slope is reported as the signed
    residual and the check fails when it exceeds 1e-3 in magnitude.

    Raises:
        DomainError: fewer than three distinct scales, or a zero norm
    """
    scales = sorted({float(s) for s in s_list})
    if len(scales) < 3:
        raise DomainError(f"scaling fit needs at least 3 distinct scales, got {len(scales)}")
    weight = PowerWeight(g)
    logs, targets = [], []
    for s in scales:
        dilated = ClosedForm(lambda x, s=s: np.real(np.asarray(f(s * x), dtype=complex)),
                             tuple(b / s for b in getattr(f, "breakpoints", ())), "dilated", (("s", s),))
        norm = weighted_lp_norm(hausdorff_image(k, beta, dilated, tol), weight, q, 10 * tol)
        if norm.value == 0 or not math.isfinite(norm.value) or norm.divergent:
            raise DomainError(f"degenerate image norm {norm.value} at scale {s}")
        logs.append(math.log(s))
        targets.append(math.log(norm.value) + (1 + a) / p * math.log(s))
    slope, _ = np.polyfit(logs, targets, 1)
    residual = float(slope)
    expected = (1 + a) / p - (1 + g) / q - beta
    report = VerificationReport("scaling", "necessity of (1+alpha)/p - (1+gamma)/q = beta")
    report.quantities.update({"slope": residual, "residual": residual, "scaling_gap": expected, "scales": scales,
                              "beta": beta, "p": p, "q": q, "a": a, "g": g})
    report.add("residual", abs(residual), bound=1e-3, signed=residual, expected=expected)
    return report


def equivalence_band(
    family: Sequence[FunctionLike], a: float, p: float,
    cfg: MaximalConfig = MaximalConfig(), max_spread: float = 20.0,
) -> VerificationReport:
    """
    Observed band [r_min, r_max] of Hilbert-Hardy / maximal Hardy quasi-norm
    ratios over the family. The band is an observation, not a universal constant.
    """
    _require_hardy_p(p)
    weight = PowerWeight(a)
    ratios: List[float] = []
    skipped = 0
    for f in family:
        maximal = hardy_quasi_norm(f, a, p, cfg)
        hilbert = hilbert_hardy_quasi_norm(f, weight, p, cfg.grid)
        if maximal.value == 0 or hilbert.divergent or maximal.divergent:
            skipped += 1
            continue
        ratios.append(hilbert.value / maximal.value)
    if not ratios:
        raise DomainError("equivalence band needs a member with finite nonzero quasi-norms")
    r_min, r_max = min(ratios), max(ratios)
    report = VerificationReport("equivalence_band", "Hilbert and maximal characterizations of weighted H^p")
    report.quantities.update({"r_min": r_min, "r_max": r_max, "ratios": ratios, "skipped": skipped,
                              "a": a, "p": p})
    report.add("band_spread", r_max / r_min, bound=max_spread)
    return report
