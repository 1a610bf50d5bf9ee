"""
Fourier-Side Tools

FFT approximations of the continuous Fourier transform (convention
f^(xi) = integral f(x) exp(-2 pi i x xi) dx), the Hilbert transform as the
multiplier -i sgn(xi), the commutation H h_{Phi,beta} f = h_{H Phi,beta} f,
the integrability hypotheses on Phi^ and on its radial profile g, the
Fourier-side decay estimate of the operator kernel and a weighted probe of
the Hilbert transform on power weights.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from scipy import fft as sp_fft
from scipy.special import binom, poch

from grid_core import (
    ConvergenceError,
    DomainError,
    Interval,
    UnsupportedError,
    integrate_with_error,
    ladder_integral,
    log_space,
)
from hausdorff_operator import ClosedForm, ExponentSet, FunctionLike, apply_at, hausdorff_image
from kernels import GaussianHat, Kernel, kernel_support_breakpoints
from norms import k_general
from reports import VerificationReport
from weights import PowerWeight, is_ap_power

logger = logging.getLogger(__name__)

EDGE_DECAY = 1e-12


# ============================================================================
# UNIFORM GRIDS AND TRANSFORMS
# ============================================================================

@dataclass(frozen=True)
class UniformGrid:
    """Nodes x_j = -L + 2 L j / n, j = 0..n-1, with n a power of two."""
    half_width: float
    n: int

    def __post_init__(self):
        if not (self.half_width > 0 and math.isfinite(self.half_width)):
            raise DomainError(f"half width must be positive and finite, got {self.half_width}")
        if self.n < 8 or self.n & (self.n - 1):
            raise DomainError(f"sample count must be a power of two >= 8, got {self.n}")

    @property
    def step(self) -> float:
        return 2 * self.half_width / self.n

    @property
    def nodes(self) -> np.ndarray:
        return -self.half_width + self.step * np.arange(self.n)

    @property
    def frequencies(self) -> np.ndarray:
        """Dual grid, ascending; the first bin is the unpaired Nyquist frequency."""
        return sp_fft.fftshift(sp_fft.fftfreq(self.n, self.step))

    @property
    def frequency_step(self) -> float:
        return 1 / (2 * self.half_width)

    def refined(self) -> "UniformGrid":
        """Half the step over twice the window."""
        return UniformGrid(2 * self.half_width, 4 * self.n)

    def sample(self, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        return np.asarray(f(self.nodes))


def _require_decay(values: np.ndarray, grid: UniformGrid) -> None:
    peak = float(np.max(np.abs(values), initial=0.0))
    edge = max(abs(values[0]), abs(values[-1]))
    if edge > EDGE_DECAY * max(peak, 1e-300):
        raise DomainError(
            f"samples do not decay at the grid edges (|f| = {edge:.3g} at |x| = {grid.half_width:g}); "
            "use a larger half_width"
        )


def fourier_transform(grid: UniformGrid, values, check_decay: bool = True) -> np.ndarray:
    """
    Samples of f^ on ``grid.frequencies``.

    Raises:
        DomainError: the samples have not decayed at the grid edges
    """
    values = np.asarray(values)
    if values.shape != (grid.n,):
        raise DomainError(f"expected {grid.n} samples, got shape {values.shape}")
    if check_decay:
        _require_decay(values, grid)
    xi = sp_fft.fftfreq(grid.n, grid.step)
    spectrum = grid.step * sp_fft.fft(values) * np.exp(2j * math.pi * grid.half_width * xi)
    return sp_fft.fftshift(spectrum)


def inverse_fourier_transform(grid: UniformGrid, spectrum) -> np.ndarray:
    """Samples on ``grid.nodes`` of the function whose transform is ``spectrum``."""
    spectrum = sp_fft.ifftshift(np.asarray(spectrum, dtype=complex))
    xi = sp_fft.fftfreq(grid.n, grid.step)
    return sp_fft.ifft(spectrum * np.exp(-2j * math.pi * grid.half_width * xi)) / grid.step


def hilbert_multiplier(grid: UniformGrid) -> np.ndarray:
    """-i sgn(xi) with sgn(0) = 0; the unpaired Nyquist bin is dropped as well."""
    multiplier = -1j * np.sign(grid.frequencies)
    multiplier[0] = 0.0
    return multiplier


def hilbert_transform(grid: UniformGrid, values, check_decay: bool = True) -> np.ndarray:
    """H f through its Fourier multiplier; real input gives real output."""
    values = np.asarray(values)
    result = inverse_fourier_transform(grid, hilbert_multiplier(grid) * fourier_transform(grid, values, check_decay))
    return np.real(result) if not np.iscomplexobj(values) else result


def spectral_multiply(grid: UniformGrid, values, multiplier: np.ndarray, check_decay: bool = True) -> np.ndarray:
    """Inverse transform of multiplier * f^; convolution with the kernel whose transform is ``multiplier``."""
    values = np.asarray(values)
    result = inverse_fourier_transform(grid, multiplier * fourier_transform(grid, values, check_decay))
    return np.real(result) if not np.iscomplexobj(values) else result


def hilbert_identity_report(grid: UniformGrid, values, tol: float = 1e-6) -> VerificationReport:
    """Involution H H f = -f, isometry in L^2 and the multiplier identity bin by bin."""
    values = np.asarray(values)
    h = hilbert_transform(grid, values)
    hh = hilbert_transform(grid, h, check_decay=False)
    norm_f = float(np.linalg.norm(values))
    report = VerificationReport("hilbert_identities", "Hilbert transform as the multiplier -i sgn")
    if norm_f == 0:
        report.add("involution", 0.0, bound=0.0)
        return report
    report.add("involution", float(np.linalg.norm(hh + values)) / norm_f, bound=tol)
    report.add("isometry", abs(float(np.linalg.norm(h)) - norm_f) / norm_f, bound=tol)
    lhs = fourier_transform(grid, h, check_decay=False)
    rhs = hilbert_multiplier(grid) * fourier_transform(grid, values)
    scale = float(np.max(np.abs(rhs), initial=0.0)) or 1.0
    report.add("multiplier", float(np.max(np.abs(lhs - rhs))) / scale, bound=1e-10)
    report.add("parseval",
               abs(float(np.linalg.norm(fourier_transform(grid, values))) * math.sqrt(grid.frequency_step)
                   - norm_f * math.sqrt(grid.step)) / (norm_f * math.sqrt(grid.step)),
               bound=1e-8)
    return report


# ============================================================================
# HILBERT TRANSFORM OF A KERNEL
# ============================================================================

class TabulatedKernel(Kernel):
    """
    Kernel given by samples on a uniform grid, continued beyond ``cutoff`` by
    its far-field expansion (m0/t + m1/t^2)/pi.

    ``jumps`` holds (b, J) pairs whose logarithmic terms
    -(J/pi) ln|(t + b)/(t - b)| are added to the interpolated samples.
    """

    name = "tabulated"
    even = False
    integrable = False

    def __init__(self, nodes: np.ndarray, samples: np.ndarray, m0: float, m1: float, cutoff: float,
                 singular: Sequence[float] = (), jumps: Sequence[Tuple[float, float]] = ()):
        self.nodes, self.samples = nodes, np.real(samples)
        self.m0, self.m1, self.cutoff = float(m0), float(m1), float(cutoff)
        self.singular = [float(b) for b in singular if 0 < b < cutoff]
        self.jumps = [(float(b), float(size)) for b, size in jumps]

    def values(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) <= self.cutoff
        near = np.interp(t, self.nodes, self.samples)
        with np.errstate(divide="ignore", invalid="ignore"):
            far = (self.m0 / t + self.m1 / np.square(t)) / math.pi
            for b, size in self.jumps:
                near = near - size / math.pi * np.log(np.abs((t + b) / (t - b)))
        return np.where(inside, near, far)

    def breakpoints(self):
        return self.singular + [self.cutoff]

    def describe(self):
        return {"kernel": self.name, "cutoff": self.cutoff}


def _even_jumps(k: Kernel, rel: float = 1e-9) -> List[Tuple[float, float]]:
    """(b, Phi(b+) - Phi(b-)) at each positive breakpoint where an even Phi jumps."""
    if not k.even:
        return []
    jumps = []
    for b in kernel_support_breakpoints(k):
        side = k.values(np.array([b * (1 + rel), b * (1 - rel)]))
        size = float(side[0] - side[1])
        if abs(size) > 1e-6 * max(float(np.max(np.abs(side))), 1e-300):
            jumps.append((b, size))
    return jumps


def hilbert_of_kernel(k: Kernel, grid: UniformGrid) -> TabulatedKernel:
    """
    H Phi from the multiplier applied to the sampled kernel.

    Jumps of an even Phi at +-b are removed first by adding J 1{|t| <= b},
    whose transform (J/pi) ln|(t + b)/(t - b)| is subtracted back in closed
    form; only the continuous remainder goes through the FFT.
    """
    x = grid.nodes
    samples = np.asarray(k.values(np.where(x == 0, grid.step, x)), dtype=float)
    center = grid.n // 2
    samples[center] = 0.5 * (samples[center - 1] + samples[center + 1])
    jumps = _even_jumps(k)
    smooth = samples.copy()
    for b, size in jumps:
        smooth = smooth + size * (np.abs(x) <= b)
        on_edge = np.flatnonzero(np.isclose(np.abs(x), b, rtol=0.0, atol=1e-12 * b))
        for i in on_edge:
            smooth[i] = 0.5 * (smooth[i - 1] + smooth[i + 1])
    m0 = float(np.sum(smooth) * grid.step) - sum(2 * b * size for b, size in jumps)
    m1 = float(np.sum(x * smooth) * grid.step)
    h = hilbert_transform(grid, smooth)
    radius = k.support_radius()
    cutoff = max(math.sqrt(grid.half_width), 4 * (radius if math.isfinite(radius) else 4.0))
    return TabulatedKernel(x, h, m0, m1, cutoff, kernel_support_breakpoints(k), jumps)


def _principal_value_hilbert(g: ClosedForm, x: float, tol: float) -> float:
    """(1/pi) integral_0^inf (g(x - t) - g(x + t)) / t dt."""
    centers = [0.0] + [c for b in g.breakpoints for c in (b, -b)]
    cuts = sorted({abs(x - c) for c in centers} | {abs(x + c) for c in centers})

    def integrand(t):
        return (g(x - t) - g(x + t)) / t

    try:
        value = integrate_with_error(integrand, Interval(0.0, math.inf), tol, [c for c in cuts if c > 0]).value
    except ConvergenceError as exc:
        logger.warning("principal value at x=%g kept partial estimate (%s)", x, exc)
        value = exc.estimate
    return value / math.pi


DEFAULT_COMMUTATION_GRID = UniformGrid(1024.0, 2 ** 19)


def commutation_check(
    k: Kernel,
    beta: float,
    f: FunctionLike,
    grid: UniformGrid = DEFAULT_COMMUTATION_GRID,
    window: Tuple[float, float] = (0.25, 4.0),
    n_window: int = 16,
    tol: float = 1e-3,
    quad_tol: float = 1e-7,
    check_refinement: bool = False,
) -> VerificationReport:
    """
    Relative L^2 discrepancy between H(h_{Phi,beta} f) and h_{H Phi,beta} f on
    a window of points on both sides of the origin.

    H Phi comes from the multiplier transform of the sampled kernel; H applied
    to the operator image is evaluated as a principal-value integral.

    Raises:
        DomainError: Phi is not integrable (Phi and Phi^ must be in L^1)
    """
    if not k.integrable:
        raise DomainError(f"kernel '{k.name}' is not in L^1; the commutation needs Phi, Phi^ in L^1")
    report = VerificationReport("commutation", "H h_{Phi,beta} f = h_{H Phi,beta} f")
    report.quantities.update({"beta": beta, "grid_n": grid.n, "half_width": grid.half_width, **k.describe()})

    xs = log_space(window[0], window[1], n_window)
    xs = np.concatenate([-xs[::-1], xs])
    probe = f(xs)
    if not np.any(probe) and not np.any(f(np.linspace(-8, 8, 257))):
        report.add("commutation", 0.0, bound=tol)
        return report

    image = hausdorff_image(k, beta, f, quad_tol)
    left = np.array([_principal_value_hilbert(image, float(x), 10 * quad_tol) for x in xs])

    def discrepancy(g: UniformGrid) -> float:
        right = apply_at(hilbert_of_kernel(k, g), beta, f, xs, quad_tol).values
        scale = float(np.linalg.norm(right)) or 1.0
        return float(np.linalg.norm(left - right)) / scale

    coarse = discrepancy(grid)
    report.quantities["discrepancy"] = coarse
    report.add("commutation", coarse, bound=tol)
    if check_refinement:
        fine = discrepancy(grid.refined())
        report.quantities["discrepancy_refined"] = fine
        # Below the quadrature floor the discrepancy no longer tracks the grid.
        at_floor = coarse <= 100 * quad_tol
        report.add("refinement_halves", fine, bound=coarse / 2, passed=at_floor or fine <= coarse / 2,
                   at_floor=at_floor)
    return report


# ============================================================================
# HYPOTHESIS INTEGRALS
# ============================================================================

class SmoothProfile:
    """A smooth function of one variable with derivatives of any order."""

    def __init__(self, derivative: Callable[[np.ndarray, int], np.ndarray], label: str = "profile",
                 analytic: bool = True):
        self._derivative = derivative
        self.label = label
        self.analytic = analytic

    def derivative(self, x, order: int) -> np.ndarray:
        return np.asarray(self._derivative(np.asarray(x, dtype=float), order), dtype=float)

    def __call__(self, x) -> np.ndarray:
        return self.derivative(x, 0)

    @classmethod
    def from_kernel(cls, k: GaussianHat) -> "SmoothProfile":
        """Phi^ of a Gaussian kernel, with Hermite derivatives."""
        if not isinstance(k, GaussianHat):
            raise UnsupportedError(f"no analytic transform derivatives for '{k.name}'")
        return cls(k.hat_derivative, f"gaussian_hat(sigma={k.sigma:g})")

    @classmethod
    def radial_of_kernel(cls, k: GaussianHat) -> "SmoothProfile":
        """g with Phi^(xi) = g(xi^2); for the Gaussian kernel g(t) = exp(-sigma t)."""
        if not isinstance(k, GaussianHat):
            raise UnsupportedError(f"no analytic radial profile for '{k.name}'")
        sigma = k.sigma
        return cls(lambda t, n: (-sigma) ** n * np.exp(-sigma * t), f"radial_gaussian(sigma={sigma:g})")

    @classmethod
    def zero(cls) -> "SmoothProfile":
        return cls(lambda x, n: np.zeros_like(x), "zero")

    @classmethod
    def spectral(cls, grid: UniformGrid, values, label: str = "sampled") -> "SmoothProfile":
        """
        Derivatives of uniform samples by spectral differentiation; a
        Gaussian roll-off above half the Nyquist frequency damps
        high-order noise. Zero off the grid.
        """
        spectrum = fourier_transform(grid, np.asarray(values, dtype=float))
        nu = grid.frequencies
        nyquist = 0.5 / grid.step
        excess = np.maximum(np.abs(nu) - nyquist / 2, 0.0)
        taper = np.exp(-np.square(excess / (nyquist / 8)))
        cache: Dict[int, np.ndarray] = {}
        nodes = grid.nodes

        def derivative(x, order):
            if order not in cache:
                factor = np.power(2j * math.pi * nu, order) * taper
                cache[order] = np.real(inverse_fourier_transform(grid, factor * spectrum))
            return np.interp(x, nodes, cache[order], left=0.0, right=0.0)

        return cls(derivative, label, analytic=False)


@dataclass
class HypothesisReport:
    """Integrals of an integrability hypothesis, one entry per index tuple."""
    name: str
    entries: Dict[str, float] = field(default_factory=dict)
    divergent: Dict[str, bool] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def all_finite(self) -> bool:
        return not any(self.divergent.values())

    @property
    def max_value(self) -> float:
        finite = [v for key, v in self.entries.items() if not self.divergent[key]]
        return max(finite, default=0.0)

    def record(self, key: str, value: float, divergent: bool) -> None:
        self.entries[key] = float(value)
        self.divergent[key] = bool(divergent)

    def to_report(self, provenance: str) -> VerificationReport:
        report = VerificationReport(self.name, provenance)
        report.quantities["notes"] = list(self.notes)
        for key, value in self.entries.items():
            report.add(key, value, passed=not self.divergent[key], divergent=self.divergent[key])
        return report


def _half_line_integral(fn, tol: float) -> Tuple[float, bool]:
    result = ladder_integral(fn, Interval(0.0, math.inf), [0.0], tol)
    return result.value, result.divergent


def hypothesis_integrals_phi(khat: SmoothProfile, m: int, tol: float = 1e-8) -> HypothesisReport:
    """
    integral |Phi^(n)(xi) xi^n| and integral |Phi^(n+l)(xi) xi^(n+l-m-1)| over R
    for n = 0..m and l = 0..m+1 (the union over k of l = 0..m+1-k).
    """
    if m < 0:
        raise DomainError(f"m must be a nonnegative integer, got {m}")
    report = HypothesisReport("hypothesis_phi")
    report.notes.append("l ranges over the union of the stated (k, l) pairs, i.e. l = 0..m+1")

    def entry(order: int, power: float):
        def fn(xi):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return (np.abs(khat.derivative(xi, order)) + np.abs(khat.derivative(-xi, order))) * np.power(xi, power)
        return _half_line_integral(fn, tol)

    for n in range(m + 1):
        report.record(f"first[n={n}]", *entry(n, n))
        for l in range(m + 2):
            report.record(f"second[n={n},l={l}]", *entry(n + l, n + l - m - 1))
    return report


def hypothesis_integrals_g(g: SmoothProfile, m: int, tol: float = 1e-8) -> HypothesisReport:
    """
    integral_0^inf |g^(j)| xi^(j-1/2) and integral_0^inf |g^(i+j)| xi^(i+j-m/2-1)
    for i = 0..[m/2 + 1] and j = 0..[(m+1)/2].
    """
    if m < 0:
        raise DomainError(f"m must be a nonnegative integer, got {m}")
    report = HypothesisReport("hypothesis_g")

    def entry(order: int, power: float):
        def fn(xi):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return np.abs(g.derivative(xi, order)) * np.power(xi, power)
        return _half_line_integral(fn, tol)

    j_max, i_max = (m + 1) // 2, int(math.floor(m / 2 + 1))
    for j in range(j_max + 1):
        report.record(f"first[j={j}]", *entry(j, j - 0.5))
    for i in range(i_max + 1):
        for j in range(j_max + 1):
            report.record(f"second[i={i},j={j}]", *entry(i + j, i + j - m / 2 - 1))
    return report


def hypothesis_integral_21(k: Kernel, exps: ExponentSet, p0: float) -> HypothesisReport:
    """
    integral |Phi|^s |t|^((1+gamma)s/q0 - 1) with (1+alpha)/p0 - (1+gamma)/q0 = beta
    and 1/s = 1 + 1/q0 - 1/p0, for p0 > max{(1+alpha)/(1+beta+gamma), 1+alpha}.
    """
    alpha, gamma, beta = exps.alpha, exps.gamma, exps.beta
    floor = max((1 + alpha) / (1 + beta + gamma), 1 + alpha)
    if not p0 > floor:
        raise DomainError(f"p0 must exceed {floor:g}, got {p0}")
    denominator = (1 + alpha) / p0 - beta
    if denominator <= 0:
        raise DomainError(f"no q0 solves the scaling relation for p0={p0}")
    q0 = (1 + gamma) / denominator
    inverse_s = 1 + 1 / q0 - 1 / p0
    if inverse_s <= 0 or inverse_s > 1:
        raise DomainError(f"Young exponent s = 1/{inverse_s:.6g} is not >= 1 for p0={p0}, q0={q0:.6g}")
    s = 1 / inverse_s
    value = k_general(k, s, q0, gamma)
    report = HypothesisReport("hypothesis_21")
    report.record("integral", value.value ** s, value.divergent)
    report.notes.append(f"p0={p0:g}, q0={q0:.6g}, s={s:.6g}")
    return report


# ============================================================================
# DECAY PROBE
# ============================================================================

def bump(xi) -> np.ndarray:
    """exp(-1/(1 - xi^2)) on |xi| < 1, zero elsewhere; Psi(0) = 1/e."""
    xi = np.asarray(xi, dtype=float)
    inside = np.abs(xi) < 1
    safe = np.where(inside, 1 - np.square(xi), 1.0)
    return np.where(inside, np.exp(-1 / safe), 0.0)


def _profile_extent(khat: SmoothProfile, order: int) -> float:
    eta = log_space(1e-2, 1e4, 601)
    magnitude = np.abs(khat.derivative(eta, order)) + np.abs(khat.derivative(-eta, order))
    peak = float(np.max(magnitude, initial=0.0))
    if peak == 0:
        return 0.0
    alive = np.nonzero(magnitude > 1e-16 * peak)[0]
    return float(eta[alive[-1]] * 1.5) if alive[-1] < eta.size - 1 else math.inf


def kernel_decay_probe(
    khat: SmoothProfile,
    beta: float,
    xs: Sequence[float] = tuple(log_space(1.0, 100.0, 21)),
    ys: Sequence[float] = tuple(log_space(0.1, 3e3, 41)),
    ss: Sequence[float] = (1e-3, 1e-2, 1e-1, 1.0),
    psi: Callable[[np.ndarray], np.ndarray] = bump,
    m: int = 0,
    max_nodes: int = 2 ** 16,
) -> VerificationReport:
    """
    F(x) = sup over y, s of |x|^(-beta) |d^m/dy^m y^beta integral Phi^(y xi) Psi(s xi) exp(2 pi i x xi) dxi|
    fitted against |x|^(-m-1) in log-log.

    Psi must be supported in [-1, 1]. Orders m > 0 need analytic derivatives.
    """
    if m > 0 and not khat.analytic:
        raise UnsupportedError("decay probe for m > 0 needs analytic derivatives of Phi^")
    if abs(float(psi(np.asarray([0.0]))[0])) == 0:
        raise DomainError("Psi(0) must be nonzero")
    xs = np.asarray(xs, dtype=float)
    x_max = float(np.max(np.abs(xs)))
    extent = max(_profile_extent(khat, n) for n in range(m + 1))
    best = np.zeros_like(xs)
    skipped = 0

    for s in ss:
        for y in ys:
            half = min(1.0 / s, extent / y)
            if half == 0:
                continue
            nodes = int(math.ceil(16 * 2 * half * x_max)) + 1
            nodes = max(nodes, 257)
            if nodes > max_nodes:
                skipped += 1
                continue
            xi = np.linspace(-half, half, nodes)
            weight = psi(s * xi) * (xi[1] - xi[0])
            phase = np.exp(2j * math.pi * np.outer(xs, xi))
            total = np.zeros(xs.shape, dtype=complex)
            for n in range(m + 1):
                coeff = binom(m, n) * poch(beta - (m - n) + 1, m - n) * y ** (beta - m + n)
                if coeff == 0:
                    continue
                total += coeff * (phase @ (khat.derivative(y * xi, n) * np.power(xi, n) * weight))
            value = np.power(np.abs(xs), -beta) * np.abs(total)
            best = np.maximum(best, value)
    if skipped:
        logger.info("decay probe skipped %d (y, s) pairs needing more than %d nodes", skipped, max_nodes)

    report = VerificationReport("decay_probe", "Fourier-side decay of the operator kernel")
    report.quantities.update({"beta": beta, "m": m, "skipped_pairs": skipped, "sup": best.tolist(),
                              "x": xs.tolist()})
    if not np.any(best > 0):
        report.add("vanishes", 0.0, bound=0.0)
        return report
    positive = best > 0
    slope, intercept = np.polyfit(np.log(xs[positive]), np.log(best[positive]), 1)
    scaled = best[positive] * np.power(xs[positive], m + 1)
    spread = float(scaled.max() / scaled.min())
    report.quantities.update({"slope": float(slope), "constant": float(math.exp(intercept)), "spread": spread})
    expected = -(m + 1)
    report.add("slope", abs(float(slope) - expected), bound=0.05, fitted=float(slope), expected=expected)
    report.add("constant_spread", spread, bound=10.0)
    return report


# ============================================================================
# WEIGHTED HILBERT PROBE
# ============================================================================

def weighted_hilbert_probe(
    a: float,
    p: float,
    family: Sequence[FunctionLike],
    grid: UniformGrid = UniformGrid(256.0, 2 ** 16),
) -> VerificationReport:
    """
    max over the family of ||H f||_{L^p_w} / ||f||_{L^p_w} for w = |x|^a,
    labelled with the A_p membership of the weight. For A_p weights the
    band must stay below the operator norm of H on L^p_w; off A_p it is
    only reported.
    """
    if p <= 1:
        raise DomainError(f"weighted Hilbert probe needs p > 1, got {p}")
    weight = PowerWeight(a)
    x = grid.nodes
    keep = x != 0
    w = weight.values(x[keep])

    def norm(values):
        return float(np.sum(np.abs(values[keep]) ** p * w) * grid.step) ** (1 / p)

    ratios = []
    for f in family:
        samples = np.real(np.asarray(f(x), dtype=float))
        base = norm(samples)
        if base == 0:
            continue
        ratios.append(norm(hilbert_transform(grid, samples)) / base)
    if not ratios:
        raise DomainError("weighted Hilbert probe needs a nonzero family member")

    member = is_ap_power(a, p)
    report = VerificationReport("weighted_hilbert", "Hilbert transform on power-weighted L^p")
    report.quantities.update({"a": a, "p": p, "A_p_member": member, "ratio_min": min(ratios),
                              "ratio_max": max(ratios), "members": len(ratios)})
    if member:
        bound = power_weight_hilbert_norm(a, p)
        report.quantities["norm_bound"] = bound
        report.add("ratio_bound", max(ratios), bound=bound, tolerance=1e-6 * bound)
    return report


def power_weight_hilbert_norm(a: float, p: float) -> float:
    """
    Norm of H on L^p(|x|^a dx) for -1 < a < p - 1: max(tan t, cot t) with
    t = pi (1 + a) / (2 p). Reduces to the unweighted constant at a = 0.
    """
    if p <= 1 or not is_ap_power(a, p):
        raise DomainError(f"|x|^{a} is not an A_{p} weight with p > 1")
    angle = math.pi * (1 + a) / (2 * p)
    return max(math.tan(angle), 1 / math.tan(angle))
