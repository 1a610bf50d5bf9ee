"""
Unit tests for weighted norms and theorem constants in norms.py
"""

import math
import os
import sys

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from grid_core import DomainError, GridFunction, make_log_grid
from hausdorff_operator import ClosedForm, ExponentSet
from kernels import AdjointHardy, FractionalHardy
from norms import A_constant, B_constant, k_constant, k_general, weak_lp_norm, weighted_lp_norm
from weights import ConstantWeight, PowerWeight, Weight, ZeroWeight


def indicator(width=1.0):
    return ClosedForm(lambda x: (np.abs(x) <= width).astype(float), (width,), "indicator")


@pytest.mark.unit
class TestStrongNorm:
    """Tests for weighted_lp_norm."""

    def test_gaussian_l2(self, unit_gaussian, unit_weight):
        """||exp(-pi x^2)||_2 = 2^(-1/4)."""
        norm = weighted_lp_norm(unit_gaussian, unit_weight, 2.0)
        assert norm.value == pytest.approx(2 ** -0.25, rel=1e-8)
        assert not norm.divergent

    def test_power_weight(self):
        """Integral of |x| exp(-x^2) over the line is 1."""
        f = ClosedForm(lambda x: np.exp(-0.5 * x * x), (), "gaussian")
        assert weighted_lp_norm(f, PowerWeight(1.0), 2.0).value == pytest.approx(1.0, rel=1e-8)

    def test_indicator_with_breakpoint(self, unit_weight):
        """||1_[-1,1]||_p = 2^(1/p)."""
        assert weighted_lp_norm(indicator(), unit_weight, 3.0).value == pytest.approx(2 ** (1 / 3), rel=1e-8)

    def test_grid_function(self, unit_weight):
        """Grid functions integrate through their interpolant."""
        grid = make_log_grid(1e-6, 1e2, 257)
        f = GridFunction.from_callable(grid, lambda x: np.exp(-np.abs(x)))
        assert weighted_lp_norm(f, unit_weight, 2.0).value == pytest.approx(1.0, rel=1e-3)

    def test_divergent_tail(self, unit_weight):
        """(1 + |x|)^(-1/4) is not in L^2."""
        f = ClosedForm(lambda x: np.power(1 + np.abs(x), -0.25), (), "slow")
        norm = weighted_lp_norm(f, unit_weight, 2.0, check_divergence=True)
        assert norm.divergent

    def test_zero_grid_function(self, small_log_grid, unit_weight):
        assert weighted_lp_norm(GridFunction.zeros(small_log_grid), unit_weight, 2.0).value == 0.0

    def test_exponent_must_be_positive(self, unit_gaussian, unit_weight):
        with pytest.raises(DomainError):
            weighted_lp_norm(unit_gaussian, unit_weight, 0.0)


@pytest.mark.unit
class TestWeakNorm:
    """Tests for weak_lp_norm."""

    def test_indicator(self, unit_weight):
        """sup lam (w{|f| > lam})^(1/2) for 1_[-1,1] is sqrt(2)."""
        norm = weak_lp_norm(indicator(), unit_weight, 2.0)
        assert norm.value == pytest.approx(math.sqrt(2), rel=1e-6)

    def test_chebyshev(self, unit_gaussian, sqrt_weight):
        """The weak norm never exceeds the strong one."""
        for p in (0.5, 1.0, 2.0):
            weak = weak_lp_norm(unit_gaussian, sqrt_weight, p).value
            strong = weighted_lp_norm(unit_gaussian, sqrt_weight, p).value
            assert weak <= strong * (1 + 1e-8)

    def test_gaussian_closed_form(self, unit_gaussian, unit_weight):
        """|{exp(-pi x^2) > lam}| = 2 sqrt(ln(1/lam)/pi); the p = 1 sup is at lam = exp(-1/2)."""
        expected = math.exp(-0.5) * 2 * math.sqrt(0.5 / math.pi)
        assert weak_lp_norm(unit_gaussian, unit_weight, 1.0).value == pytest.approx(expected, rel=1e-5)

    def test_zero_function(self, small_log_grid, unit_weight):
        assert weak_lp_norm(GridFunction.zeros(small_log_grid), unit_weight, 1.0).value == 0.0


@pytest.mark.unit
class TestKernelConstants:
    """Tests for K_{Phi,beta,q} and K_{Phi,s,q,gamma}."""

    def test_fractional_hardy_closed_form(self, hardy_half):
        """K for FractionalHardy(1/2), q = 4: (2 int_1^inf t^(-3/2))^(1/2) = 2."""
        value = k_constant(hardy_half, 0.5, 4.0)
        assert value.value == pytest.approx(2.0, rel=1e-8)
        assert not value.divergent
        assert value.detail["tail_dominates"]

    def test_adjoint_general(self):
        """AdjointHardy with s = 1, q = 4: 2 int_0^1 t^(-3/4) = 8."""
        value = k_general(AdjointHardy(), 1.0, 4.0)
        assert value.value == pytest.approx(8.0, rel=1e-8)
        assert not value.detail["tail_dominates"]

    def test_divergent_tail(self, hardy_half):
        """A growing tail is flagged, not raised."""
        value = k_general(hardy_half, 1.0, 0.5)
        assert value.divergent
        assert value.detail["tail_divergent"]

    def test_s_below_one(self, hardy_half):
        with pytest.raises(DomainError):
            k_general(hardy_half, 0.5, 2.0)

    def test_beta_range(self, hardy_half):
        with pytest.raises(DomainError):
            k_constant(hardy_half, 1.0, 2.0)


@pytest.mark.unit
class TestTwoWeightConstants:
    """Tests for the constants A and B."""

    def test_a_constant_unit_weights(self, unit_weight, reference_exponents):
        """(2 alpha)^(1/4) (2/alpha)^(1/4) = sqrt(2) for every alpha."""
        value, maximizer = A_constant(unit_weight, unit_weight, reference_exponents)
        assert value.value == pytest.approx(math.sqrt(2), rel=1e-6)
        assert value.detail["alpha_relative_spread"] <= 1e-6
        assert maximizer > 0

    def test_b_constant_unit_weights(self, unit_weight, reference_exponents):
        """B mirrors A for unit weights."""
        value, _ = B_constant(unit_weight, unit_weight, reference_exponents)
        assert value.value == pytest.approx(math.sqrt(2), rel=1e-6)

    def test_a_independent_of_alpha(self, unit_weight, reference_exponents):
        """The A product at 50 log-spaced alphas has relative spread below 1e-6."""
        from grid_core import integrate, Interval, log_space
        products = []
        for alpha in log_space(1e-3, 1e3, 50):
            inner = 2 * integrate(lambda x: np.ones_like(x), Interval(0.0, alpha))
            outer = 2 * integrate(lambda x: x ** -2.0, Interval(alpha, math.inf))
            products.append(inner ** 0.25 * outer ** 0.25)
        products = np.array(products)
        assert np.std(products) / np.mean(products) <= 1e-6

    def test_zero_target_weight(self, unit_weight, reference_exponents):
        """u = 0 gives A = 0."""
        value, _ = A_constant(ZeroWeight(), unit_weight, reference_exponents)
        assert value.value == 0.0

    def test_divergent_b(self, unit_weight):
        """Constant v with p'(1 - beta) <= 1 has a non-integrable tail."""
        exps = ExponentSet(4.0, 8.0, 0.75)
        value, _ = B_constant(unit_weight, unit_weight, exps)
        assert value.divergent

    def test_requires_p_above_one(self, unit_weight):
        with pytest.raises(DomainError):
            A_constant(unit_weight, unit_weight, ExponentSet(1.0, 2.0, 0.5))


class RisingWeight(Weight):
    """w(x) = 1 + x^2/(1 + x^2): smooth, between 1 and 2."""

    name = "rising"

    def profile(self, r):
        return 1 + np.square(r) / (1 + np.square(r))


@pytest.mark.unit
class TestTwoWeightMonotonicity:
    """A and B grow with u and shrink as v grows, pointwise."""

    @pytest.mark.parametrize("constant", [A_constant, B_constant])
    def test_larger_target_weight(self, constant, unit_weight, reference_exponents):
        """1 <= u <= 2 keeps the constant between its unit value and 2^(1/q) times it."""
        base, _ = constant(unit_weight, unit_weight, reference_exponents)
        raised, _ = constant(RisingWeight(), unit_weight, reference_exponents)
        assert base.value * (1 - 1e-8) <= raised.value <= 2 ** (1 / 4) * base.value * (1 + 1e-8)
        doubled, _ = constant(ConstantWeight(2.0), unit_weight, reference_exponents)
        assert doubled.value == pytest.approx(2 ** (1 / 4) * base.value, rel=1e-6)
        assert raised.value <= doubled.value * (1 + 1e-8)

    @pytest.mark.parametrize("constant", [A_constant, B_constant])
    def test_larger_source_weight(self, constant, unit_weight, reference_exponents):
        """v enters through v^(1 - p') with 1 - p' < 0, so raising v lowers the constant."""
        base, _ = constant(unit_weight, unit_weight, reference_exponents)
        raised, _ = constant(unit_weight, RisingWeight(), reference_exponents)
        doubled, _ = constant(unit_weight, ConstantWeight(2.0), reference_exponents)
        assert doubled.value == pytest.approx(2 ** (-1 / reference_exponents.p) * base.value, rel=1e-6)
        assert doubled.value * (1 - 1e-8) <= raised.value <= base.value * (1 + 1e-8)
