"""
Unit tests for grids, sampled functions and quadrature in grid_core.py
"""

import math
import os
import sys

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from grid_core import (
    ConvergenceError,
    DomainError,
    GridFunction,
    HausdorffError,
    Interval,
    PreconditionError,
    finite_rule,
    integrate,
    integrate_with_error,
    ladder_integral,
    log_space,
    make_log_grid,
    read_profile_csv,
    sup_over_scale,
)


@pytest.mark.unit
class TestErrors:
    """Tests for the error hierarchy."""

    def test_domain_error_is_value_error(self):
        """Domain errors are also ValueErrors so pydantic validators surface them."""
        assert issubclass(DomainError, ValueError)
        assert issubclass(DomainError, HausdorffError)

    def test_precondition_names_hypothesis(self):
        """A precondition error carries the violated hypothesis."""
        exc = PreconditionError("monotone_v", "v must be decreasing")
        assert exc.hypothesis == "monotone_v"
        assert "v must be decreasing" in str(exc)


@pytest.mark.unit
class TestInterval:
    """Tests for Interval."""

    def test_rejects_empty(self):
        """lo must be strictly below hi."""
        with pytest.raises(DomainError):
            Interval(1.0, 1.0)

    def test_ball(self):
        """A ball is centered with the given radius."""
        ball = Interval.ball(2.0, 0.5)
        assert ball.lo == 1.5 and ball.hi == 2.5
        assert ball.length == 1.0

    def test_unbounded(self):
        """Infinite ends are allowed and reported."""
        assert not Interval(0.0, math.inf).is_bounded
        assert Interval(-1.0, 1.0).is_bounded


@pytest.mark.unit
class TestLogGrid:
    """Tests for LogGrid construction."""

    def test_nodes_are_symmetric(self, small_log_grid):
        """Negative nodes mirror the positive ones."""
        nodes = small_log_grid.nodes
        assert nodes.size == small_log_grid.size == 122
        np.testing.assert_allclose(nodes[:61], -nodes[61:][::-1])

    def test_endpoints_exact(self, small_log_grid):
        """The outermost nodes are r_min and r_max exactly."""
        positive = small_log_grid.positive_nodes
        assert positive[0] == 1e-3
        assert positive[-1] == 1e3

    def test_log_step(self):
        """Log step spreads ln(r_max / r_min) over n_per_side - 1 gaps."""
        grid = make_log_grid(1.0, math.e ** 4, 5)
        assert grid.log_step == pytest.approx(1.0)

    @pytest.mark.parametrize("args", [(0.0, 1.0, 10), (2.0, 1.0, 10), (1.0, 2.0, 1)])
    def test_rejects_bad_arguments(self, args):
        """Non-positive radii, reversed radii and single nodes are rejected."""
        with pytest.raises(DomainError):
            make_log_grid(*args)


@pytest.mark.unit
class TestGridFunction:
    """Tests for sampled functions."""

    def test_power_law_interpolation_is_exact(self, small_log_grid):
        """Log-linear interpolation reproduces power laws between nodes."""
        f = GridFunction.from_callable(small_log_grid, lambda x: np.abs(x) ** 2.5)
        probe = np.array([0.0123, 3.7, -41.0])
        np.testing.assert_allclose(f(probe), np.abs(probe) ** 2.5, rtol=1e-10)

    def test_zero_outside_grid(self, small_log_grid):
        """Values vanish outside [r_min, r_max]."""
        f = GridFunction.from_callable(small_log_grid, lambda x: np.ones_like(x))
        np.testing.assert_array_equal(f(np.array([1e-5, 1e5, -1e4])), 0.0)

    def test_shape_mismatch(self, small_log_grid):
        """Values must cover every node."""
        with pytest.raises(DomainError):
            GridFunction(small_log_grid, np.zeros(3))

    def test_non_finite_values(self, small_log_grid):
        """Samples must be finite."""
        values = np.zeros(small_log_grid.size)
        values[4] = np.nan
        with pytest.raises(DomainError):
            GridFunction(small_log_grid, values)

    def test_integral_of_two_sided_exponential(self):
        """Integral of exp(-|x|) over the line is 2 up to truncation."""
        grid = make_log_grid(1e-6, 1e2, 257)
        f = GridFunction.from_callable(grid, lambda x: np.exp(-np.abs(x)))
        assert f.integral() == pytest.approx(2.0, rel=1e-5)

    def test_half_views(self, small_log_grid):
        """Positive and negative halves are both ascending in |x|."""
        f = GridFunction.from_callable(small_log_grid, lambda x: x)
        assert np.all(np.diff(f.positive_values) > 0)
        assert np.all(np.diff(-f.negative_values) > 0)


@pytest.mark.unit
class TestQuadrature:
    """Tests for the double-exponential rules."""

    def test_finite_rule_weights_sum_to_length(self):
        """Weights integrate the constant 1 exactly."""
        _, w = finite_rule(-1.0, 3.0, 5)
        assert w.sum() == pytest.approx(4.0, rel=1e-10)

    def test_exponential_tail(self):
        """Integral of exp(-x) on [0, inf) is 1."""
        assert integrate(lambda x: np.exp(-x), Interval(0.0, math.inf)) == pytest.approx(1.0, rel=1e-8)

    def test_endpoint_singularity(self):
        """Integral of x^(-1/2) on [0, 1] is 2."""
        assert integrate(lambda x: 1 / np.sqrt(x), Interval(0.0, 1.0)) == pytest.approx(2.0, rel=1e-8)

    def test_whole_line(self):
        """Gaussian integral over the line is sqrt(pi)."""
        value = integrate(lambda x: np.exp(-x * x), Interval(-math.inf, math.inf))
        assert value == pytest.approx(math.sqrt(math.pi), rel=1e-8)

    def test_breakpoint_kink(self):
        """Integral of |x| on [-1, 2] with the kink declared is 2.5."""
        assert integrate(np.abs, Interval(-1.0, 2.0), breakpoints=[0.0]) == pytest.approx(2.5, rel=1e-8)

    def test_error_estimate_is_returned(self):
        """Results carry an error bound within the tolerance."""
        result = integrate_with_error(np.cos, Interval(0.0, 1.0), 1e-10)
        assert result.value == pytest.approx(math.sin(1.0), rel=1e-10)
        assert result.error <= 1e-10 * abs(result.value) + 1e-300

    def test_rejects_non_positive_tolerance(self):
        """Tolerance must be positive."""
        with pytest.raises(DomainError):
            integrate(np.cos, Interval(0.0, 1.0), tol=0.0)

    def test_non_convergent_raises(self):
        """A divergent improper integral exhausts the budget."""
        with pytest.raises(ConvergenceError):
            integrate_with_error(lambda x: 1 / np.sqrt(x), Interval(1.0, math.inf), 1e-8,
                                 max_subdivisions=2)


@pytest.mark.unit
class TestLadderIntegral:
    """Tests for divergence-aware integration."""

    def test_convergent_singularity(self):
        """x^(-1/2) near zero is integrable."""
        result = ladder_integral(lambda x: 1 / np.sqrt(x), Interval(0.0, 1.0))
        assert not result.divergent
        assert result.value == pytest.approx(2.0, rel=1e-6)

    def test_divergent_singularity(self):
        """x^(-3/2) near zero is flagged."""
        result = ladder_integral(lambda x: np.power(x, -1.5), Interval(0.0, 1.0))
        assert result.divergent

    def test_divergent_tail(self):
        """x^(-1/2) on [1, inf) is flagged."""
        result = ladder_integral(lambda x: np.power(x, -0.5), Interval(1.0, math.inf))
        assert result.divergent

    def test_convergent_tail(self):
        """x^(-2) on [1, inf) integrates to 1."""
        result = ladder_integral(lambda x: np.power(x, -2.0), Interval(1.0, math.inf))
        assert not result.divergent
        assert result.value == pytest.approx(1.0, rel=1e-6)


@pytest.mark.unit
class TestScaleSupremum:
    """Tests for sup_over_scale."""

    def test_interior_maximum(self):
        """alpha exp(-alpha) peaks at alpha = 1."""
        found = sup_over_scale(lambda a: a * math.exp(-a))
        assert not found.divergent
        assert found.value == pytest.approx(math.exp(-1), rel=1e-10)
        assert found.arg == pytest.approx(1.0, rel=1e-3)

    def test_growth_at_the_end(self):
        """Unbounded growth is reported as divergent."""
        assert sup_over_scale(lambda a: a).divergent

    def test_plateau_is_finite(self):
        """A function that saturates is not divergent."""
        found = sup_over_scale(lambda a: min(a, 1.0))
        assert not found.divergent
        assert found.value == pytest.approx(1.0)


@pytest.mark.unit
class TestHelpers:
    """Tests for log_space and profile files."""

    def test_log_space_endpoints(self):
        """Endpoints are included."""
        points = log_space(1e-2, 1e2, 5)
        np.testing.assert_allclose(points, [1e-2, 1e-1, 1.0, 1e1, 1e2])

    def test_read_profile_with_header(self, write_profile):
        """A header row is skipped."""
        nodes, values = read_profile_csv(write_profile([0.5, 1.0, 2.0], [3.0, 2.0, 1.0]))
        np.testing.assert_array_equal(nodes, [0.5, 1.0, 2.0])
        np.testing.assert_array_equal(values, [3.0, 2.0, 1.0])

    def test_read_profile_rejects_unsorted(self, write_profile):
        """Nodes must ascend."""
        with pytest.raises(DomainError):
            read_profile_csv(write_profile([1.0, 0.5], [1.0, 2.0]))

    def test_read_profile_missing(self, temp_dir):
        """A missing file is a domain error."""
        with pytest.raises(DomainError):
            read_profile_csv(temp_dir / "missing.csv")


@pytest.mark.unit
class TestQuadratureProperties:
    """Linearity and reflection of the adaptive quadrature."""

    def test_linear_combination(self):
        """integral (2 exp(-x^2) - 3/(1 + x^2)) = 2 sqrt(pi) - 3 pi."""
        f = lambda x: np.exp(-np.square(x))
        g = lambda x: 1 / (1 + np.square(x))
        line = Interval(-math.inf, math.inf)
        combined = integrate(lambda x: 2 * f(x) - 3 * g(x), line)
        assert combined == pytest.approx(2 * integrate(f, line) - 3 * integrate(g, line), rel=1e-7)
        assert combined == pytest.approx(2 * math.sqrt(math.pi) - 3 * math.pi, rel=1e-7)

    @pytest.mark.parametrize("lo, hi", [(0.5, 3.0), (0.0, 1.0), (2.0, math.inf)])
    def test_reflection(self, lo, hi):
        """integral_a^b f(x) dx = integral_{-b}^{-a} f(-x) dx for an asymmetric f."""
        f = lambda x: np.power(np.abs(x), 3) * np.exp(-x)
        direct = integrate(f, Interval(lo, hi), 1e-12)
        reflected = integrate(lambda x: f(-x), Interval(-hi, -lo), 1e-12)
        assert reflected == pytest.approx(direct, rel=1e-10)
