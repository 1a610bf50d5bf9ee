"""
Unit tests for weights and Muckenhoupt characteristics in weights.py
"""

import math
import os
import sys

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from grid_core import DomainError, GridFunction, Interval, UnsupportedError, make_log_grid
from weights import (
    ConstantWeight,
    Direction,
    EvenMonotoneWeight,
    PowerWeight,
    ZeroWeight,
    a1_characteristic,
    ap_characteristic,
    critical_index,
    default_balls,
    is_ap_power,
    origin_balls,
    weight_from_spec,
    weight_measure,
)


@pytest.mark.unit
class TestWeightVariants:
    """Tests for weight construction and evaluation."""

    def test_power_weight_is_even(self, sqrt_weight):
        np.testing.assert_allclose(sqrt_weight(np.array([-4.0, 4.0])), [2.0, 2.0])

    def test_power_weight_local_integrability(self):
        """a <= -1 is not locally integrable."""
        with pytest.raises(DomainError):
            PowerWeight(-1.0)

    def test_constant_must_be_positive(self):
        with pytest.raises(DomainError):
            ConstantWeight(0.0)

    def test_monotonicity(self, sqrt_weight):
        """|x|^a increases for a >= 0 and decreases for a <= 0."""
        assert sqrt_weight.is_monotone(Direction.INCREASING)
        assert not sqrt_weight.is_monotone(Direction.DECREASING)
        assert PowerWeight(-0.5).is_monotone(Direction.DECREASING)
        assert ConstantWeight().is_monotone(Direction.DECREASING)

    def test_zero_weight(self):
        assert not np.any(ZeroWeight()(np.array([-1.0, 2.0])))


@pytest.mark.unit
class TestEvenMonotoneWeight:
    """Tests for profile-defined monotone weights."""

    def test_clamped_beyond_grid(self):
        """Outside its nodes the profile holds its end values."""
        w = EvenMonotoneWeight(np.array([1.0, 10.0]), np.array([1.0, 2.0]), Direction.INCREASING)
        np.testing.assert_allclose(w(np.array([0.01, -100.0])), [1.0, 2.0])

    def test_log_linear_between_nodes(self):
        """Halfway in ln r gives the mean value."""
        w = EvenMonotoneWeight(np.array([1.0, 100.0]), np.array([1.0, 3.0]), Direction.INCREASING)
        assert float(w(10.0)) == pytest.approx(2.0)

    def test_rejects_wrong_direction(self):
        """A decreasing profile cannot be declared increasing."""
        with pytest.raises(DomainError):
            EvenMonotoneWeight(np.array([1.0, 2.0]), np.array([2.0, 1.0]), Direction.INCREASING)

    def test_from_grid_function(self):
        """The positive half of a grid function becomes the profile."""
        grid = make_log_grid(1e-2, 1e2, 9)
        profile = GridFunction.from_callable(grid, lambda x: np.power(np.abs(x), -0.5))
        w = EvenMonotoneWeight.from_grid_function(profile, Direction.DECREASING)
        np.testing.assert_allclose(w(-grid.positive_nodes), np.power(grid.positive_nodes, -0.5))
        assert w.is_monotone(Direction.DECREASING)

    def test_from_csv_spec(self, write_profile):
        """Config specs load CSV profiles."""
        path = write_profile([0.5, 1.0, 2.0], [3.0, 2.0, 1.0])
        w = weight_from_spec({"kind": "even_monotone", "path": str(path), "direction": "decreasing"})
        assert isinstance(w, EvenMonotoneWeight)
        assert w.is_monotone(Direction.DECREASING)


@pytest.mark.unit
class TestWeightMeasure:
    """Tests for w(E)."""

    def test_power_on_unit_interval(self, sqrt_weight):
        """Integral of |x|^(1/2) on [0, 1] is 2/3."""
        measure = weight_measure(sqrt_weight, Interval(0.0, 1.0))
        assert measure.value == pytest.approx(2 / 3, rel=1e-8)
        assert not measure.divergent

    def test_constant_on_half_line(self, unit_weight):
        """An unbounded set has infinite constant-weight measure."""
        assert weight_measure(unit_weight, Interval(0.0, math.inf)).divergent


@pytest.mark.unit
class TestApCharacteristic:
    """Tests for A_p and A_1 characteristics."""

    def test_constant_is_one(self, unit_weight):
        """Constant weights have characteristic exactly 1."""
        report = ap_characteristic(unit_weight, 2.0, default_balls())
        assert report.characteristic == 1.0
        assert not report.divergent
        assert a1_characteristic(unit_weight, default_balls()).characteristic == pytest.approx(1.0, rel=1e-12)

    def test_sqrt_weight_on_origin_balls(self, sqrt_weight):
        """On origin balls (R^(1/2)/1.5)(R^(-1/2)/0.5) = 4/3 at every radius."""
        report = ap_characteristic(sqrt_weight, 2.0, origin_balls())
        assert not report.divergent
        assert report.characteristic == pytest.approx(4 / 3, rel=1e-6)
        assert report.member is True

    def test_sqrt_weight_off_center_balls(self, sqrt_weight):
        """Balls straddling the origin asymmetrically do worse than centered ones, but stay below 3/2."""
        report = ap_characteristic(sqrt_weight, 2.0, default_balls())
        assert not report.divergent
        assert 4 / 3 - 1e-6 <= report.characteristic <= 1.5 * (1 + 1e-4)

    def test_sqrt_weight_dilation_invariant(self, sqrt_weight):
        """Origin balls at every radius give the same product."""
        near = ap_characteristic(sqrt_weight, 2.0, origin_balls(1e-3, 1e3)).characteristic
        far = ap_characteristic(sqrt_weight, 2.0, origin_balls(1e-2, 1e4)).characteristic
        assert abs(far - near) / near <= 1e-4

    def test_sqrt_weight_outside_a_1_4(self, sqrt_weight):
        """|x|^(1/2) is not in A_1.4: the dual power is not integrable at 0."""
        report = ap_characteristic(sqrt_weight, 1.4, default_balls())
        assert report.divergent
        assert report.characteristic == math.inf
        assert report.member is False

    def test_a1_increasing_power_diverges(self, sqrt_weight):
        """|x|^(1/2) vanishes at 0, so it is not in A_1."""
        assert a1_characteristic(sqrt_weight, origin_balls()).divergent

    def test_a1_decreasing_power(self):
        """|x|^(-1/2) on origin balls: avg = 2 R^(-1/2), essinf = R^(-1/2)."""
        report = a1_characteristic(PowerWeight(-0.5), origin_balls())
        assert report.characteristic == pytest.approx(2.0, rel=1e-6)

    def test_non_increasing_in_p(self, sqrt_weight):
        """[w]_{A_q} <= [w]_{A_p} for q > p, ball by ball; origin balls give 4/3, 32/27, 144/125."""
        reports = [ap_characteristic(sqrt_weight, p, default_balls()) for p in (2.0, 3.0, 4.0)]
        for low, high in zip(reports, reports[1:]):
            assert high.characteristic <= low.characteristic * (1 + 1e-8)
            assert np.all(np.array(high.per_ball) <= np.array(low.per_ball) * (1 + 1e-8))
        at_origin = [ap_characteristic(sqrt_weight, p, origin_balls()).characteristic for p in (2.0, 3.0, 4.0)]
        np.testing.assert_allclose(at_origin, [4 / 3, 32 / 27, 144 / 125], rtol=1e-6)

    def test_p_must_exceed_one(self, sqrt_weight):
        with pytest.raises(DomainError):
            ap_characteristic(sqrt_weight, 1.0, default_balls())

    def test_unbounded_balls_rejected(self, sqrt_weight):
        with pytest.raises(DomainError):
            ap_characteristic(sqrt_weight, 2.0, [Interval(0.0, math.inf)])


@pytest.mark.unit
class TestMembership:
    """Tests for closed-form power-weight membership."""

    @pytest.mark.parametrize("a, p, expected", [
        (0.5, 2.0, True),
        (0.5, 1.4, False),
        (-0.5, 1.0, True),
        (0.5, 1.0, False),
        (-0.99, 3.0, True),
    ])
    def test_is_ap_power(self, a, p, expected):
        assert is_ap_power(a, p) is expected

    def test_critical_index(self, sqrt_weight, unit_weight):
        """max(1, 1 + a) for powers, 1 for constants."""
        assert critical_index(sqrt_weight) == 1.5
        assert critical_index(unit_weight) == 1.0
        with pytest.raises(UnsupportedError):
            critical_index(ZeroWeight())
