"""Unit tests for adaptive-precision reals."""

from fractions import Fraction

import pytest
import sympy

from orbitile.substitution.adaptive_real import AdaptiveReal, exactly_equal, sum_reals
from orbitile.util.exceptions import IndeterminateComparison

X = sympy.Symbol('x')


def sqrt2():
    return AdaptiveReal.algebraic(sympy.Poly(X**2 - 2, X))


class TestAdaptiveReal:
    """Test cases for AdaptiveReal enclosures and comparisons."""

    def test_enclosure_contains_value(self):
        """Test the enclosure of √2 contains √2 at several precisions."""
        r = sqrt2()
        for prec in (16, 64, 256):
            interval = r.enclosure(prec)
            assert interval.lo * interval.lo <= 2 <= interval.hi * interval.hi

    def test_refinement_shrinks(self):
        """Test higher precision gives a narrower enclosure."""
        r = sqrt2()
        assert r.enclosure(256).width() < r.enclosure(32).width()

    def test_rational_compare(self):
        """Test comparisons of rationals are decided exactly."""
        third = AdaptiveReal.from_rational(Fraction(1, 3))
        assert third < Fraction(1, 2)
        assert third.compare(Fraction(1, 3)) == 0

    def test_algebraic_equality_is_proven(self):
        """Test (√2)² = 2 is reported as equal, not undecided."""
        r = sqrt2()
        assert (r * r).compare(2) == 0

    def test_powers_of_roots(self):
        """Test (1+√2)² = 3 + 2√2."""
        silver = sqrt2() + 1
        assert (silver ** 2).compare(sqrt2() * 2 + 3) == 0

    def test_negative_power(self):
        """Test negative integer powers divide."""
        two = AdaptiveReal.from_int(2)
        assert (two ** -3).compare(Fraction(1, 8)) == 0

    def test_exp_log_roundtrip(self):
        """Test log(exp(x)) agrees with x to high relative precision."""
        x = AdaptiveReal.from_rational(Fraction(3, 7))
        assert x.exp().log().close_to(x, rel=1e-15)

    def test_undecidable_raises(self):
        """Test a comparison without an exact form raises at the budget."""
        x = AdaptiveReal.from_rational(Fraction(1, 5)).exp()
        y = AdaptiveReal(x.enclosure, None, 'opaque copy')
        with pytest.raises(IndeterminateComparison) as exc:
            x.compare(y, bits=128)
        assert str(exc.value).startswith('Could not decide')

    def test_linear_combination(self):
        """Test linear_combination sums weighted terms."""
        r = sqrt2()
        total = AdaptiveReal.linear_combination([2, -1], [r, r])
        assert total.compare(r) == 0

    def test_sum_of_nothing(self):
        """Test sum_reals of no values is zero."""
        assert sum_reals([]).compare(0) == 0

    def test_exactly_equal_distinguishes(self):
        """Test exactly_equal rejects distinct algebraic numbers."""
        assert not exactly_equal(sqrt2(), AdaptiveReal.from_rational(Fraction(99, 70)))

    def test_to_decimal(self):
        """Test to_decimal prints the requested number of digits."""
        assert sqrt2().to_decimal(12).startswith('1.41421356237')
        assert float(sqrt2()) == pytest.approx(2**0.5)

    def test_coerce_rejects_floats(self):
        """Test floats are not silently treated as exact."""
        with pytest.raises(TypeError):
            AdaptiveReal.coerce(0.5)
