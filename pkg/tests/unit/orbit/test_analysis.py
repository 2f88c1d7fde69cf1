"""Unit tests for period search and growth exponents."""

from fractions import Fraction

import numpy as np
import pytest

from orbitile.orbit.analysis import descendants, growth_exponent_check, period_search
from orbitile.orbit.builder import overlay_orbit
from orbitile.orbit.seed import seed_orbit
from orbitile.overlay.alphabet import enumerate_alphabet
from orbitile.util.exceptions import WindowTooNarrow


@pytest.fixture(scope='module')
def ternary_window():
    from orbitile.substitution.system import make_system

    ov = enumerate_alphabet(make_system('ternary', {'0': '000'}), make_system('binary', {'0': '00'}))
    return overlay_orbit(ov, 12, Fraction(1, 10), Fraction(1, 20), 40)


class TestPeriodSearch:
    """Test cases for vertical period search."""

    def test_binary_base_window_is_periodic(self, binary):
        """Test a base window of σ(0) = 00 admits period 1."""
        window = seed_orbit(binary, 5, 16)
        periods = period_search(window, 2)
        assert [pi for pi, _ in periods][:1] == [1]
        _, evidence = periods[0]
        assert [step['i'] for step in evidence] == [0, 1, 2, 3]
        assert all(set(step) == {'i', 'shift', 'overlap'} for step in evidence)

    def test_incommensurate_overlay_has_no_period(self, ternary_window):
        """Test no short vertical period survives on a ternary-over-binary overlay."""
        assert period_search(ternary_window, 4) == []

    def test_overlap_threshold(self, binary):
        """Test an overlap demand above the row length finds nothing."""
        window = seed_orbit(binary, 4, 8)
        assert period_search(window, 1, min_overlap=1.0)[0][0] == 1
        short = seed_orbit(binary, 2, 8)
        assert period_search(short, 1) == []


class TestDescendants:
    """Test cases for descendants."""

    def test_binary_spans_double(self, binary):
        """Test the descendants of a binary cell double row by row."""
        window = seed_orbit(binary, 4, 20)
        spans = list(descendants(window, 0, 0))
        assert spans == [(0, range(0, 1)), (1, range(0, 2)), (2, range(0, 4)), (3, range(0, 8))]


class TestGrowthExponent:
    """Test cases for growth_exponent_check."""

    def test_fibonacci_slope(self, fibonacci):
        """Test descendant counts of a Fibonacci cell grow like the golden ratio."""
        report = growth_exponent_check(seed_orbit(fibonacci, 6, 200))
        assert report.ok
        assert report.depths == [0, 1, 2, 3, 4, 5]
        assert all(a <= b for a, b in zip(report.alpha_lengths, report.alpha_lengths[1:]))
        assert report.C is None

    def test_overlay_slopes(self, ternary_window):
        """Test the α and β lengths of overlay descendants grow like λ."""
        report = growth_exponent_check(ternary_window, pi=2, Delta=3)
        assert report.ok
        assert report.bound_violations == []
        assert report.alpha_lengths == [3**k for k in report.depths]
        assert report.periodic_rate == pytest.approx(3 * np.log(2) / 2)
        assert report.to_json()['ok'] is True

    def test_no_descendants(self, binary):
        """Test a window too thin to hold any descendant is rejected."""
        window = seed_orbit(binary, 2, 0)
        with pytest.raises(WindowTooNarrow) as exc_info:
            growth_exponent_check(window)
        assert str(exc_info.value) == (
            'Orbit window too narrow: the top centre cell has no descendants in the window'
        )
