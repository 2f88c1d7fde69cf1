"""Unit tests for explicit overlay orbits."""

import random
from fractions import Fraction

import pytest

from orbitile.orbit.analysis import period_search
from orbitile.orbit.builder import delta_sequence, overlay_orbit, restore_system
from orbitile.orbit.validation import check_useful_inequality, validate_window
from orbitile.orbit.window import dumps_window, loads_window
from orbitile.overlay.alphabet import enumerate_alphabet, is_production, project_alpha, verify_property3
from orbitile.substitution.adaptive_real import AdaptiveReal
from orbitile.util.exceptions import DegenerateOffset

OFFSETS = [
    (Fraction(1, 10), Fraction(1, 20)),
    (Fraction(1, 7), Fraction(1, 3)),
    (Fraction(2, 7), Fraction(5, 11)),
    (Fraction(-3, 5), Fraction(1, 7)),
    (Fraction(13, 17), Fraction(2, 9)),
    (Fraction(1, 2), Fraction(-1, 4)),
]


@pytest.fixture(scope='module')
def ternary_over_binary():
    from orbitile.substitution.system import make_system

    return enumerate_alphabet(
        make_system('ternary', {'0': '000'}), make_system('binary', {'0': '00'})
    )


class TestDeltaSequence:
    """Test cases for the row correspondence i -> Δ_i."""

    def test_ternary_over_binary(self):
        """Test Δ_i = ⌊i log 3 / log 2⌋ at d = 0."""
        lam, gam = AdaptiveReal.from_int(3), AdaptiveReal.from_int(2)
        Deltas, deltas = delta_sequence(lam, gam, 0, 0, 5)
        assert Deltas == [0, 1, 3, 4, 6, 7]
        assert deltas == [1, 2, 1, 2, 1]

    def test_increments_stay_in_k_range(self):
        """Test every δ_i is K − 1 or K."""
        lam, gam = AdaptiveReal.from_int(3), AdaptiveReal.from_int(2)
        _, deltas = delta_sequence(lam, gam, Fraction(2, 7), -4, 20)
        assert set(deltas) <= {1, 2}

    def test_row_tie_accepted_by_default(self):
        """Test γ^0 = e^0 λ^0 takes the half-open floor."""
        lam, gam = AdaptiveReal.from_int(3), AdaptiveReal.from_int(2)
        Deltas, _ = delta_sequence(lam, gam, 0, 0, 1, reject_ties=False)
        assert Deltas[0] == 0

    def test_row_tie_rejected(self):
        """Test an exact row tie raises when ties are rejected."""
        lam, gam = AdaptiveReal.from_int(3), AdaptiveReal.from_int(2)
        with pytest.raises(DegenerateOffset) as exc_info:
            delta_sequence(lam, gam, 0, 0, 1, reject_ties=True)
        assert str(exc_info.value) == 'Offsets produce an exact tie at row 0: γ^0 = e^d λ^0'


class TestOverlayOrbit:
    """Test cases for overlay_orbit."""

    @pytest.mark.parametrize('c,d', OFFSETS)
    def test_validates_for_rational_offsets(self, ternary_over_binary, c, d):
        """Test an overlay window passes every independent check."""
        window = overlay_orbit(ternary_over_binary, 8, c, d, 40)
        report = validate_window(window)
        assert report.ok, report.failures
        assert window.kind == 'overlay'
        assert window.height == 8

    def test_rows_use_one_delta(self, ternary_over_binary):
        """Test each overlay row carries the δ of its row correspondence."""
        window = overlay_orbit(ternary_over_binary, 6, Fraction(1, 10), Fraction(1, 20), 40)
        for row, g in zip(window.rows, window.geometry):
            assert {x.delta for x in row.letters} == {g.delta}

    def test_alpha_labels_follow_the_base_orbit(self, ternary_over_binary):
        """Test the α-labels of a ternary overlay are all the base letter."""
        window = overlay_orbit(ternary_over_binary, 4, Fraction(1, 3), Fraction(1, 5), 40)
        assert {x.alpha for row in window.rows for x in row.letters} == {'0'}

    def test_nabla_is_increasing(self, ternary_over_binary):
        """Test ∇ is strictly increasing along every row."""
        window = overlay_orbit(ternary_over_binary, 6, Fraction(2, 7), Fraction(5, 11), 40)
        for g in window.geometry:
            assert all(a < b for a, b in zip(g.nabla, g.nabla[1:]))

    def test_covering_inequality(self, ternary_over_binary):
        """Test sampled windows satisfy the η/ν length bracket."""
        window = overlay_orbit(ternary_over_binary, 6, Fraction(1, 10), Fraction(1, 20), 40)
        assert check_useful_inequality(window, 200) == []

    def test_pq_over_binary(self, pq55, binary):
        """Test a {5,5} overlay over the binary system validates."""
        ov = enumerate_alphabet(pq55, binary)
        window = overlay_orbit(ov, 4, Fraction(1, 10), Fraction(1, 20), 60)
        report = validate_window(window)
        assert report.ok, report.failures

    def test_column_zero_tie_at_c_zero(self, ternary_over_binary):
        """Test c = 0 puts the left edge of cell (0, 0) on a ℬ-tile edge."""
        with pytest.raises(DegenerateOffset) as exc_info:
            overlay_orbit(ternary_over_binary, 4, Fraction(0), Fraction(1, 3), 40)
        assert str(exc_info.value) == (
            'Offsets produce an exact tie at cell (0, 0): e^-d U + c meets a ℬ-tile edge'
        )

    @pytest.mark.parametrize('d', [Fraction(-1, 4), Fraction(-5, 7), Fraction(-3, 2)])
    def test_negative_d_starts_above_row_zero(self, ternary_over_binary, d):
        """Test d < 0 lays row 0 over a ℬ-row with negative index."""
        window = overlay_orbit(ternary_over_binary, 8, Fraction(1, 2), d, 40)
        assert window.geometry[0].Delta < 0
        report = validate_window(window)
        assert report.ok, report.failures

    def test_seeded_offsets(self, ternary_over_binary):
        """Test seeded rational offsets, half with d < 0, give valid aperiodic windows."""
        rng = random.Random(11)
        built = 0
        for k in range(24):
            c = Fraction(rng.randint(-40, 40), rng.randint(7, 29))
            d = Fraction(rng.randint(1, 40), 23) * (-1 if k % 2 else 1)
            try:
                window = overlay_orbit(ternary_over_binary, 8, c, d, 40)
            except DegenerateOffset:
                continue
            report = validate_window(window)
            assert report.ok, (c, d, report.failures)
            assert check_useful_inequality(window, 50) == [], (c, d)
            assert period_search(window, 4) == [], (c, d)
            built += 1
        assert built >= 20

    def test_row_offsets_metadata(self, ternary_over_binary):
        """Test one S_i per row, all zero since column 0 is always a first child."""
        window = overlay_orbit(ternary_over_binary, 6, Fraction(2, 7), Fraction(5, 11), 40)
        offsets = window.metadata['row_offsets']
        assert len(offsets) == window.height
        assert all(float(s) == 0 for s in offsets)

    def test_metadata(self, ternary_over_binary):
        """Test the window records its offsets and K."""
        window = overlay_orbit(ternary_over_binary, 3, Fraction(1, 3), Fraction(1, 5), 30)
        assert window.metadata['c'] == '1/3'
        assert window.metadata['d'] == '1/5'
        assert window.metadata['K'] == 2
        assert set(window.metadata['systems']) == {'a', 'b'}


class TestOverlayJson:
    """Test cases for saving overlay windows."""

    def test_round_trip(self, ternary_over_binary):
        """Test dumping a reloaded overlay window reproduces the same text."""
        window = overlay_orbit(ternary_over_binary, 4, Fraction(1, 10), Fraction(1, 20), 40)
        text = dumps_window(window)
        assert dumps_window(loads_window(text)) == text

    def test_restore_system(self, ternary_over_binary):
        """Test a reloaded overlay window gets its overlay alphabet back."""
        window = overlay_orbit(ternary_over_binary, 4, Fraction(1, 10), Fraction(1, 20), 40)
        restored = restore_system(loads_window(dumps_window(window)))
        assert restored.system.letters == ternary_over_binary.letters
        assert validate_window(restored).ok


class TestProjection:
    """Test cases for the α-projection and the ≈_N check of produced rows."""

    @pytest.fixture
    def window(self, ternary_over_binary):
        return overlay_orbit(ternary_over_binary, 5, Fraction(2, 7), Fraction(5, 11), 40)

    def test_project_alpha_is_a_base_orbit(self, window, ternary_over_binary):
        """Test the α-labels form a valid orbit window of the first system."""
        projected = project_alpha(window)
        assert projected.kind == 'base'
        assert [r.letters for r in projected.rows] == [tuple(x.alpha for x in r.letters) for r in window.rows]
        assert validate_window(projected, ternary_over_binary.sys_a).ok

    def test_children_match_the_image(self, window, ternary_over_binary):
        """Test every core column is produced by its parent and ≈_N its ς^δ image."""
        checked = 0
        for upper in window.rows[:-1]:
            lower = window.row(upper.i + 1)
            for j in range(*upper.core):
                children = window.children(upper.i, j)
                word = lower.slice(children.start, children.stop)
                assert is_production(ternary_over_binary, upper.at(j), word)
                assert verify_property3(ternary_over_binary, (upper.at(j),), word).ok
                checked += 1
        assert checked > 0

    def test_empty_words(self, window, ternary_over_binary):
        """Test an empty word never passes."""
        report = verify_property3(ternary_over_binary, (), window.rows[0].letters[:1])
        assert not report.ok
        assert report.index == 0
