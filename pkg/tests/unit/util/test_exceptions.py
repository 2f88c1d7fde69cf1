"""Unit tests for custom exceptions."""

import pytest

from orbitile.util.exceptions import (
    BadParameters,
    BoundaryEdge,
    BoundaryVertex,
    DegenerateOffset,
    InconsistentCycle,
    IndeterminateComparison,
    NotExpansive,
    NotPrimitive,
    OrbitileError,
    SystemParseError,
    UnknownLetter,
    WindowTooNarrow,
    WindowValidationError,
)


class TestCustomExceptions:
    """Test cases for custom exception classes."""

    def test_base_error_default(self):
        """Test OrbitileError with default message."""
        assert str(OrbitileError()) == 'orbitile operation failed'

    def test_system_parse_error_with_line(self):
        """Test SystemParseError with a line number."""
        error = SystemParseError(3, "expected 'letter X -> ...'")
        assert str(error) == "Substitution file line 3: expected 'letter X -> ...'"

    def test_system_parse_error_without_line(self):
        """Test SystemParseError without a line number."""
        assert str(SystemParseError(reason='the alphabet is empty')) == 'Substitution file: the alphabet is empty'
        assert str(SystemParseError()) == 'Malformed substitution file'

    def test_unknown_letter(self):
        """Test UnknownLetter names the letter."""
        assert str(UnknownLetter('z')) == "Letter 'z' is not in the alphabet"
        assert str(UnknownLetter()) == 'Letter is not in the alphabet'

    def test_not_primitive_and_not_expansive(self):
        """Test the validity errors name the system."""
        assert str(NotPrimitive('swap')) == "Substitution system 'swap' is not primitive"
        assert str(NotExpansive('id')) == "Substitution system 'id' is not expansive"
        assert str(NotExpansive()) == 'Substitution system is not expansive'

    def test_indeterminate_comparison(self):
        """Test IndeterminateComparison with and without a subject."""
        assert str(IndeterminateComparison(256, 'λ vs γ')) == 'Could not decide λ vs γ within 256 bits'
        assert str(IndeterminateComparison(256)) == 'Comparison undecided at the 256-bit budget'
        assert str(IndeterminateComparison()) == 'Comparison undecided at the bit budget'

    def test_degenerate_offset(self):
        """Test DegenerateOffset names the tie."""
        assert str(DegenerateOffset('row 0')) == 'Offsets produce an exact tie at row 0'
        assert str(DegenerateOffset()) == 'Offsets produce an exact tie'

    def test_window_too_narrow(self):
        """Test WindowTooNarrow with a reason."""
        assert str(WindowTooNarrow('row 3 is empty')) == 'Orbit window too narrow: row 3 is empty'

    def test_boundary_errors(self):
        """Test the patch boundary errors name the vertex or edge."""
        assert str(BoundaryVertex((0, 1))) == 'Vertex (0, 1) is too close to the patch boundary'
        assert str(BoundaryEdge(((0, 1), (0, 2)))) == (
            'Edge ((0, 1), (0, 2)) does not have both faces inside the patch'
        )

    def test_inconsistent_cycle(self):
        """Test InconsistentCycle with and without a reason."""
        assert str(InconsistentCycle([(1, 0), (1, 1)], 'dy does not sum to zero')) == (
            'Inconsistent cycle [(1, 0), (1, 1)]: dy does not sum to zero'
        )
        assert str(InconsistentCycle()) == 'Inconsistent cycle'

    def test_bad_parameters(self):
        """Test BadParameters with and without a reason."""
        assert str(BadParameters(4, 5)) == '{p,q} = {4,5} requires p >= 5 and q >= 5'
        assert str(BadParameters(5, 5, 'no ℬ-system')) == '{p,q} = {5,5}: no ℬ-system'
        assert str(BadParameters()) == '{p,q} requires p >= 5 and q >= 5'

    def test_window_validation_error(self):
        """Test WindowValidationError carries the report summary."""
        assert str(WindowValidationError('2 failures')) == 'Orbit window failed validation: 2 failures'

    @pytest.mark.parametrize(
        'error',
        [SystemParseError(), UnknownLetter(), DegenerateOffset(), WindowTooNarrow(), BadParameters()],
    )
    def test_inheritance(self, error):
        """Test every error is an OrbitileError."""
        assert isinstance(error, OrbitileError)
        assert isinstance(error, Exception)
