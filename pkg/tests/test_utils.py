"""
Unit tests for utility functions.

Tests file validation and probability formatting.
"""

from fractions import Fraction

from cpcause.utils import (
    format_decimal,
    format_probability,
    format_rational,
    validate_input_file,
)


class TestFileValidation:
    """Test file validation functions"""

    def test_validate_existing_file(self, tmp_path):
        """Test validation of existing file"""
        path = tmp_path / "pens.cp"
        path.write_text("prof:0.7 <- .\n")
        assert validate_input_file(path) is True

    def test_validate_nonexistent_file(self, tmp_path):
        """Test validation of non-existent file"""
        assert validate_input_file(tmp_path / "missing.cp") is False

    def test_validate_directory_not_file(self, tmp_path):
        """Test validation fails for directory"""
        assert validate_input_file(tmp_path) is False

    def test_validate_empty_file(self, tmp_path):
        """Test validation of empty file (an empty theory is still a theory)"""
        path = tmp_path / "empty.cp"
        path.touch()
        assert validate_input_file(path) is True


class TestProbabilityFormatting:
    """Test exact probability rendering"""

    def test_terminating_decimals(self):
        assert format_probability(Fraction(7, 10)) == "0.7"
        assert format_probability(Fraction(1, 100)) == "0.01"
        assert format_probability(Fraction(1, 8)) == "0.125"
        assert format_probability(Fraction(14, 25)) == "0.56"

    def test_integers(self):
        assert format_probability(Fraction(1)) == "1"
        assert format_probability(Fraction(0)) == "0"

    def test_non_terminating_stays_a_fraction(self):
        assert format_probability(Fraction(1, 3)) == "1/3"
        assert format_probability(Fraction(2, 7)) == "2/7"

    def test_round_trips_exactly(self):
        """Test the rendering parses back to the same value"""
        for value in (Fraction(3, 40), Fraction(999, 1000), Fraction(1, 1024)):
            assert Fraction(format_probability(value)) == value


class TestDecimalFormatting:
    """Test decimal renderings shown next to exact values"""

    def test_six_significant_digits(self):
        assert format_decimal(Fraction(14, 25)) == "0.56"
        assert format_decimal(Fraction(1, 3)) == "0.333333"
        assert format_decimal(Fraction(0)) == "0"

    def test_custom_digits(self):
        assert format_decimal(Fraction(2, 3), digits=3) == "0.667"

    def test_rational_with_decimal(self):
        assert format_rational(Fraction(14, 25)) == "14/25 (0.56)"
        assert format_rational(Fraction(99, 100)) == "99/100 (0.99)"
