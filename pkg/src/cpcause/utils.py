"""
Utility functions for cpcause.
"""

from fractions import Fraction
from pathlib import Path


def _power_of_ten_scale(denominator: int) -> int | None:
    """Smallest k with denominator dividing 10**k, or None if no such k exists."""
    twos = fives = 0
    d = denominator
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return None
    return max(twos, fives)


def format_probability(value: Fraction) -> str:
    """
    Render an exact probability the way theory files write it.

    Terminating decimals are written as decimals (``7/10`` -> ``0.7``), everything
    else as a fraction (``1/3``). Parsing the result gives back exactly ``value``.
    """
    if value.denominator == 1:
        return str(value.numerator)
    scale = _power_of_ten_scale(value.denominator)
    if scale is None:
        return f"{value.numerator}/{value.denominator}"
    digits = value.numerator * (10**scale // value.denominator)
    sign = "-" if digits < 0 else ""
    text = str(abs(digits)).rjust(scale + 1, "0")
    return f"{sign}{text[:-scale]}.{text[-scale:]}"


def format_decimal(value: Fraction, digits: int = 6) -> str:
    """Decimal rendering with ``digits`` significant digits."""
    return f"{float(value):.{digits}g}"


def format_rational(value: Fraction, digits: int = 6) -> str:
    """Exact rational followed by its decimal rendering, e.g. ``14/25 (0.56)``."""
    return f"{value} ({format_decimal(value, digits)})"


def validate_input_file(path: Path) -> bool:
    """Validate that an input file exists and is a regular file"""
    return path.exists() and path.is_file()
