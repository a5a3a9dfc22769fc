"""Exact half-up rounding helpers shared by every report writer."""

from decimal import Decimal
from fractions import Fraction
import math


def round_half_up(value, places):
    """Round ``value`` to ``places`` decimals, ties away from zero.

    ``value`` may be an int, a :class:`~fractions.Fraction` or a float.
    Floats are taken at their shortest repr so ``0.125`` rounds like the
    decimal literal a reader sees. Returns a :class:`~decimal.Decimal`
    carrying exactly ``places`` digits after the point.
    """
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"cannot round non-finite value {value!r}")
        value = Fraction(repr(value))
    else:
        value = Fraction(value)
    scale = 10 ** places
    sign = -1 if value < 0 else 1
    scaled = math.floor(abs(value) * scale + Fraction(1, 2)) * sign
    return Decimal(scaled).scaleb(-places)


def fmt_fixed(value, places):
    return str(round_half_up(value, places))


def fmt_trimmed(value, places):
    """Fixed-point rendering with trailing zeros (and a bare point) removed."""
    text = fmt_fixed(value, places)
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return "0" if text == "-0" else text


def percent(count, total):
    """Exact percentage ``100 * count / total`` as a Fraction."""
    if total <= 0:
        raise ZeroDivisionError("percentage of an empty population")
    return Fraction(100 * count, total)
