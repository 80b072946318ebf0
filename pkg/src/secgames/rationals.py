"""Exact rational helpers.

All arithmetic in this library runs on ``fractions.Fraction``: numerator and
denominator are always coprime, the denominator is positive, and every
operation is exact.  This module only adds the parse/format conventions used
by the JSON schemas and the CSV writer.
"""

from __future__ import annotations

from decimal import Decimal, localcontext, ROUND_HALF_EVEN
from fractions import Fraction

from .errors import GameFormatError

Rational = Fraction


def parse_rational(value: object, where: str = "value") -> Fraction:
    """Parse a JSON payload entry into an exact Fraction.

    Accepted forms: bare ints, "p/q" strings, decimal strings ("0.5", "-3").
    Bare floats are rejected: a float literal in a game file almost always
    means silently lost precision, so the loader insists on strings.
    """
    if isinstance(value, bool):
        raise GameFormatError(f"{where}: booleans are not numbers")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise GameFormatError(
            f"{where}: float {value!r} not accepted; write it as a string "
            f'like "{value}" or "p/q" to keep the value exact'
        )
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise GameFormatError(f"{where}: cannot parse {value!r} as a rational") from exc
    raise GameFormatError(f"{where}: expected int or string, got {type(value).__name__}")


def format_rational(x: Fraction) -> object:
    """Serialize exactly: bare int when integral, else a "p/q" string."""
    if x.denominator == 1:
        return int(x)
    return f"{x.numerator}/{x.denominator}"


def format_decimal(x: Fraction, significant: int = 6) -> str:
    """Render a rational as a decimal string with `significant` significant
    digits, round-half-even.  Used for the human-readable halves of reports
    and all CSV numeric cells."""
    if x == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = significant
        ctx.rounding = ROUND_HALF_EVEN
        d = Decimal(x.numerator) / Decimal(x.denominator)
    # Positional notation for moderate magnitudes, scientific otherwise.
    if -5 < d.adjusted() < significant + 6:
        text = format(d, "f")
        if "." in text:
            text = text.rstrip("0").rstrip(".")
        return text
    return str(d.normalize())
