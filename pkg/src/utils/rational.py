"""Exact probability helpers built on ``fractions.Fraction``."""

from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Annotated, Any

from pydantic import PlainSerializer, PlainValidator

from src.constants import PRISM_SIGNIFICANT_DIGITS

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def as_fraction(value: Any) -> Fraction:
    """
    Coerce a probability-like value into a Fraction.

    Accepts Fractions, ints and strings such as ``"3/8"`` or ``"0.125"``.
    Floats are rejected to keep arithmetic exact.

    Raises:
        ValueError: If the value is not exact or lies outside [0, 1]
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"Probabilities must be exact, got {value!r}")
    if isinstance(value, Fraction):
        result = value
    elif isinstance(value, int | str):
        try:
            result = Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Not a rational probability: {value!r}") from e
    else:
        raise ValueError(f"Not a rational probability: {value!r}")

    if not ZERO <= result <= ONE:
        raise ValueError(f"Probability out of range [0, 1]: {result}")
    return result


ExactProb = Annotated[
    Fraction,
    PlainValidator(as_fraction),
    PlainSerializer(lambda p: f"{p.numerator}/{p.denominator}", return_type=str, when_used="json"),
]
"""Exact probability field type for pydantic models."""


def is_dyadic(value: Fraction) -> bool:
    """Return True if the denominator is a power of two."""
    denominator = value.denominator
    return denominator & (denominator - 1) == 0


def to_decimal_string(value: Fraction, digits: int = PRISM_SIGNIFICANT_DIGITS) -> str:
    """
    Render a Fraction as a decimal literal with ``digits`` significant digits.

    Examples:
        >>> to_decimal_string(Fraction(1, 8))
        '0.125'
        >>> to_decimal_string(Fraction(1, 3))
        '0.333333333333'
    """
    if value == 0:
        return "0"
    with localcontext() as ctx:
        ctx.prec = digits
        quotient = Decimal(value.numerator) / Decimal(value.denominator)
    text = format(quotient, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    return text


def complement_power(p: Fraction, n: int) -> Fraction:
    """Return 1 - (1 - p)**n."""
    return ONE - (ONE - p) ** n
