"""Rational parsing and rendering helpers shared by the library and the CLI."""

from decimal import Decimal, localcontext
from fractions import Fraction
from math import gcd

from .errors import ParseError


def as_fraction(value):
    """Coerce ints, Fractions and rational strings (``"7/5"``, ``"1.4"``)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        raise TypeError("floats are not accepted where exact rationals are required")
    return Fraction(value)


def parse_rational(text):
    s = text.strip()
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}", 0, text) from None


def fmt(q):
    """Exact ``p/q`` rendering (integers without a denominator)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def fmt_decimal(q, digits=12):
    q = Fraction(q)
    with localcontext() as ctx:
        ctx.prec = digits
        d = Decimal(q.numerator) / Decimal(q.denominator)
    return format(d, "g") if d != 0 else "0"


def lcm(a, b):
    return a // gcd(a, b) * b
