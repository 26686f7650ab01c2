"""Exact rational helpers.

All times, distances and dual values in the package are ``fractions.Fraction``.
This module only adds the textual boundary: strict parsing and the canonical
``p/q`` rendering used by every file format.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

Rational = Fraction

_INT = re.compile(r"-?[0-9]+")
_FRAC = re.compile(r"(-?[0-9]+)/([0-9]+)")
_DEC = re.compile(r"(-?)([0-9]+)\.([0-9]+)")

RationalLike = Union[Fraction, int, str]


class RationalParseError(ValueError):
    pass


def parse_rational(text: str) -> Fraction:
    """Parse ``"-7"``, ``"3/6"`` or ``"0.25"`` into an exact Fraction.

    Decimals are scaled by a power of ten, never routed through float.
    """
    if not isinstance(text, str):
        raise RationalParseError(f"expected a string, got {type(text).__name__}")
    s = text.strip()
    if _INT.fullmatch(s):
        return Fraction(int(s))
    m = _FRAC.fullmatch(s)
    if m:
        den = int(m.group(2))
        if den == 0:
            raise RationalParseError(f"zero denominator in {text!r}")
        return Fraction(int(m.group(1)), den)
    m = _DEC.fullmatch(s)
    if m:
        sign, whole, frac = m.groups()
        value = Fraction(int(whole + frac), 10 ** len(frac))
        return -value if sign else value
    raise RationalParseError(f"malformed rational {text!r}")


def as_rational(value: RationalLike) -> Fraction:
    """Coerce int/Fraction/str to Fraction. Floats are rejected on purpose."""
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def render(x: Fraction | int) -> str:
    """Canonical text: ``p/q``, or ``p`` when q == 1."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def rational_arith(a: Fraction, b: Fraction, op: str):
    """Dispatch one exact operation; ``cmp`` returns -1, 0 or 1."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise ZeroDivisionError("rational division by zero")
        return a / b
    if op == "cmp":
        return (a > b) - (a < b)
    raise ValueError(f"unknown op {op!r}")
