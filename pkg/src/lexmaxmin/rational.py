"""Parsing and formatting of exact rationals."""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable

from .errors import MalformedInstance

_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(value, field=None) -> Fraction:
    """Convert an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are rejected: they are not exact, and silently rounding them would
    defeat the point of the exact core.
    """
    if isinstance(value, bool):
        raise MalformedInstance(f"expected a rational, got {value!r}", field=field)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL.match(value)
        if m is None:
            raise MalformedInstance(f"cannot parse {value!r} as 'p/q'", field=field)
        num, den = int(m.group(1)), int(m.group(2) or 1)
        if den == 0:
            raise MalformedInstance(f"zero denominator in {value!r}", field=field)
        return Fraction(num, den)
    if isinstance(value, float):
        raise MalformedInstance(
            f"floating-point value {value!r} is not exact; write it as a 'p/q' string",
            field=field,
        )
    raise MalformedInstance(f"expected a rational, got {type(value).__name__}", field=field)


def to_json_rational(x: Fraction):
    """Integers stay JSON integers, everything else becomes a reduced ``"p/q"``."""
    x = Fraction(x)
    if x.denominator == 1:
        return x.numerator
    return f"{x.numerator}/{x.denominator}"


def fmt(x) -> str:
    return str(Fraction(x))


def fmt_vector(values: Iterable) -> str:
    return "(" + ", ".join(fmt(v) for v in values) + ")"


def parse_vector(text: str) -> tuple[Fraction, ...]:
    """Parse a vector literal such as ``"(1/10, 2/10, 3/10)"`` or ``"1/2,1/2"``."""
    body = text.strip()
    if body[:1] in "([" and body[-1:] in ")]":
        body = body[1:-1]
    parts = [p for p in body.split(",")]
    if not body.strip() or any(not p.strip() for p in parts):
        raise MalformedInstance(f"cannot parse vector literal {text!r}")
    return tuple(parse_rational(p.strip()) for p in parts)
