"""Exact scalars: rationals plus an explicit infinity token.

Distances live in Q>=0 together with ``INF``. Addition absorbs into ``INF``
and ``min(INF, x) == x``, so ordinary comparisons work unchanged.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union


class _Infinity:
    __slots__ = ()

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("lipsel.INF")

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True

    def __add__(self, other):
        if isinstance(other, (int, Fraction, _Infinity)):
            if not isinstance(other, _Infinity) and other < 0:
                raise ValueError("INF + negative is not used")
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other < 0:
                raise ValueError("negative multiple of INF")
            if other == 0:
                raise ValueError("0 * INF is undefined")
            return self
        if other is self:
            return self
        return NotImplemented

    __rmul__ = __mul__

    def __reduce__(self):
        return "INF"


INF = _Infinity()

Scalar = Union[Fraction, _Infinity]

_RAT = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


class RationalParseError(ValueError):
    pass


def is_inf(x) -> bool:
    return x is INF


def to_fraction(x) -> Fraction:
    """Coerce int / Fraction / "p/q" string to Fraction. Floats are rejected."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise RationalParseError(f"boolean is not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise RationalParseError(f"cannot interpret {x!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    m = _RAT.match(text)
    if not m:
        raise RationalParseError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise RationalParseError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def parse_scalar(text) -> Scalar:
    """Like :func:`to_fraction` but accepts the ``"inf"`` token."""
    if isinstance(text, str) and text.strip().lower() == "inf":
        return INF
    if text is INF:
        return INF
    return to_fraction(text)


def fmt(x) -> str:
    """Canonical string form: ``"p/q"``, ``"n"`` or ``"inf"``."""
    if x is INF:
        return "inf"
    x = to_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def fmt_vec(v: Iterable) -> list:
    return [fmt(c) for c in v]


def vec(values: Iterable) -> tuple:
    return tuple(to_fraction(c) for c in values)


def primitive(values: Sequence[Fraction]) -> tuple:
    """Scale a nonzero rational vector to the primitive integer vector with the same direction."""
    den = 1
    for c in values:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in values]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if g == 0:
        return tuple(Fraction(0) for _ in ints)
    return tuple(Fraction(c // g) for c in ints)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def sub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def add(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def scale(t, a: Sequence) -> tuple:
    return tuple(t * x for x in a)
