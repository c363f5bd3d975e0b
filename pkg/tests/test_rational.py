from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lipsel.rational import INF, RationalParseError, fmt, parse_rational, parse_scalar, primitive, to_fraction

fractions = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 10**6)


def test_parse_forms():
    assert parse_rational("3") == 3
    assert parse_rational("-7/2") == Fraction(-7, 2)
    assert parse_rational(" 4 / 6 ") == Fraction(2, 3)


@pytest.mark.parametrize("bad", ["1/0", "1.5", "", "a/b", "1e3", "--1"])
def test_parse_rejects(bad):
    with pytest.raises(RationalParseError):
        parse_rational(bad)


def test_floats_and_bools_rejected():
    with pytest.raises(RationalParseError):
        to_fraction(0.5)
    with pytest.raises(RationalParseError):
        to_fraction(True)


def test_inf_token():
    assert parse_scalar("inf") is INF
    assert fmt(INF) == "inf"
    assert INF + 3 is INF
    assert min(INF, Fraction(2)) == 2
    assert Fraction(10**9) < INF
    assert not INF < INF
    with pytest.raises(ValueError):
        0 * INF


@given(fractions)
def test_fmt_roundtrip(q):
    assert parse_rational(fmt(q)) == q


@given(st.lists(fractions, min_size=1, max_size=5).filter(any))
def test_primitive_is_positive_multiple(v):
    p = primitive(v)
    assert all(c.denominator == 1 for c in p)
    nz = next(i for i, c in enumerate(v) if c)
    t = v[nz] / p[nz]
    assert t > 0
    assert all(a == t * b for a, b in zip(v, p))
