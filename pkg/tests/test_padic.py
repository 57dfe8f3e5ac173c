from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from robba_lab.errors import PreconditionError, SchemaError
from robba_lab.padic import (
    BOTTOM, LogNorm, PadicScalar, format_rational, lognorm_of, parse_rational,
    scalar_add, scalar_inv, scalar_mul, teichmuller_roots,
)


def S(n, p=5, N=3):
    return PadicScalar.from_int(n, p, N)


def test_additive_inverse_is_certified_zero():
    z = scalar_add(S(5), S(-5))
    assert z.is_zero
    assert z.abs_prec == 4


def test_distinct_valuations_add_exactly():
    x = scalar_add(S(1), S(5))
    assert (x.v, x.u, x.N) == (0, 6, 3)


def test_cancellation_loses_precision():
    # oracle: 1 + 24 = 25 known modulo 5^3 only
    x = scalar_add(S(1), S(24))
    assert x.v == 2
    assert x.abs_prec == 3
    assert (x.u, x.N) == (1, 1)


def test_mul_and_inverse():
    assert scalar_inv(S(1)).equals(S(1))
    pp = scalar_mul(S(5), S(5))
    assert (pp.v, pp.u) == (2, 1)
    inv = scalar_inv(PadicScalar.from_int(6, 5, 4))
    assert inv.u == pow(6, -1, 5 ** 4)


def test_inverse_of_zero_refused():
    with pytest.raises(PreconditionError):
        scalar_inv(PadicScalar.zero(5, 3))


def test_lognorm_normalisation():
    assert lognorm_of(S(5)) == LogNorm(1)
    assert lognorm_of(S(1)) == LogNorm(0)
    assert lognorm_of(PadicScalar.from_rational(Fraction(3, 5), 5, 4)) == LogNorm(-1)
    assert lognorm_of(PadicScalar.zero(5, 3)) is BOTTOM


def test_prime_mismatch():
    with pytest.raises(SchemaError):
        scalar_add(S(1, 5), S(1, 3))


def test_json_round_trip():
    x = PadicScalar.from_rational(Fraction(7, 25), 5, 6)
    assert PadicScalar.from_json(x.to_json()).equals(x)
    with pytest.raises(SchemaError):
        PadicScalar.from_json({"v": 0, "u": "1", "N": 3})


def test_rationals_format_and_parse():
    assert format_rational(Fraction(-3, 4)) == "-3/4"
    assert parse_rational("-3/4") == Fraction(-3, 4)
    assert parse_rational(7) == 7
    with pytest.raises(SchemaError):
        parse_rational(True)


def test_teichmuller_roots_are_roots_of_unity():
    roots = teichmuller_roots(4, 5, 6)
    assert len(roots) == 4
    for r in roots:
        assert pow(r, 4, 5 ** 6) == 1


def test_lognorm_order_and_bottom():
    assert LogNorm(2) > LogNorm(1)
    assert BOTTOM > LogNorm(100)
    assert (LogNorm(1) + BOTTOM) is BOTTOM


nonzero = st.integers(-10 ** 6, 10 ** 6).filter(lambda n: n != 0)


@settings(max_examples=200, deadline=None)
@given(nonzero, nonzero, st.sampled_from([2, 3, 5]))
def test_lognorm_is_multiplicative_and_ultrametric(a, b, p):
    x, y = PadicScalar.from_int(a, p, 8), PadicScalar.from_int(b, p, 8)
    assert lognorm_of(x * y) == lognorm_of(x) + lognorm_of(y)
    s = x + y
    lo = min(lognorm_of(x), lognorm_of(y))
    assert lognorm_of(s) >= lo
    if lognorm_of(x) != lognorm_of(y):
        assert lognorm_of(s) == lo


@settings(max_examples=300, deadline=None)
@given(nonzero, st.integers(1, 10 ** 4), st.sampled_from([2, 3, 5]))
def test_double_inverse(n, d, p):
    x = PadicScalar.from_rational(Fraction(n, d), p, 6)
    assert x.inverse().inverse().equals(x)
