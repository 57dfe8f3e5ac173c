import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from robba_lab.errors import PreconditionError, SchemaError
from robba_lab.mw import (
    MWCert, MWElement, embed_into_robba, ideal_member, mw_add, mw_frobenius, mw_mul, order,
    order_certificate, quotient_rep, weierstrass_divide, weierstrass_prepare,
)
from robba_lab.padic import LogNorm
from robba_lab.robba import RobbaElement

from gen import below_floor, random_division_pair

P = 5
x = MWElement(P, {(1, 0): 1})


def M(coeffs):
    return MWElement.x_poly(coeffs, P)


def test_order_examples():
    assert order(x + P) == 1
    assert order(M([1, P])) == 0
    assert order(M([P, 1, 0, P * P])) == 1
    assert order(MWElement(P, {})) is None


def test_order_certificate_gap():
    cert = order_certificate(MWElement(P, {(0, 0): 1, (1, -1): P}), 0)
    assert cert["w_k"] == 0 and cert["gap"] > 0


def test_divide_x_squared_by_x_plus_p():
    d = weierstrass_divide(x * x, x + P)
    assert d["q"] == M([-P, 1])
    assert d["r"] == M([P * P])


def test_divide_by_itself():
    g = x + P
    d = weierstrass_divide(g, g)
    assert d["q"] == M([1]) and d["r"].is_zero()


def test_unit_inverse_by_division():
    u = M([1, P, 0, P])
    d = weierstrass_divide(M([1]), u)
    res = M([1]) - d["q"] * u
    assert below_floor(res.eta_rho_norm(d["alpha"], d["beta"]))


def test_preparation():
    f = (x + P) * (1 + x.scale(P))
    pr = weierstrass_prepare(f)
    assert pr["h"].poly == {(0, 0): P, (1, 0): 1}
    assert (f - pr["u"] * pr["h"]).eta_rho_norm(pr["alpha"], pr["beta"]).w >= 20


def test_ideal_membership():
    g = x + P
    assert ideal_member(g * M([1, 2, 3]), g)
    assert not ideal_member(M([1]), g)


def test_embedding_and_quotient():
    y = embed_into_robba(x * x + 1)
    assert y == RobbaElement(P, {(-2, 0): 1, (0, 0): 1}, jmin=-2, jmax=0)
    h = RobbaElement(P, {(2, 0): 3, (-1, 0): 1, (0, 1): 2})
    q = quotient_rep(h)
    assert q.poly == {(2, 0): 3}


def test_embedding_certificate_halves_beta():
    f = MWElement(P, {(0, 0): 1}, MWCert(Fraction(1), Fraction(1, 2), Fraction(-3)))
    c = embed_into_robba(f).cert
    assert (c.alpha, c.s, c.C, c.delta) == (1, Fraction(1, 4), -3, Fraction(1, 4))


def test_frobenius():
    assert mw_frobenius(x + P) == MWElement(P, {(P, 0): 1, (0, 0): P})


def test_undecidable_order_is_refused():
    f = MWElement(P, {(0, 0): P}, MWCert(Fraction(1), Fraction(1), Fraction(0)))
    with pytest.raises(PreconditionError):
        order(f)


def test_json_round_trip():
    f = MWElement(P, {(0, 0): 1, (2, -1): P}, MWCert(Fraction(1, 2), Fraction(1, 4), Fraction(-7)))
    g = MWElement.from_json(f.to_json())
    assert g == f
    doc = f.to_json()
    doc["cert"] = {"alpha": "1"}
    with pytest.raises(SchemaError):
        MWElement.from_json(doc)


def test_random_divisions_have_small_residual():
    rng = random.Random(11)
    for _ in range(10):
        f, g, k = random_division_pair(rng, P)
        d = weierstrass_divide(f, g)
        assert d["k"] == k
        assert d["r"].degree < k
        res = f - (d["q"] * g + d["r"])
        assert below_floor(res.eta_rho_norm(d["alpha"], d["beta"]))


polys = st.lists(st.integers(-20, 20), min_size=1, max_size=5)


@settings(max_examples=100, deadline=None)
@given(polys, polys)
def test_embedding_is_a_ring_map(a, b):
    f, g = M(a), M(b)
    assert embed_into_robba(mw_mul(f, g)).poly == (embed_into_robba(f) * embed_into_robba(g)).poly
    assert embed_into_robba(mw_add(f, g)).poly == (embed_into_robba(f) + embed_into_robba(g)).poly


@settings(max_examples=100, deadline=None)
@given(polys, polys)
def test_derivative_leibniz(a, b):
    f, g = M(a), M(b)
    assert (f * g).derivative() == f.derivative() * g + f * g.derivative()
