from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from robba_lab.errors import PreconditionError, SchemaError
from robba_lab.laurent import OCLaurent
from robba_lab.padic import BOTTOM, LogNorm
from robba_lab.residue import FpLaurent, ResidueDoubleSeries
from robba_lab.robba import (
    RobbaCert, RobbaElement, aux_norm_Rs, decompose, eisenstein_relation, eta_s_norm, hensel_lift_int,
    inclusion, int_unit_invert, lift_residue, recompose, robba_add, robba_mul, substitute, trace_map,
)

P = 5


def R(poly, p=P, **kw):
    return RobbaElement(p, poly, **kw)


def test_y_times_inverse_y():
    assert robba_mul(R({(1, 0): 1}), R({(-1, 0): 1})) == R({(0, 0): 1})


def test_add_is_exact_on_windows():
    f, g = R({(1, 0): 2, (-2, 3): 1}), R({(1, 0): -2})
    assert robba_add(f, g) == R({(-2, 3): 1}, jmax=1)


def test_eta_s_norm_two_sided():
    f = R({(2, 0): 1, (-1, 0): 1})
    # weight min(0 + 2s, 0 - s) = -s
    assert eta_s_norm(f, 1, Fraction(1, 2)) == LogNorm(Fraction(-1, 2))
    with pytest.raises(PreconditionError):
        eta_s_norm(f, 1, 0)


def test_aux_norm_value():
    # y^-1 at s = 1, c = 1/4: -s - c = -5/4
    assert aux_norm_Rs(R({(-1, 0): 1}), 1, 1, Fraction(1, 4)) == LogNorm(Fraction(-5, 4))


def test_certificate_bounds_norm():
    f = R({(0, 0): 1}, cert=RobbaCert(Fraction(1), Fraction(1), Fraction(-3), Fraction(0)))
    assert f.eta_s_norm(1, 1) == LogNorm(0)
    g = R({(0, 0): 25}, cert=RobbaCert(Fraction(1), Fraction(1), Fraction(-1), Fraction(0)))
    assert g.eta_s_norm(1, 1) == LogNorm(1)
    with pytest.raises(PreconditionError):
        g.eta_s_norm(1, 2)


def test_hensel_trivial():
    out = hensel_lift_int([R({})], W=8)
    assert out["root"].poly == {(0, 0): 1}


def test_hensel_pattern_and_envelope():
    a2 = R({(1, -1): P})
    out = hensel_lift_int([a2], W=8)
    root = out["root"]
    # sign corrected: root of X^2 - X + a is 1 - a - a^2 - 2a^3 - 5a^4 ...
    assert root.poly[(0, 0)] == 1
    assert root.poly[(1, -1)] == -P
    assert root.poly[(2, -2)] == -P ** 2
    assert root.poly[(3, -3)] == -2 * P ** 3
    assert root.poly[(4, -4)] == -5 * P ** 4
    log = out["log"]
    w0 = log[0]["w"].w
    for entry in log:
        assert entry["w"].w >= 2 ** entry["n"] * w0 or entry["w"].w >= 8
    resid = root * root - root + a2
    assert resid.eta_s_norm(out["alpha"], out["s"]).w >= 8


def test_hensel_rejects_non_divisible_coefficient():
    with pytest.raises(PreconditionError):
        hensel_lift_int([R({(1, 0): 1})])


def test_int_unit_invert():
    a = R({(0, 0): 1, (1, -1): 1, (2, -3): P})
    inv = int_unit_invert(a, W=10)
    assert (a * inv - 1).eta_s_norm(inv.cert.alpha, inv.cert.s).w >= 10


def test_substitute_power_series():
    u = R({(1, 0): 1}, var="u")
    g = u * u * (1 + u)
    f = R({(j, -j): 1 for j in range(4)})
    out = substitute(f, g)
    # oracle: expand sum_j t^-j (u^2 + u^3)^j by hand
    expect = R({(0, 0): 1}, var="u")
    gj = R({(0, 0): 1}, var="u")
    for j in range(1, 4):
        gj = gj * g
        expect = expect + gj * R({(0, -j): 1}, var="u")
    assert out == expect


def test_substitute_two_sided_has_certificate():
    u = R({(1, 0): 1}, var="u")
    g = u * u * (1 + u)
    f = R({(j, -j): 1 for j in range(-2, 3)})
    log = []
    out = substitute(f, g, W=6, log=log)
    assert out.cert is not None and out.cert.C == -4


def test_trace_of_one_and_inclusion():
    one = R({(0, 0): 1}, var="u")
    assert trace_map(one, 4) == R({(0, 0): 4})
    f = R({(1, 0): 3, (-1, 2): 1})
    assert trace_map(inclusion(f, 4), 4) == f.scale(4)


def test_decompose_recompose():
    F = R({(k, 0): k + 1 for k in range(-3, 6)}, var="u")
    parts = decompose(F, 2)
    assert recompose(parts, 2) == F


def test_eisenstein_relation_kummer():
    one = OCLaurent.constant(1, P)
    out = eisenstein_relation([one], 2, 3)
    c0 = out["c"][0]
    assert c0[1].window_poly() == {0: -1}


def test_eisenstein_relation_residue_matches_lift():
    p = P
    o = FpLaurent.one(p)
    res = eisenstein_relation([o, o], 2, 4)
    assert all(r.is_zero() for r in res["residuals"])
    lifted = eisenstein_relation([OCLaurent.constant(1, p), OCLaurent.constant(1, p)], 2, 4)
    for k in range(2):
        for a, b in zip(res["c"][k], lifted["c"][k]):
            red = {i: int(c) % p for i, c in b.window_poly().items() if int(c) % p}
            assert a.coeffs == red
    assert all(w.is_bottom or w.w >= 20 for w in lifted["residual_weights"])


def test_lift_residue_round_trip():
    p = P
    fbar = ResidueDoubleSeries.from_dict(p, {0: FpLaurent.one(p), 2: FpLaurent.monomial(3, -1, p)}, 1, 0)
    f = lift_residue(fbar)
    assert f.integral
    back = f.reduce_mod_pi()
    assert back.coeff(2).coeffs == {-1: 3}


def test_json_round_trip_and_schema():
    a = R({(0, 0): 1, (1, -1): 1, (2, -3): P})
    assert RobbaElement.from_json(a.to_json()) == a
    c = R({(0, 0): 1}, cert=RobbaCert(Fraction(1, 2), Fraction(1), Fraction(-3), Fraction(0)))
    assert RobbaElement.from_json(c.to_json()).cert == c.cert
    doc = a.to_json()
    doc["bogus"] = 0
    with pytest.raises(SchemaError):
        RobbaElement.from_json(doc)


terms = st.dictionaries(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.integers(-30, 30).filter(bool),
                        min_size=1, max_size=5)


@settings(max_examples=100, deadline=None)
@given(terms, terms, terms)
def test_ring_axioms_on_windows(a, b, c):
    f, g, h = R(a), R(b), R(c)
    assert (f * (g + h)).poly == (f * g + f * h).poly
    assert (f * g).poly == (g * f).poly


@settings(max_examples=100, deadline=None)
@given(terms, terms)
def test_leibniz_for_derivative(a, b):
    f, g = R(a), R(b)
    assert (f * g).derivative().poly == (f.derivative() * g + f * g.derivative()).poly


@settings(max_examples=100, deadline=None)
@given(terms, terms)
def test_frobenius_is_multiplicative(a, b):
    f, g = R(a), R(b)
    assert (f * g).frobenius().poly == (f.frobenius() * g.frobenius()).poly
