"""Desk-scale acceptance battery; run with `pytest tests/test_acceptance.py -s` to see the summary lines."""

import random
import time
from contextlib import contextmanager
from fractions import Fraction

from robba_lab.laurent import epsnorm_select
from robba_lab.mw import MWElement, embed_into_robba, weierstrass_divide
from robba_lab.nabla import (
    base_change_compare, cohomology_unipotent, connection_apply, horizontal_sections, mw_cohomology,
    random_unipotent_module, strongly_unipotent_reduce, trivial_module, vector_weight,
)
from robba_lab.padic import BOTTOM
from robba_lab.residue import FpLaurent, ResidueDoubleSeries, catalan_mod, hensel_root_residue, \
    residue_invert, residue_membership
from robba_lab.robba import RobbaElement, hensel_lift_int, inclusion, substitute, trace_map

from gen import (
    below_floor, random_division_pair, random_eisenstein_instance, random_hensel_coeffs, random_oc,
    random_residue_series, random_robba,
)

SEED = 20240601


@contextmanager
def criterion(n, label):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"\nFAIL criterion {n}: {label}")
        raise
    print(f"\nPASS criterion {n}: {label} ({time.perf_counter() - start:.1f}s)")


def _suite():
    """50 strongly unipotent modules of rank <= 4, with primes kept above the gauge exponents."""
    rng = random.Random(SEED)
    out = []
    for _ in range(50):
        n = rng.randint(1, 4)
        p = rng.choice((5, 7)) if n > 2 else rng.choice((3, 5))
        out.append((p,) + random_unipotent_module(rng, p, n))
    return out


def test_criterion_1_hensel_envelope():
    with criterion(1, "Newton envelope w_n >= 2^n w_0 on 20 instances, < 10 s each"):
        rng = random.Random(SEED + 1)
        for _ in range(20):
            p = rng.choice((3, 5))
            a = random_hensel_coeffs(rng, p)
            start = time.perf_counter()
            out = hensel_lift_int(a, W=12)
            assert time.perf_counter() - start < 10
            log = out["log"]
            w0 = log[0]["w"]
            assert not w0.is_bottom and w0.w > 0
            for entry in log:
                w = entry["w"]
                assert w.is_bottom or w.w >= 12 or w.w >= 2 ** entry["n"] * w0.w


def _eval(P, x, n):
    acc = ResidueDoubleSeries.from_dict(x.p, {})
    for a in reversed(P):
        acc = (acc * x + a).truncate_y(n)
    return acc


def test_criterion_2_residue_hensel():
    with criterion(2, "residue Hensel bound -3ci+c and P(x) = 0 mod y^13 on 20 instances plus Catalan"):
        rng = random.Random(SEED + 2)
        for _ in range(20):
            p = rng.choice((3, 5, 7))
            P = random_eisenstein_instance(rng, p)
            out = hensel_root_residue(P, n=12)
            c = out["c"]
            for i, xi in enumerate(out["x"][1:], start=1):
                v = xi.valuation()
                assert v is None or v >= -3 * c * i + c
            # independent substitution: Horner evaluation of P at x, truncated at y^13
            x = ResidueDoubleSeries.from_dict(p, dict(enumerate(out["x"])))
            resid = _eval(P, x, 13)
            assert all(f.known_zero() for j, f in resid.rows().items() if j < 13)
        p = 3
        one = FpLaurent.one(p)
        P = [ResidueDoubleSeries.from_dict(p, {1: one}), ResidueDoubleSeries.from_dict(p, {0: -one}),
             ResidueDoubleSeries.from_dict(p, {0: one})]
        xs = hensel_root_residue(P, n=12)["x"]
        for i in range(1, 13):
            assert xs[i].coeffs == ({0: catalan_mod(i - 1, p)} if catalan_mod(i - 1, p) else {})


def test_criterion_3_weierstrass_division():
    with criterion(3, "Weierstrass division on 200 pairs with negative control"):
        rng = random.Random(SEED + 3)
        for n in range(200):
            p = rng.choice((3, 5, 7))
            f, g, k = random_division_pair(rng, p)
            d = weierstrass_divide(f, g)
            q, r, al, be = d["q"], d["r"], d["alpha"], d["beta"]
            assert d["k"] == k
            assert r.is_zero() or r.degree < k
            assert below_floor((f - (q * g + r)).eta_rho_norm(al, be))
            one = MWElement(p, {(0, 0): 1})
            if n % 2:
                bad = f - ((q + one) * g + r)
            else:
                bad = f - (q * g + r + one)
            assert not below_floor(bad.eta_rho_norm(al, be))


def test_criterion_4_growth_certificates():
    with criterion(4, "residue_invert growth bound and membership vs brute force on 200 inputs"):
        rng = random.Random(SEED + 4)
        for _ in range(200):
            p = rng.choice((3, 5, 7))
            f, c, d = random_residue_series(rng, p, rng.randint(2, 8))
            g = residue_invert(f, length=rng.randint(2, 10))
            for j, b in g.rows().items():
                v = b.valuation()
                assert v is None or j < 1 or -v <= (c + d) * j
            c2, d2 = rng.randint(0, 3), rng.randint(0, 3)
            brute = all(fj.valuation() is None or -fj.valuation() <= c2 * j + d2
                        for j, fj in f.rows().items())
            status, _ = residue_membership(f, c2, d2)
            assert (status == "accept") == brute


def test_criterion_5_base_change():
    with criterion(5, "base change dims agree on 50 modules, base cases (1,1) and (1,0), < 5 min"):
        start = time.perf_counter()
        for p, M, _, _ in _suite():
            rep = base_change_compare(M)
            assert rep["equal"] and rep["dagger"] == rep["E"]
        assert cohomology_unipotent(trivial_module("robba-E†", 5)).dims == (1, 1)
        assert mw_cohomology(trivial_module("mw-E†", 5)).dims == (1, 0)
        assert time.perf_counter() - start < 300


def test_criterion_6_horizontal_sections():
    with criterion(6, "horizontal sections: residual below floor, in image, monotone"):
        rng = random.Random(SEED + 6)
        for p, M, _, _ in _suite():
            red = strongly_unipotent_reduce(M)
            n = M.rank
            mp = [RobbaElement(p, {(k, 0): rng.randint(-3, 3) for k in range(-(p - 1), p)}) for _ in range(n)]
            m = []
            for i in range(n):
                acc = RobbaElement(p, {})
                for j in range(n):
                    acc = acc + red.T[i][j] * mp[j]
                m.append(acc)
            out = horizontal_sections(M, m, reduction=red)
            assert out["residual"] is BOTTOM or below_floor(out["residual"])
            assert out["in_image"] and out["monotone"]
            assert vector_weight(connection_apply(M, out["vector"])) is BOTTOM


def test_criterion_7_epsnorm():
    with criterion(7, "norm interpolation inequality on 500 pairs"):
        rng = random.Random(SEED + 7)
        for _ in range(500):
            p = rng.choice((3, 5, 7))
            f = random_oc(rng, p)
            alpha0 = Fraction(rng.randint(1, 6), rng.randint(1, 6))
            eps = Fraction(rng.randint(1, 8), 8)
            alpha, cert = epsnorm_select(f, alpha0, eps)
            assert alpha == eps * alpha0
            assert cert["w_alpha"] >= cert["rhs"]


def _power_series(rng, p, var):
    return RobbaElement(p, {(rng.randint(0, 4), rng.randint(-2, 2)): rng.randint(-9, 9) or 1
                            for _ in range(rng.randint(1, 4))}, var=var)


def test_criterion_8_homomorphisms():
    with criterion(8, "substitution, embedding, trace of inclusion, reduction mod p: 200 identities each"):
        rng = random.Random(SEED + 8)
        for _ in range(200):
            p = rng.choice((3, 5, 7))
            f1, f2 = _power_series(rng, p, "y"), _power_series(rng, p, "y")
            g = RobbaElement(p, {(1, 0): rng.randint(1, p - 1), (2, rng.randint(-2, 0)): rng.randint(-3, 3) or 1},
                             var="u")
            assert substitute(f1 * f2, g) == substitute(f1, g) * substitute(f2, g)
            assert substitute(f1 + f2, g) == substitute(f1, g) + substitute(f2, g)

            a = MWElement.from_rows(p, {i: {rng.randint(-2, 2): rng.randint(-9, 9) or 1} for i in range(rng.randint(1, 4))})
            b = MWElement.from_rows(p, {i: {rng.randint(-2, 2): rng.randint(-9, 9) or 1} for i in range(rng.randint(1, 4))})
            assert embed_into_robba(a * b).poly == (embed_into_robba(a) * embed_into_robba(b)).poly

            m = rng.choice([k for k in range(2, p) if (p - 1) % k == 0])
            h = random_robba(rng, p)
            assert trace_map(inclusion(h, m), m) == h.scale(m)

            # integer coefficients, so both factors are integral
            x, y = random_oc(rng, p), random_oc(rng, p)
            assert (x * y).reduce_mod_pi().coeffs == (x.reduce_mod_pi() * y.reduce_mod_pi()).coeffs
