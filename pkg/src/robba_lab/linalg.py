"""Exact linear algebra over Q(t) for matrices of Laurent polynomials in t.

Entries are dicts {t-exponent: rational}.  Ranks and kernels go through
sympy's DomainMatrix over the fraction field QQ(t), which does exact
fraction-free elimination.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from sympy import QQ, Integer, Poly, Rational, cancel, fraction, lcm, symbols, together
from sympy.polys.matrices import DomainMatrix

_t = symbols("t")


@lru_cache(maxsize=1)
def _field():
    return QQ.frac_field(_t)


def _to_elem(poly: dict):
    K = _field()
    expr = sum((Rational(Fraction(c).numerator, Fraction(c).denominator) * _t ** i for i, c in poly.items()),
               Rational(0))
    return K.from_sympy(expr)


def to_domain_matrix(rows: list) -> DomainMatrix:
    """rows: list of lists of {i: c} Laurent polynomials."""
    K = _field()
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    data = [[_to_elem(e) if e else K.zero for e in row] for row in rows]
    return DomainMatrix(data, (nrows, ncols), K)


def rank(rows: list) -> int:
    if not rows or not rows[0]:
        return 0
    return to_domain_matrix(rows).rank()


def nullspace(rows: list) -> list:
    """Basis of the right kernel, each vector as a list of Laurent polynomials.

    Vectors are scaled by a common polynomial denominator so the entries are
    polynomials in t with rational coefficients.
    """
    ncols = len(rows[0]) if rows else 0
    if not rows:
        return [[{0: 1} if i == j else {} for i in range(ncols)] for j in range(ncols)]
    ns = to_domain_matrix(rows).nullspace()
    out = []
    for r in range(ns.shape[0]):
        vec = [ns[r, c].element for c in range(ncols)]
        out.append(_clear_denominators(vec))
    return out


def _clear_denominators(vec) -> list:
    K = _field()
    exprs = [K.to_sympy(x) for x in vec]
    den = Integer(1)
    for e in exprs:
        den = lcm(den, fraction(together(e))[1])
    out = []
    for e in exprs:
        poly = Poly(cancel(e * den), _t)
        out.append({int(m[0]): Fraction(int(c.p), int(c.q)) for m, c in zip(poly.monoms(), poly.coeffs()) if c})
    return out


def complement_basis(rows: list) -> list:
    """Indices of standard basis vectors spanning a complement of the column space."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    cols = [[rows[i][j] for i in range(nrows)] for j in range(ncols)]
    current = [c for c in cols]
    base_rank = rank(_transpose(current)) if current else 0
    chosen = []
    for i in range(nrows):
        unit = [{0: 1} if k == i else {} for k in range(nrows)]
        trial = current + [unit]
        r = rank(_transpose(trial))
        if r > base_rank:
            current = trial
            base_rank = r
            chosen.append(i)
    return chosen


def _transpose(cols: list) -> list:
    if not cols:
        return []
    return [[cols[j][i] for j in range(len(cols))] for i in range(len(cols[0]))]
