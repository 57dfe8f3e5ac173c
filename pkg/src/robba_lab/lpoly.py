"""Sparse exact Laurent polynomials over Q, in one or two variables.

A polynomial is a plain dict from exponent keys to nonzero coefficients (int
or Fraction).  One-variable keys are ints (the t-exponent); two-variable keys
are pairs ``(j, i)`` where j is the outer variable (y, u or x) and i is the
t-exponent.  Higher layers attach certificates; this module only does exact
arithmetic, valuations and weighted truncation.

Products of large two-variable polynomials go through Kronecker substitution
into one big integer, which is far faster than a Python double loop.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Optional

try:  # optional acceleration for big-integer products and valuations
    import gmpy2

    def _bigmul(a: int, b: int) -> int:
        return int(gmpy2.mpz(a) * gmpy2.mpz(b))

    def _vint(n: int, p: int) -> int:
        return gmpy2.remove(n, p)[1]

except ImportError:  # pragma: no cover
    def _bigmul(a: int, b: int) -> int:
        return a * b

    def _vint(n: int, p: int) -> int:
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return v


def vq(c, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    if isinstance(c, int):
        if c == 0:
            raise ValueError("valuation of 0")
        return _vint(c, p) if c % p == 0 else 0
    n, d = c.numerator, c.denominator
    if n == 0:
        raise ValueError("valuation of 0")
    if n % p == 0:
        return _vint(n, p)
    if d % p == 0:
        return -_vint(d, p)
    return 0


def norm_c(c):
    """Normalise a coefficient: Fractions with denominator 1 become ints."""
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def padd(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, 0) + c
        if s:
            out[k] = norm_c(s)
        else:
            out.pop(k, None)
    return out


def psub(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, 0) - c
        if s:
            out[k] = norm_c(s)
        else:
            out.pop(k, None)
    return out


def pneg(a: dict) -> dict:
    return {k: -c for k, c in a.items()}


def pscale(a: dict, c) -> dict:
    if c == 0:
        return {}
    return {k: norm_c(x * c) for k, x in a.items()}


def pshift1(a: dict, n: int) -> dict:
    return {i + n: c for i, c in a.items()}


def pshift2(a: dict, dj: int, di: int = 0) -> dict:
    return {(j + dj, i + di): c for (j, i), c in a.items()}


def _denominator(a: dict) -> int:
    d = 1
    for c in a.values():
        if isinstance(c, Fraction):
            d = lcm(d, c.denominator)
    return d


def _naive_mul(a: dict, b: dict, two: bool) -> dict:
    out: dict = {}
    if two:
        for (j1, i1), c1 in a.items():
            for (j2, i2), c2 in b.items():
                k = (j1 + j2, i1 + i2)
                out[k] = out.get(k, 0) + c1 * c2
    else:
        for i1, c1 in a.items():
            for i2, c2 in b.items():
                k = i1 + i2
                out[k] = out.get(k, 0) + c1 * c2
    return {k: norm_c(c) for k, c in out.items() if c}


def _pack(items, nslots: int, width: int) -> int:
    pos = bytearray(nslots * width)
    neg = bytearray(nslots * width)
    for slot, c in items:
        if c > 0:
            pos[slot * width:(slot + 1) * width] = c.to_bytes(width, "little")
        else:
            neg[slot * width:(slot + 1) * width] = (-c).to_bytes(width, "little")
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _kron_mul(a: dict, b: dict, two: bool) -> dict:
    da, db = _denominator(a), _denominator(b)
    if da != 1:
        a = {k: int(c * da) for k, c in a.items()}
    if db != 1:
        b = {k: int(c * db) for k, c in b.items()}
    if two:
        ja = [k[0] for k in a]
        ia = [k[1] for k in a]
        jb = [k[0] for k in b]
        ib = [k[1] for k in b]
    else:
        ja, jb = [0], [0]
        ia, ib = list(a), list(b)
    jmin_a, imin_a, jmin_b, imin_b = min(ja), min(ia), min(jb), min(ib)
    W = (max(ia) - imin_a) + (max(ib) - imin_b) + 1
    ma = max(abs(c) for c in a.values())
    mb = max(abs(c) for c in b.values())
    bits = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length() + 2
    width = (bits + 7) // 8
    na = (max(ja) - jmin_a + 1) * W
    nb = (max(jb) - jmin_b + 1) * W
    if two:
        xa = _pack((((j - jmin_a) * W + i - imin_a, c) for (j, i), c in a.items()), na, width)
        xb = _pack((((j - jmin_b) * W + i - imin_b, c) for (j, i), c in b.items()), nb, width)
    else:
        xa = _pack(((i - imin_a, c) for i, c in a.items()), na, width)
        xb = _pack(((i - imin_b, c) for i, c in b.items()), nb, width)
    z = _bigmul(xa, xb)
    nout = na + nb
    half = 1 << (8 * width - 1)
    offset = int.from_bytes((b"\x00" * (width - 1) + b"\x80") * nout, "little")
    raw = (z + offset).to_bytes(nout * width, "little")
    out: dict = {}
    filler = b"\x00" * (width - 1) + b"\x80"
    j0, i0 = jmin_a + jmin_b, imin_a + imin_b
    scale = da * db
    for slot in range(nout):
        chunk = raw[slot * width:(slot + 1) * width]
        if chunk == filler:
            continue
        c = int.from_bytes(chunk, "little") - half
        if scale != 1:
            c = norm_c(Fraction(c, scale))
        q, r = divmod(slot, W)
        if two:
            out[(j0 + q, i0 + r)] = c
        else:
            out[i0 + slot] = c
    return out


def pmul(a: dict, b: dict) -> dict:
    """Product of two Laurent polynomials (keys decide one or two variables)."""
    if not a or not b:
        return {}
    two = isinstance(next(iter(a)), tuple)
    if len(a) * len(b) <= 400:
        return _naive_mul(a, b, two)
    return _kron_mul(a, b, two)


def ppow(a: dict, n: int, one) -> dict:
    result = dict(one)
    base = a
    while n:
        if n & 1:
            result = pmul(result, base)
        n >>= 1
        if n:
            base = pmul(base, base)
    return result


def eta_w1(a: dict, p: int, alpha) -> Optional[Fraction]:
    """min_i v(a_i) + alpha*min(i, 0); None for the zero polynomial."""
    best = None
    for i, c in a.items():
        w = vq(c, p) + alpha * min(i, 0)
        if best is None or w < best:
            best = w
    return None if best is None else Fraction(best)


def split_outer(a: dict) -> dict:
    """Group a two-variable polynomial by its outer exponent."""
    out: dict = {}
    for (j, i), c in a.items():
        out.setdefault(j, {})[i] = c
    return out


def join_outer(rows: dict) -> dict:
    out = {}
    for j, row in rows.items():
        for i, c in row.items():
            out[(j, i)] = c
    return out


def eta_w_rows(a: dict, p: int, alpha) -> dict:
    """Per outer index j, the eta-weight of the t-polynomial in that row."""
    an, L = _common_den(alpha)
    out: dict = {}
    for (j, i), c in a.items():
        w = vq(c, p) * L + an * min(i, 0)
        if j not in out or w < out[j]:
            out[j] = w
    return {j: Fraction(w, L) for j, w in out.items()}


def ceil_frac(q) -> int:
    q = Fraction(q)
    return -((-q.numerator) // q.denominator)


def reduce_mod(c, p: int, k: int):
    """A representative of c modulo p**k with small absolute value."""
    if isinstance(c, int):
        if k <= 0:
            return c
        m = p ** k
        r = c % m
        return r - m if r > m // 2 else r
    n, d = c.numerator, c.denominator
    e = 0
    while d % p == 0:
        d //= p
        e += 1
    if k + e <= 0:
        return c
    m = p ** (k + e)
    r = (n * pow(d, -1, m)) % m
    if r > m // 2:
        r -= m
    return norm_c(Fraction(r, p ** e))


def _common_den(*qs) -> tuple:
    """Integers (n_1, ..., n_k, L) with q_m = n_m / L."""
    qs = [Fraction(q) for q in qs]
    L = 1
    for q in qs:
        L = lcm(L, q.denominator)
    return tuple(q.numerator * (L // q.denominator) for q in qs) + (L,)


def truncate_weighted(a: dict, p: int, alpha, s, W, delta=0) -> tuple[dict, bool]:
    """Drop everything of weighted valuation >= W from a two-variable poly.

    The weight of c*y^j*t^i is v(c) + alpha*min(i,0) + s*j - delta*|j|.  Coefficients are
    also reduced modulo the power of p beyond which they are negligible, so
    the discarded part has weight >= W.  Returns (kept, changed).
    """
    out = {}
    changed = False
    an, sn, Wn, dn, L = _common_den(alpha, s, W, delta)
    for (j, i), c in a.items():
        num = Wn - an * min(i, 0) - sn * j + dn * abs(j)
        k = -((-num) // L)
        if vq(c, p) >= k:
            changed = True
            continue
        r = reduce_mod(c, p, k)
        if r != c:
            changed = True
        out[(j, i)] = r
    return out, changed


def truncate_weighted1(a: dict, p: int, alpha, W) -> tuple[dict, bool]:
    out = {}
    changed = False
    for i, c in a.items():
        k = ceil_frac(Fraction(W) - alpha * min(i, 0))
        if vq(c, p) >= k:
            changed = True
            continue
        r = reduce_mod(c, p, k)
        if r != c:
            changed = True
        out[i] = r
    return out, changed


def min_valuation(a: dict, p: int) -> Optional[int]:
    if not a:
        return None
    return min(vq(c, p) for c in a.values())


def deriv_outer(a: dict) -> dict:
    """d/dy on a two-variable polynomial (outer variable)."""
    return {(j - 1, i): j * c for (j, i), c in a.items() if j != 0}


def frob2(a: dict, p: int) -> dict:
    """y -> y^p, t -> t^p."""
    return {(j * p, i * p): c for (j, i), c in a.items()}
