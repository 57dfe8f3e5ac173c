"""The weak completion E^dagger<x>^dagger: orders, Weierstrass division, embedding x -> 1/y.

An ``MWElement`` is an exact polynomial F = sum_i F_i x^i (i >= 0, F_i a
Laurent polynomial in t) plus an optional deviation certificate
(alpha, beta, C): the true element f satisfies

    log_p ||f_i - F_i||_{p^-alpha} <= C - beta*i     for every i >= 0.

The (eta, rho)-norm with eta = p^-alpha, rho = p^b is recorded as the weight
min_i (w_alpha(f_i) - b*i); a larger weight is a smaller norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import PreconditionError, SchemaError
from .laurent import OCLaurent
from .lpoly import (
    ceil_frac, eta_w1, eta_w_rows, norm_c, padd, pmul, pneg, pscale, pshift2,
    split_outer, truncate_weighted, vq,
)
from .padic import BOTTOM, LogNorm, format_rational, parse_rational
from .residue import FpLaurent
from .robba import RobbaCert, RobbaElement, _row_error_weight, _row_to_oc

GRID = tuple(Fraction(1, 2 ** k) for k in range(7))
DEFAULT_FLOOR = 20

__all__ = [
    "MWCert", "MWElement", "mw_add", "mw_mul", "order", "order_certificate",
    "weierstrass_divide", "weierstrass_prepare", "embed_into_robba", "quotient_rep",
    "mw_frobenius", "ideal_member",
]


@dataclass(frozen=True)
class MWCert:
    alpha: Fraction
    beta: Fraction
    C: Fraction

    def __post_init__(self):
        for name in ("alpha", "beta", "C"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.alpha < 0 or self.beta < 0:
            raise SchemaError("certificate needs alpha >= 0 and beta >= 0")

    def admits(self, alpha, b) -> bool:
        return alpha <= self.alpha and 0 <= b <= self.beta

    def to_json(self) -> dict:
        return {k: format_rational(getattr(self, k)) for k in ("alpha", "beta", "C")}


class MWElement:
    __slots__ = ("p", "poly", "cert", "tag")

    def __init__(self, p: int, poly: dict, cert: Optional[MWCert] = None, tag: str = "Edagger"):
        if tag not in ("Edagger", "E"):
            raise SchemaError(f"unknown base tag {tag!r}")
        poly = {(int(i), int(e)): norm_c(Fraction(c) if not isinstance(c, int) else c)
                for (i, e), c in poly.items() if c}
        if any(i < 0 for i, _ in poly):
            raise SchemaError("negative powers of x are not allowed")
        self.p = p
        self.poly = poly
        self.cert = cert
        self.tag = tag

    @classmethod
    def constant(cls, c, p: int) -> "MWElement":
        return cls(p, {(0, 0): c} if c else {})

    @classmethod
    def from_rows(cls, p: int, rows: dict, **kw) -> "MWElement":
        """rows: {i: {t-exponent: coeff}}."""
        return cls(p, {(i, e): c for i, row in rows.items() for e, c in row.items()}, **kw)

    @classmethod
    def x_poly(cls, coeffs: list, p: int) -> "MWElement":
        """sum coeffs[i] x^i with rational coefficients."""
        return cls(p, {(i, 0): c for i, c in enumerate(coeffs) if c})

    # queries --------------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.cert is None

    @property
    def degree(self) -> int:
        return max((i for i, _ in self.poly), default=-1)

    def rows(self) -> dict:
        return split_outer(self.poly)

    def row(self, i: int) -> dict:
        return {e: c for (ii, e), c in self.poly.items() if ii == i}

    def is_zero(self) -> bool:
        return not self.poly and self.cert is None

    def __eq__(self, other):
        if not isinstance(other, MWElement):
            return NotImplemented
        return (self.p, self.poly, self.cert) == (other.p, other.poly, other.cert)

    def __hash__(self):
        return hash((self.p, tuple(sorted(self.poly.items())), self.cert))

    def __repr__(self):
        terms = " + ".join(f"({format_rational(c)})x^{i}t^{e}" for (i, e), c in sorted(self.poly.items()))
        cert = "" if self.cert is None else (
            f" ~[a={format_rational(self.cert.alpha)}, b={format_rational(self.cert.beta)}, "
            f"C={format_rational(self.cert.C)}]")
        return f"MW({terms or '0'}{cert})"

    def window_weight(self, alpha, b) -> Optional[Fraction]:
        best = None
        for i, w in eta_w_rows(self.poly, self.p, Fraction(alpha)).items():
            val = w - Fraction(b) * i
            if best is None or val < best:
                best = val
        return best

    def eta_rho_norm(self, alpha, b) -> LogNorm:
        alpha, b = Fraction(alpha), Fraction(b)
        if self.cert is not None and not self.cert.admits(alpha, b):
            raise PreconditionError("(alpha, rho) not admissible for the certificate")
        best = self.window_weight(alpha, b)
        if self.cert is not None:
            bound = -self.cert.C
            best = bound if best is None or bound < best else best
        return BOTTOM if best is None else LogNorm(best)

    def row_pi_valuation(self, i: int) -> Optional[int]:
        row = self.row(i)
        return min((vq(c, self.p) for c in row.values()), default=None)

    # arithmetic -----------------------------------------------------------

    def _chk(self, other) -> "MWElement":
        if isinstance(other, (int, Fraction)):
            return MWElement.constant(other, self.p)
        if not isinstance(other, MWElement):
            raise TypeError(f"cannot combine MWElement with {type(other).__name__}")
        if other.p != self.p:
            raise SchemaError(f"prime mismatch: {self.p} vs {other.p}")
        return other

    def _tag(self, other):
        return "E" if "E" in (self.tag, other.tag) else "Edagger"

    def __add__(self, other):
        other = self._chk(other)
        certs = [c for c in (self.cert, other.cert) if c is not None]
        cert = None
        if certs:
            cert = MWCert(min(c.alpha for c in certs), min(c.beta for c in certs), max(c.C for c in certs))
        return MWElement(self.p, padd(self.poly, other.poly), cert, self._tag(other))

    __radd__ = __add__

    def __neg__(self):
        return MWElement(self.p, pneg(self.poly), self.cert, self.tag)

    def __sub__(self, other):
        return self + (-self._chk(other))

    def __rsub__(self, other):
        return self._chk(other) + (-self)

    def _mass(self, alpha, beta) -> Optional[Fraction]:
        best = None
        for k, w in eta_w_rows(self.poly, self.p, alpha).items():
            val = -w + beta * k
            if best is None or val > best:
                best = val
        return best

    def __mul__(self, other):
        other = self._chk(other)
        f, g = self, other
        cert = None
        certs = [c for c in (f.cert, g.cert) if c is not None]
        if certs:
            alpha = min(c.alpha for c in certs)
            beta = min(c.beta for c in certs)
            parts = []
            if g.cert is not None:
                m = f._mass(alpha, beta)
                if m is not None:
                    parts.append(g.cert.C + m)
            if f.cert is not None:
                m = g._mass(alpha, beta)
                if m is not None:
                    parts.append(f.cert.C + m)
            if f.cert is not None and g.cert is not None:
                parts.append(f.cert.C + g.cert.C)
            C = max(parts) if parts else min(c.C for c in certs)
            cert = MWCert(alpha, beta, C)
        return MWElement(self.p, pmul(f.poly, g.poly), cert, self._tag(other))

    __rmul__ = __mul__

    def scale(self, c) -> "MWElement":
        c = Fraction(c)
        if c == 0:
            return MWElement(self.p, {}, None, self.tag)
        cert = None
        if self.cert is not None:
            cert = MWCert(self.cert.alpha, self.cert.beta, self.cert.C - vq(c, self.p))
        return MWElement(self.p, pscale(self.poly, c), cert, self.tag)

    def shift(self, n: int) -> "MWElement":
        """Multiply by x^n (n >= 0)."""
        if n < 0:
            raise PreconditionError("negative x-shift leaves the ring")
        cert = None
        if self.cert is not None:
            c = self.cert
            cert = MWCert(c.alpha, c.beta, c.C - c.beta * n)
        return MWElement(self.p, pshift2(self.poly, n), cert, self.tag)

    def derivative(self) -> "MWElement":
        """d/dx; the tail bound loses one factor of rho since |i| <= 1."""
        cert = None
        if self.cert is not None:
            c = self.cert
            cert = MWCert(c.alpha, c.beta, c.C - c.beta)
        poly = {(i - 1, e): i * c for (i, e), c in self.poly.items() if i != 0}
        return MWElement(self.p, poly, cert, self.tag)

    def truncate(self, alpha, b, W) -> "MWElement":
        """Drop terms of (alpha, b)-weight >= W and certify them."""
        alpha, b, W = Fraction(alpha), Fraction(b), Fraction(W)
        kept, changed = truncate_weighted(self.poly, self.p, alpha, -b, W)
        if not changed:
            return self
        return MWElement(self.p, kept, self._merged(alpha, b, -W), self.tag)

    def with_ball(self, alpha, b, W) -> "MWElement":
        return MWElement(self.p, self.poly, self._merged(Fraction(alpha), Fraction(b), -Fraction(W)), self.tag)

    def _merged(self, alpha, b, C) -> MWCert:
        if self.cert is None:
            return MWCert(alpha, b, C)
        c = self.cert
        if not c.admits(alpha, b):
            raise PreconditionError("parameters outside the existing certificate")
        return MWCert(min(alpha, c.alpha), b, max(C, c.C))

    def low_part(self, k: int) -> "MWElement":
        """Exact terms of x-degree < k (certificate dropped)."""
        return MWElement(self.p, {key: c for key, c in self.poly.items() if key[0] < k}, None, self.tag)

    def high_part(self, k: int) -> "MWElement":
        """Terms of x-degree >= k, keeping the certificate."""
        return MWElement(self.p, {key: c for key, c in self.poly.items() if key[0] >= k}, self.cert, self.tag)

    def reduce_mod_pi(self) -> dict:
        """{i: FpLaurent} for an integral element with exact window."""
        out: dict = {}
        p = self.p
        for (i, e), c in self.poly.items():
            v = vq(c, p)
            if v < 0:
                raise PreconditionError("reduction mod pi needs an integral element")
            if v == 0:
                num = c if isinstance(c, int) else c.numerator * pow(c.denominator, -1, p)
                out.setdefault(i, {})[e] = num % p
        return {i: FpLaurent(p, r) for i, r in out.items()}

    def relax_to_E(self) -> "MWElement":
        cert = None
        if self.cert is not None:
            cert = MWCert(0, self.cert.beta, self.cert.C)
        return MWElement(self.p, self.poly, cert, "E")

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        rows = self.rows()
        imax = self.degree
        cert = self.cert.to_json() if self.cert is not None else {"alpha": "1", "beta": "1", "C": None}
        return {
            "p": self.p,
            "imax": imax,
            "coeffs": [_row_to_oc(self.p, rows.get(i, {})).to_json() for i in range(imax + 1)],
            "cert": cert,
            "tag": self.tag,
        }

    @classmethod
    def from_json(cls, doc) -> "MWElement":
        need = {"imax", "coeffs", "cert"}
        if not isinstance(doc, dict) or not need <= set(doc) or set(doc) - need - {"p", "tag"}:
            raise SchemaError(f"MWElement fields must be {sorted(need)} (+p, tag)")
        if not isinstance(doc["imax"], int) or doc["imax"] + 1 != len(doc["coeffs"]):
            raise SchemaError("imax does not match the coefficient list")
        cert_doc = doc["cert"]
        if not isinstance(cert_doc, dict) or set(cert_doc) != {"alpha", "beta", "C"}:
            raise SchemaError("cert needs exactly alpha, beta, C")
        rows = [OCLaurent.from_json(c) for c in doc["coeffs"]]
        primes = {r.p for r in rows if r.coeffs} | ({doc["p"]} if "p" in doc else set())
        if len(primes) != 1:
            raise SchemaError("cannot determine a single prime")
        p = primes.pop()
        alpha = parse_rational(cert_doc["alpha"])
        beta = parse_rational(cert_doc["beta"])
        exact = cert_doc["C"] is None
        C = None if exact else parse_rational(cert_doc["C"])
        poly = {}
        for i, oc in enumerate(rows):
            for n, a in enumerate(oc.coeffs):
                if not a.is_zero:
                    poly[(i, oc.imin + n)] = a.centered()
            if exact:
                if oc.beta is not None or oc.upper_floor is not None:
                    raise SchemaError("C = null declares an exact window but a row has tails")
                continue
            err = _row_error_weight(oc, alpha)
            if err is not None:
                C = max(C, -err + beta * i)
        cert = None if exact else MWCert(alpha, beta, C)
        return cls(p, poly, cert, doc.get("tag", "Edagger"))


def mw_add(f: MWElement, g: MWElement) -> MWElement:
    return f + g


def mw_mul(f: MWElement, g: MWElement) -> MWElement:
    return f * g


# orders ----------------------------------------------------------------------

def order(f: MWElement) -> Optional[int]:
    """The pi-adic order: the largest index where the Gauss norm of f_i is maximal.

    Returns None for zero; raises PreconditionError when the certified
    deviation could change the answer.
    """
    vals = {}
    for i in range(f.degree + 1):
        v = f.row_pi_valuation(i)
        if v is not None:
            vals[i] = v
    if not vals:
        if f.cert is None:
            return None
        raise PreconditionError("order undecidable: only a deviation bound is known")
    vk = min(vals.values())
    k = max(i for i, v in vals.items() if v == vk)
    if f.cert is not None:
        # Gauss norm <= eta-norm, so deviation rows have valuation >= -C + beta*i
        c = f.cert
        if not (-c.C >= vk and -c.C + c.beta * k > vk):
            raise PreconditionError("order undecidable: the certified tail could dominate")
    return k


def _dominant(row: dict, p: int, alpha, norm_exact: bool = False) -> Optional[tuple]:
    """(e0, c0, w_h) when row = c0 t^e0 (1 + h) with ||h||_alpha < 1, else None.

    With ``norm_exact`` also require e0 = 0: only then is ||row^-1|| = ||row||^-1
    for the eta-norm, which mixes the two boundary circles.
    """
    if not row:
        return None
    weights = {e: vq(c, p) + alpha * min(e, 0) for e, c in row.items()}
    wmin = min(weights.values())
    tops = [e for e, w in weights.items() if w == wmin]
    if len(tops) != 1:
        return None
    e0 = tops[0]
    if norm_exact and e0 != 0 and alpha != 0:
        return None
    c0 = row[e0]
    rest = {e - e0: Fraction(c) / c0 for e, c in row.items() if e != e0}
    wh = eta_w1(rest, p, alpha)
    if wh is not None and wh <= 0:
        return None
    return e0, c0, wh


def order_certificate(f: MWElement, k: int, alphas=GRID, betas=GRID, need_unit_lead: bool = False) -> dict:
    """Search (alpha, b) making k the (eta, rho)-order of f.

    Every grid pair is verified exactly on the window and against the
    deviation bound; among those that pass, the one with the widest gap
    min_{i>k} w_i - w_k (fastest contraction) wins.  Returns
    {"alpha", "beta", "w_k", "gap"}; gap is None when nothing lies beyond k.
    """
    if order(f) != k:
        raise PreconditionError(f"f does not have order {k}")
    p = f.p
    c = f.cert
    best = None
    for b in betas:
        if c is not None and b > c.beta:
            continue
        for alpha in alphas:
            if c is not None and alpha > c.alpha:
                continue
            found = _check_order(f, k, alpha, b)
            if found is None:
                continue
            if need_unit_lead and _dominant(f.row(k), p, alpha, norm_exact=True) is None:
                continue
            wk, gap = found
            if gap is None:
                return {"alpha": alpha, "beta": b, "w_k": wk, "gap": None}
            if best is None or gap > best["gap"]:
                best = {"alpha": alpha, "beta": b, "w_k": wk, "gap": gap}
    if best is None:
        raise PreconditionError("order certificate search exhausted the grid at this truncation")
    return best


def _check_order(f: MWElement, k: int, alpha, b):
    """(w_k, gap) if f has (p^-alpha, p^b)-order k, else None."""
    rows = eta_w_rows(f.poly, f.p, alpha)
    if k not in rows:
        return None
    wk = rows[k] - b * k
    gap = None
    for i, w in rows.items():
        wi = w - b * i
        if i <= k and wi < wk:
            return None
        if i > k:
            if wi <= wk:
                return None
            gap = wi - wk if gap is None else min(gap, wi - wk)
    c = f.cert
    if c is not None:
        err0 = -c.C
        errk = -c.C + (c.beta - b) * k
        if (k > 0 and err0 < wk) or errk <= wk:
            return None
        tail_gap = err0 - wk if k == 0 else errk - wk
        gap = tail_gap if gap is None else min(gap, tail_gap)
    return wk, gap


def _invert_lead(row: dict, p: int, alpha, b, W) -> MWElement:
    """Inverse of a Laurent polynomial in t with a dominant term, as a degree-0 MW element."""
    dom = _dominant(row, p, alpha)
    if dom is None:
        raise PreconditionError("leading coefficient has no dominant term at this eta")
    e0, c0, wh = dom
    lead_inv = {(0, -e0): Fraction(1) / c0}
    w_lead_inv = vq(Fraction(1) / c0, p) + alpha * min(-e0, 0)
    one = MWElement.constant(1, p)
    if wh is None:
        return MWElement(p, lead_inv)
    h = MWElement(p, {(0, e - e0): Fraction(c) / c0 for e, c in row.items() if e != e0})
    K = ceil_frac(Fraction(W) / wh) + 1
    term, total = one, one
    for _ in range(1, K):
        term = (term * (-h)).truncate(alpha, b, W)
        total = (total + term).truncate(alpha, b, W)
    total = total.with_ball(alpha, b, min(Fraction(W), K * wh))
    return total * MWElement(p, lead_inv) if w_lead_inv is not None else total


def weierstrass_divide(f: MWElement, g: MWElement, floor=DEFAULT_FLOOR, max_iter: int = 400) -> dict:
    """f = q*g + r with deg r < order(g), by the contracting iteration.

    Each round divides the current remainder F_n by the polynomial part
    g_0 + ... + g_k x^k (long division) and feeds back F_{n+1} = -q'_n (g - that part),
    whose (eta, rho)-weight grows by the gap of g.  Deviations (of f, of g, or
    from truncation) are moved into the certificates of q and r as they appear,
    using ||q''|| <= ||e|| / ||g|| and ||r''|| <= ||e|| for the division of e.
    Returns {"q", "r", "k", "alpha", "beta", "gap", "log"}.
    """
    if f.p != g.p:
        raise SchemaError("prime mismatch")
    p = g.p
    k = order(g)
    if k is None:
        raise PreconditionError("division by zero")
    oc = order_certificate(g, k, need_unit_lead=True)
    alpha, b, gap = oc["alpha"], oc["beta"], oc["gap"]
    if f.cert is not None and not f.cert.admits(alpha, b):
        raise PreconditionError("f's certificate does not admit the division parameters")
    wk = oc["w_k"]
    floor = Fraction(floor)
    head = g.low_part(k + 1)
    tail = g - head
    lead_inv = _exact_part(_invert_lead(g.row(k), p, alpha, b, floor + 2 - wk))
    q_poly: dict = {}
    r_poly: dict = {}
    ball = None  # smallest deviation weight moved out so far

    def absorb(w):
        nonlocal ball
        ball = w if ball is None else min(ball, w)

    F = f
    w0 = None
    log = []
    for n in range(max_iter + 1):
        if F.cert is not None:
            absorb(-F.cert.C)
            F = _exact_part(F)
        wF = F.window_weight(alpha, b)
        if n == 0:
            w0 = wF
        entry = {"n": n, "w": BOTTOM if wF is None else LogNorm(wF)}
        if wF is not None and w0 is not None and gap is not None:
            entry["envelope"] = w0 + n * gap
            if wF < w0 + n * gap:
                log.append(entry)
                raise PreconditionError("division does not contract at the chosen (eta, rho)")
        log.append(entry)
        if wF is None or wF >= floor:
            if wF is not None:
                absorb(wF)
            break
        if n == max_iter:
            raise PreconditionError("division did not reach the precision floor within the budget")
        Q, R, H = _long_divide(F, head, k, lead_inv, alpha, b, floor + 1 - wk)
        q_poly = padd(q_poly, Q.poly)
        r_poly = padd(r_poly, R.poly)
        F = (H - Q * tail).truncate(alpha, b, floor + 1)
    q = MWElement(p, q_poly, None, f.tag)
    r = MWElement(p, r_poly, None, f.tag)
    if ball is not None:
        q = q.with_ball(alpha, b, ball - wk)
        r = r.with_ball(alpha, b, ball)
    return {"q": q, "r": r, "k": k, "alpha": alpha, "beta": b, "gap": gap, "log": log}


def _long_divide(F: MWElement, head: MWElement, k: int, lead_inv: MWElement, alpha, b, W):
    """Long division of an exact F by head (degree k); returns (Q, R, H) with
    F = Q*head + R + H, deg R < k, and H the small rounding leftover in degrees >= k."""
    p = F.p
    rem = dict(F.poly)
    Q: dict = {}
    H: dict = {}
    for d in range(F.degree, k - 1, -1):
        row = {e: c for (i, e), c in rem.items() if i == d}
        if not row:
            continue
        c = (MWElement(p, {(0, e): v for e, v in row.items()}) * lead_inv).truncate(alpha, b, W + b * (d - k))
        term = MWElement(p, c.poly).shift(d - k)
        Q = padd(Q, term.poly)
        rem = padd(rem, pneg(pmul(term.poly, head.poly)))
        for key in [key for key in rem if key[0] == d]:
            H[key] = rem.pop(key)
    R = {key: v for key, v in rem.items() if key[0] < k}
    for key, v in rem.items():
        if key[0] >= k:
            H[key] = v
    return MWElement(p, Q), MWElement(p, R), MWElement(p, H)


def weierstrass_prepare(f: MWElement, floor=DEFAULT_FLOOR) -> dict:
    """f = u*h with h a polynomial of degree order(f) and u a unit.

    Divides x^k by f: x^k = q f + r, so f = q^-1 (x^k - r) with q a unit;
    the inverse u = q^-1 is then computed by dividing 1 by q.
    """
    k = order(f)
    if k is None:
        raise PreconditionError("zero has no preparation")
    xk = MWElement(f.p, {(k, 0): 1})
    div = weierstrass_divide(xk, f, floor)
    q, r = div["q"], div["r"]
    h = xk - r
    if k == 0:
        h = MWElement(f.p, {(0, 0): 1})
        u = f
    else:
        inv = weierstrass_divide(MWElement.constant(1, f.p), _exact_part(q), floor)
        u = inv["q"]
    return {"u": u, "h": h, "u_inv": q, "k": k, "alpha": div["alpha"], "beta": div["beta"]}


def _exact_part(f: MWElement) -> MWElement:
    return MWElement(f.p, f.poly, None, f.tag)


def ideal_member(f: MWElement, g: MWElement, floor=DEFAULT_FLOOR) -> bool:
    """f in (g) iff the Weierstrass remainder vanishes to the floor."""
    r = weierstrass_divide(f, g, floor)["r"]
    return not r.poly


# embedding and quotient --------------------------------------------------------

def embed_into_robba(f: MWElement) -> RobbaElement:
    """x -> y^-1: the coefficient of y^-i is f_i."""
    cert = None
    if f.cert is not None:
        c = f.cert
        if c.beta <= 0:
            raise PreconditionError("embedding needs beta > 0")
        half = c.beta / 2
        tag = "R_E" if c.alpha == 0 else "R_Edagger"
        cert = RobbaCert(c.alpha, half, c.C, half)
    else:
        tag = "R_E" if f.tag == "E" else "R_Edagger"
    poly = {(-i, e): c for (i, e), c in f.poly.items()}
    integral = all(vq(c, f.p) >= 0 for c in poly.values()) and f.cert is None
    return RobbaElement(f.p, poly, cert, integral or None, tag if f.tag == "Edagger" else "R_E", "y",
                        -max(f.degree, 0), 0)


def quotient_rep(h: RobbaElement) -> RobbaElement:
    """Canonical representative modulo the image of x -> y^-1: the part in y^{>=1}."""
    if h.var != "y":
        raise SchemaError("quotient_rep expects an element in y")
    poly = {(j, i): c for (j, i), c in h.poly.items() if j >= 1}
    return RobbaElement(h.p, poly, h.cert, None, h.tag, "y", 1, max(h.jmax, 0))


def mw_frobenius(f: MWElement) -> MWElement:
    """x -> x^p, t -> t^p."""
    p = f.p
    cert = None
    if f.cert is not None:
        c = f.cert
        cert = MWCert(c.alpha / p, c.beta / p, c.C)
    return MWElement(p, {(i * p, e * p): c for (i, e), c in f.poly.items()}, cert, f.tag)
