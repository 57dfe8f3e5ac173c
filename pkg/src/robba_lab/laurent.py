"""Overconvergent Laurent series in t over Q_p.

An ``OCLaurent`` is a window of capped-precision scalars a_imin .. a_imax plus
two statements about everything outside the window:

* lower tail (alpha, beta): v(a_i) >= alpha*(-i) - beta for every i < imin.
  ``beta is None`` means the lower tail is exactly zero.
* upper floor: for i > imax the coefficients are unknown but v(a_i) >= floor.
  ``upper_floor is None`` means they are exactly zero.

Norms are log-domain lower bounds on the weight, so a result is always a
certified upper bound on the true norm.  When every tail is exact and window
precision is ample the bound is the exact norm.

Error propagation through products is done with "pieces": each known or
unknown region of an operand is a set of indices with an affine valuation
bound, and the product of two pieces has a piecewise-linear bound that is
scanned at its breakpoints.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .errors import CertificateViolation, PreconditionError, SchemaError
from .padic import BOTTOM, LogNorm, PadicScalar, format_rational, parse_rational
from .lpoly import ceil_frac, vq
from .residue import FpLaurent

DEFAULT_PREC = 20
TAGS = ("SK", "Eeta", "Edagger", "E")
_NEG_INF = object()


def join_tags(a: str, b: str) -> str:
    for t in (a, b):
        if t not in TAGS:
            raise SchemaError(f"unknown ring tag {t!r}")
    return a if TAGS.index(a) >= TAGS.index(b) else b


def _vlow(a: PadicScalar) -> int:
    """A lower bound on the valuation of the true coefficient."""
    return a.abs_prec if a.v is None else a.v


def _cap(a: PadicScalar, cap: int) -> PadicScalar:
    if a.abs_prec <= cap:
        return a
    if a.v is None or a.v >= cap:
        return PadicScalar.zero(a.p, cap)
    return PadicScalar(a.p, a.v, a.u, cap - a.v)


# pieces: (a, b, s, c) covering indices a..b (None = infinite), v >= s*(-k) - c

def _pair_bound(P, Q, k):
    a1, b1, s1, c1 = P
    a2, b2, s2, c2 = Q
    lo = a1
    if b2 is not None:
        lo = k - b2 if lo is None else max(lo, k - b2)
    hi = b1
    if a2 is not None:
        hi = k - a2 if hi is None else min(hi, k - a2)
    if lo is not None and hi is not None and lo > hi:
        return None
    coef = s2 - s1
    if coef > 0:
        if lo is None:
            return _NEG_INF
        i = lo
    elif coef < 0:
        if hi is None:
            return _NEG_INF
        i = hi
    else:
        i = 0
    return -s2 * k - c1 - c2 + coef * i


def _breaks(P, Q):
    a1, b1, _, _ = P
    a2, b2, _, _ = Q
    out = set()
    for x, y in ((a1, b2), (b1, a2), (a1, a2), (b1, b2)):
        if x is not None and y is not None:
            out.add(x + y)
    return out


def _scan_min(fn, K1, K2, breaks):
    """Minimum over integers K1 <= k <= K2 of a piecewise-linear fn.

    fn may return None (no contribution) or _NEG_INF.  Returns None when fn
    never contributes and _NEG_INF when it is unbounded below.
    """
    pts = set()
    for b in breaks:
        for d in (-1, 0, 1):
            k = b + d
            if (K1 is None or k >= K1) and (K2 is None or k <= K2):
                pts.add(k)
    anchor = sorted(breaks) or [0]
    if K1 is not None:
        pts.update({K1, K1 + 1} if K2 is None or K1 + 1 <= K2 else {K1})
    else:
        far = min(anchor + ([K2] if K2 is not None else [])) - 2
        pts.update({far, far - 1})
        x, y = fn(far), fn(far - 1)
        if x is _NEG_INF or y is _NEG_INF:
            return _NEG_INF
        if x is not None and y is not None and y < x:
            return _NEG_INF
    if K2 is not None:
        pts.update({K2, K2 - 1} if K1 is None or K2 - 1 >= K1 else {K2})
    else:
        far = max(anchor + ([K1] if K1 is not None else [])) + 2
        pts.update({far, far + 1})
        x, y = fn(far), fn(far + 1)
        if x is _NEG_INF or y is _NEG_INF:
            return _NEG_INF
        if x is not None and y is not None and y < x:
            return _NEG_INF
    best = None
    for k in pts:
        if (K1 is not None and k < K1) or (K2 is not None and k > K2):
            continue
        val = fn(k)
        if val is None:
            continue
        if val is _NEG_INF:
            return _NEG_INF
        if best is None or val < best:
            best = val
    return best


class OCLaurent:
    """Element of E_eta, E^dagger or E with a certified window."""

    __slots__ = ("p", "imin", "coeffs", "alpha", "beta", "upper_floor", "tag", "alpha0")

    def __init__(self, p: int, imin: int, coeffs, alpha=Fraction(1), beta=None,
                 upper_floor: Optional[int] = None, tag: str = "Edagger", alpha0=None):
        if tag not in TAGS:
            raise SchemaError(f"unknown ring tag {tag!r}")
        coeffs = tuple(coeffs)
        for c in coeffs:
            if not isinstance(c, PadicScalar) or c.p != p:
                raise SchemaError("window entries must be PadicScalars over the same prime")
        alpha = Fraction(alpha)
        if alpha < 0 or (beta is not None and alpha == 0 and tag not in ("E",)):
            raise SchemaError("tail certificate needs alpha > 0 (alpha = 0 only for tag E)")
        if tag == "SK" and imin < 0 and any(not c.is_zero for c in coeffs[: -imin]):
            raise SchemaError("S_K elements have no negative powers of t")
        self.p = p
        self.imin = int(imin)
        self.coeffs = coeffs
        self.alpha = alpha
        self.beta = None if beta is None else Fraction(beta)
        self.upper_floor = None if upper_floor is None else int(upper_floor)
        self.tag = tag
        self.alpha0 = None if alpha0 is None else Fraction(alpha0)

    # construction ---------------------------------------------------------

    @classmethod
    def from_poly(cls, p: int, poly: dict, N: int = DEFAULT_PREC, **kw) -> "OCLaurent":
        """Exact Laurent polynomial {i: rational}, entries at relative precision N."""
        poly = {i: c for i, c in poly.items() if c != 0}
        if not poly:
            return cls(p, 0, (), **kw)
        lo, hi = min(poly), max(poly)
        scal = {i: PadicScalar.from_rational(c, p, N) for i, c in poly.items()}
        zero_prec = min(s.abs_prec for s in scal.values())
        coeffs = [scal.get(i, PadicScalar.zero(p, zero_prec)) for i in range(lo, hi + 1)]
        return cls(p, lo, coeffs, **kw)

    @classmethod
    def constant(cls, c, p: int, N: int = DEFAULT_PREC) -> "OCLaurent":
        return cls.from_poly(p, {0: c}, N)

    @classmethod
    def monomial(cls, c, n: int, p: int, N: int = DEFAULT_PREC) -> "OCLaurent":
        return cls.from_poly(p, {n: c}, N)

    def _with(self, imin, coeffs, alpha=None, beta="keep", upper_floor="keep", tag=None, alpha0="keep"):
        return OCLaurent(
            self.p, imin, coeffs,
            self.alpha if alpha is None else alpha,
            self.beta if beta == "keep" else beta,
            self.upper_floor if upper_floor == "keep" else upper_floor,
            self.tag if tag is None else tag,
            self.alpha0 if alpha0 == "keep" else alpha0,
        )

    # queries --------------------------------------------------------------

    @property
    def imax(self) -> int:
        return self.imin + len(self.coeffs) - 1

    @property
    def exact_tails(self) -> bool:
        return self.beta is None and self.upper_floor is None

    def coeff(self, i: int) -> PadicScalar:
        if self.imin <= i <= self.imax:
            return self.coeffs[i - self.imin]
        if (i < self.imin and self.beta is None) or (i > self.imax and self.upper_floor is None):
            return PadicScalar.zero(self.p, 10 ** 6)
        raise PreconditionError(f"coefficient {i} lies in an uncertain tail")

    def window_poly(self) -> dict:
        """Representatives of the nonzero window entries as exact rationals."""
        return {self.imin + k: c.centered() for k, c in enumerate(self.coeffs) if not c.is_zero}

    def min_abs_prec(self) -> Optional[int]:
        return min((c.abs_prec for c in self.coeffs), default=None)

    def is_zero(self) -> bool:
        return self.exact_tails and all(c.is_zero for c in self.coeffs)

    def _pieces(self):
        pcs = []
        for k, c in enumerate(self.coeffs):
            pcs.append((self.imin + k, self.imin + k, Fraction(0), Fraction(-_vlow(c))))
        if self.beta is not None:
            pcs.append((None, self.imin - 1, self.alpha, self.beta))
        if self.upper_floor is not None:
            pcs.append((self.imax + 1, None, Fraction(0), Fraction(-self.upper_floor)))
        return pcs

    def _unknown_pieces(self):
        pcs = []
        if self.beta is not None:
            pcs.append((None, self.imin - 1, self.alpha, self.beta))
        if self.upper_floor is not None:
            pcs.append((self.imax + 1, None, Fraction(0), Fraction(-self.upper_floor)))
        return pcs

    # norms ----------------------------------------------------------------

    def eta_norm(self, alpha) -> LogNorm:
        """Certified lower bound on the eta-weight, eta = p^(-alpha)."""
        alpha = Fraction(alpha)
        if alpha < 0:
            raise PreconditionError("alpha must be non-negative")
        if self.beta is not None and alpha > self.alpha:
            raise PreconditionError(
                f"alpha = {format_rational(alpha)} exceeds the tail certificate "
                f"alpha = {format_rational(self.alpha)}")
        best = None
        for k, c in enumerate(self.coeffs):
            i = self.imin + k
            shift = alpha * min(i, 0)
            if c.v is not None:
                w = c.v + shift
                best = w if best is None or w < best else best
            w = c.abs_prec + shift
            best = w if best is None or w < best else best
        if self.beta is not None:
            i = self.imin - 1
            w = self.alpha * (-i) - self.beta + alpha * min(i, 0)
            best = w if best is None or w < best else best
        if self.upper_floor is not None:
            w = self.upper_floor + alpha * min(self.imax + 1, 0)
            best = w if best is None or w < best else best
        if best is None:
            return BOTTOM
        return LogNorm(best)

    def value_eta_norm(self, alpha) -> LogNorm:
        """Weight of the window values alone (ignores every uncertainty)."""
        alpha = Fraction(alpha)
        best = None
        for k, c in enumerate(self.coeffs):
            if c.v is not None:
                w = c.v + alpha * min(self.imin + k, 0)
                best = w if best is None or w < best else best
        return BOTTOM if best is None else LogNorm(best)

    def pi_norm(self) -> LogNorm:
        return self.eta_norm(0)

    # ring operations ------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, OCLaurent):
            other = OCLaurent.constant(Fraction(other), self.p)
        if other.p != self.p:
            raise SchemaError(f"prime mismatch: {self.p} vs {other.p}")
        return other

    def _joint_tag(self, other):
        tag = join_tags(self.tag, other.tag)
        a0 = None
        if tag == "Eeta":
            cands = [x.alpha0 for x in (self, other) if x.tag == "Eeta" and x.alpha0 is not None]
            a0 = min(cands) if cands else None
        return tag, a0

    def __neg__(self):
        return self._with(self.imin, [-c for c in self.coeffs])

    def __add__(self, other):
        other = self._check(other)
        p = self.p
        ops = (self, other)
        tails = [x for x in ops if x.beta is not None]
        nonempty = [x for x in ops if x.coeffs]
        if not nonempty:
            lo, hi = min(x.imin for x in ops), min(x.imin for x in ops) - 1
        else:
            lo = min(x.imin for x in nonempty)
            hi = max(x.imax for x in nonempty)
        alpha = min(x.alpha for x in tails) if tails else min(x.alpha for x in ops)
        beta = None
        for x in tails:
            # rebase onto the common alpha, valid for i < min(lo, x.imin)
            b = x.beta - (x.alpha - alpha) * (1 - min(lo, x.imin))
            beta = b if beta is None else max(beta, b)
        floor = None
        for x in ops:
            if x.upper_floor is not None:
                floor = x.upper_floor if floor is None else min(floor, x.upper_floor)
        coeffs = {}
        for x in ops:
            for k, c in enumerate(x.coeffs):
                i = x.imin + k
                coeffs[i] = coeffs[i] + c if i in coeffs else c
        fill = min((c.abs_prec for c in coeffs.values()), default=DEFAULT_PREC)
        window = []
        for i in range(lo, hi + 1):
            c = coeffs.get(i, PadicScalar.zero(p, fill))
            for x in ops:
                if i < x.imin and x.beta is not None:
                    c = _cap(c, ceil_frac(x.alpha * (-i) - x.beta))
                if i > x.imax and x.upper_floor is not None:
                    c = _cap(c, x.upper_floor)
            window.append(c)
        tag, a0 = self._joint_tag(other)
        return OCLaurent(p, lo, window, alpha, beta, floor, tag, a0).trim()

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) + (-self)

    def __mul__(self, other):
        other = self._check(other)
        f, g = self, other
        p = self.p
        tag, a0 = self._joint_tag(other)
        if not f.coeffs and f.exact_tails or not g.coeffs and g.exact_tails:
            return OCLaurent(p, 0, (), tag=tag, alpha0=a0)
        lo = f.imin + g.imin
        hi = f.imax + g.imax
        # exact part of the window convolution
        acc: dict = {}
        for a_idx, a in enumerate(f.coeffs):
            for b_idx, b in enumerate(g.coeffs):
                k = f.imin + a_idx + g.imin + b_idx
                prod = a * b
                acc[k] = acc[k] + prod if k in acc else prod
        floor = None
        for k, c in acc.items():
            if k > hi:
                v = _vlow(c)
                floor = v if floor is None else min(floor, v)
        tails = [x.alpha for x in (f, g) if x.beta is not None]
        alpha_r = min(tails) if tails else min(f.alpha, g.alpha)
        beta = None
        caps: dict = {}
        pairs = []
        for P in f._unknown_pieces():
            for Q in g._pieces():
                pairs.append((P, Q))
        for Q in g._unknown_pieces():
            for P in f._pieces():
                if P[0] is not None and P[1] is not None and P[0] == P[1]:
                    pairs.append((P, Q))
        for P, Q in pairs:
            fn = lambda k, P=P, Q=Q: _pair_bound(P, Q, k)
            br = _breaks(P, Q)
            # lower tail of the result
            m = _scan_min(lambda k: (lambda b: b if b is None or b is _NEG_INF else b + alpha_r * k)(fn(k)),
                          None, lo - 1, br)
            if m is _NEG_INF:
                raise PreconditionError("tail certificates too weak for this product")
            if m is not None:
                beta = -m if beta is None else max(beta, -m)
            # upper region
            m = _scan_min(fn, hi + 1, None, br)
            if m is _NEG_INF:
                raise PreconditionError("product needs coefficients beyond the window")
            if m is not None:
                fl = ceil_frac(m)
                floor = fl if floor is None else min(floor, fl)
            for k in range(lo, hi + 1):
                b = fn(k)
                if b is _NEG_INF:
                    raise PreconditionError("product needs coefficients beyond the window")
                if b is not None:
                    c = ceil_frac(b)
                    caps[k] = c if k not in caps else min(caps[k], c)
        fill = min((c.abs_prec for c in acc.values()), default=DEFAULT_PREC)
        window = []
        for k in range(lo, hi + 1):
            c = acc.get(k, PadicScalar.zero(p, fill))
            if k in caps:
                c = _cap(c, caps[k])
            window.append(c)
        return OCLaurent(p, lo, window, alpha_r, beta, floor, tag, a0)

    __rmul__ = __mul__

    def scale(self, c: PadicScalar) -> "OCLaurent":
        return self * OCLaurent(self.p, 0, [c])

    def shift(self, n: int) -> "OCLaurent":
        """Multiply by t^n."""
        beta = None if self.beta is None else self.beta - self.alpha * n
        return self._with(self.imin + n, self.coeffs, beta=beta)

    def widen(self, alpha, W) -> "OCLaurent":
        """Add an unknown error e with eta-weight >= W at alpha."""
        alpha, W = Fraction(alpha), Fraction(W)
        coeffs = [_cap(c, ceil_frac(W - alpha * min(self.imin + k, 0))) for k, c in enumerate(self.coeffs)]
        if self.beta is None:
            new_alpha, beta = alpha, -W
        else:
            new_alpha = min(self.alpha, alpha)
            b1 = self.beta - (self.alpha - new_alpha) * (1 - self.imin)
            b2 = -W - (alpha - new_alpha) * (1 - self.imin)
            beta = max(b1, b2)
        fl = ceil_frac(W)
        floor = fl if self.upper_floor is None else min(self.upper_floor, fl)
        return self._with(self.imin, coeffs, alpha=new_alpha, beta=beta, upper_floor=floor)

    def truncate(self, alpha, W) -> "OCLaurent":
        """Move every window entry of eta-weight >= W into an error ball."""
        alpha = Fraction(alpha)
        keep = []
        dropped = False
        for k, c in enumerate(self.coeffs):
            if c.v is not None and c.v + alpha * min(self.imin + k, 0) >= W:
                dropped = True
                keep.append(PadicScalar.zero(self.p, c.abs_prec))
            else:
                keep.append(c)
        out = self._with(self.imin, keep)
        return out.widen(alpha, W).trim() if dropped else out

    def trim(self) -> "OCLaurent":
        """Drop edge entries that carry no information beyond the tails."""
        coeffs = list(self.coeffs)
        lo = self.imin
        while coeffs and coeffs[0].is_zero and (
                self.beta is not None
                and coeffs[0].abs_prec >= self.alpha * (-lo) - self.beta):
            coeffs.pop(0)
            lo += 1
        while coeffs and coeffs[-1].is_zero and (
                self.upper_floor is not None and coeffs[-1].abs_prec >= self.upper_floor):
            coeffs.pop()
        return self._with(lo, coeffs)

    # other operations -----------------------------------------------------

    def reduce_mod_pi(self) -> FpLaurent:
        w = self.pi_norm()
        if not w.is_bottom and w.w < 0:
            raise PreconditionError("reduction mod pi needs an integral element")
        if self.beta is not None and self.alpha * (1 - self.imin) - self.beta < 1:
            raise PreconditionError("lower tail is not certified divisible by p")
        coeffs = {}
        for k, c in enumerate(self.coeffs):
            if c.abs_prec < 1:
                raise PreconditionError(f"coefficient {self.imin + k} unknown modulo p")
            if c.v == 0:
                coeffs[self.imin + k] = c.u % self.p
        tprec = None
        if self.upper_floor is not None and self.upper_floor < 1:
            tprec = self.imax + 1
        return FpLaurent(self.p, coeffs, tprec)

    def frobenius_sigma(self) -> "OCLaurent":
        """The reference Frobenius t -> t^p, trivial on Q_p."""
        p = self.p
        fill = self.min_abs_prec() or DEFAULT_PREC
        coeffs = []
        for k, c in enumerate(self.coeffs):
            coeffs.append(c)
            if k != len(self.coeffs) - 1:
                coeffs.extend(PadicScalar.zero(p, fill) for _ in range(p - 1))
        alpha = self.alpha / p
        a0 = None if self.alpha0 is None else self.alpha0 / p
        return OCLaurent(p, self.imin * p, coeffs, alpha, self.beta, self.upper_floor, self.tag, a0)

    def invert(self, prec: Optional[int] = None, tprec: int = 20) -> "OCLaurent":
        return oc_invert(self, prec, tprec)

    # comparison / serialization ---------------------------------------------

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c.is_zero:
                terms.append(f"({format_rational(c.centered())})t^{self.imin + k}")
        tail = "" if self.beta is None else f" tail(a={format_rational(self.alpha)},b={format_rational(self.beta)})"
        up = "" if self.upper_floor is None else f" up>={self.upper_floor}"
        return "OCLaurent(" + (" + ".join(terms) or "0") + tail + up + ")"

    def to_json(self) -> dict:
        doc = {
            "tag": self.tag,
            "imin": self.imin,
            "imax": self.imax,
            "coeffs": [c.to_json() for c in self.coeffs],
            "cert": {
                "alpha": format_rational(self.alpha),
                "beta": None if self.beta is None else format_rational(self.beta),
            },
            "upper_floor": self.upper_floor,
        }
        if self.alpha0 is not None:
            doc["alpha0"] = format_rational(self.alpha0)
        return doc

    @classmethod
    def from_json(cls, doc) -> "OCLaurent":
        required = {"tag", "imin", "imax", "coeffs", "cert", "upper_floor"}
        if not isinstance(doc, dict) or not required <= set(doc) or set(doc) - required - {"alpha0"}:
            raise SchemaError(f"OCLaurent fields must be {sorted(required)} (+alpha0)")
        coeffs = [PadicScalar.from_json(c) for c in doc["coeffs"]]
        if not isinstance(doc["imin"], int) or not isinstance(doc["imax"], int):
            raise SchemaError("imin/imax must be integers")
        if doc["imax"] - doc["imin"] + 1 != len(coeffs):
            raise SchemaError("window length does not match imin/imax")
        ps = {c.p for c in coeffs}
        if len(ps) > 1:
            raise SchemaError("mixed primes in window")
        cert = doc["cert"]
        if not isinstance(cert, dict) or set(cert) != {"alpha", "beta"}:
            raise SchemaError("cert needs exactly alpha and beta")
        beta = None if cert["beta"] is None else parse_rational(cert["beta"])
        uf = doc["upper_floor"]
        if uf is not None and (not isinstance(uf, int) or isinstance(uf, bool)):
            raise SchemaError("upper_floor must be an integer or null")
        p = ps.pop() if ps else doc.get("p", 2)
        a0 = doc.get("alpha0")
        return cls(p, doc["imin"], coeffs, parse_rational(cert["alpha"]), beta, uf,
                   doc["tag"], None if a0 is None else parse_rational(a0))


# module-level operations ----------------------------------------------------

def oc_add(f: OCLaurent, g: OCLaurent) -> OCLaurent:
    return f + g


def oc_mul(f: OCLaurent, g: OCLaurent) -> OCLaurent:
    return f * g


def eta_norm(f: OCLaurent, alpha) -> LogNorm:
    return f.eta_norm(alpha)


def pi_norm(f: OCLaurent) -> LogNorm:
    return f.pi_norm()


def reduce_mod_pi(f: OCLaurent) -> FpLaurent:
    return f.reduce_mod_pi()


def frobenius_sigma(f: OCLaurent) -> OCLaurent:
    return f.frobenius_sigma()


def lift_fp(fbar: FpLaurent, N: int = DEFAULT_PREC) -> OCLaurent:
    """Coefficient-wise lift with representatives in [0, p)."""
    if fbar.tprec is not None:
        raise PreconditionError("cannot lift a t-adically truncated series exactly")
    return OCLaurent.from_poly(fbar.p, dict(fbar.coeffs), N)


def _alpha_grid(f: OCLaurent, depth: int = 7):
    if f.beta is not None:
        base = f.alpha
    elif f.tag == "Eeta" and f.alpha0 is not None:
        base = f.alpha0
    else:
        base = Fraction(1)
    return [base / 2 ** k for k in range(depth)]


def _relative_prec(f: OCLaurent) -> int:
    rel = [c.N for c in f.coeffs if not c.is_zero]
    return min(rel) if rel else DEFAULT_PREC


def oc_invert(f: OCLaurent, prec: Optional[int] = None, tprec: int = 20) -> OCLaurent:
    """Inverse in E^dagger by a geometric series around a dominant term.

    First tries f = a_n t^n (1 + h) with the eta-norm of h below 1 for some
    admissible alpha; failing that, and when the lower tail is exact, the
    t-adic expansion around the lowest term (which leaves an unknown upper
    tail).  Raises PreconditionError when neither applies at this window.
    """
    p = f.p
    P = prec if prec is not None else _relative_prec(f)
    if all(c.is_zero for c in f.coeffs):
        raise PreconditionError("cannot invert an element with no certified nonzero term")
    cands = []
    for alpha in _alpha_grid(f):
        weights = []
        for k, c in enumerate(f.coeffs):
            if c.v is not None:
                weights.append((c.v + alpha * min(f.imin + k, 0), f.imin + k, c))
        wmin = min(w for w, _, _ in weights)
        top = [(i, c) for w, i, c in weights if w == wmin]
        if len(top) != 1:
            continue
        n, an = top[0]
        unit = OCLaurent(p, -n, [an.inverse()])
        h = f * unit - 1
        wh = h.eta_norm(alpha)
        if wh.is_bottom:
            return unit
        if wh.w > 0:
            cands.append((wh.w, alpha, unit, h))
    best = None
    if cands:
        # the largest alpha whose contraction is within half of the best one
        top_w = max(c[0] for c in cands)
        best = max((c for c in cands if 2 * c[0] >= top_w), key=lambda c: c[1])
    if best is not None:
        wh, alpha, unit, h = best
        K = ceil_frac(Fraction(P) / wh)
        term = OCLaurent.constant(1, p, P)
        total = term
        neg_h = -h
        for _ in range(K):
            term = (term * neg_h).truncate(alpha, P)
            total = (total + term).truncate(alpha, P)
        total = total.widen(alpha, (K + 1) * wh)
        return (total * unit).trim()
    if f.beta is None:
        nz = [(f.imin + k, c) for k, c in enumerate(f.coeffs) if not c.is_zero]
        n, an = nz[0]
        if an.v == min(_vlow(c) for _, c in nz) and an.v <= min(c.abs_prec for c in f.coeffs):
            unit = OCLaurent(p, -n, [an.inverse()])
            h = f * unit - 1
            h = h._cut_above(tprec)
            term = OCLaurent.constant(1, p, P)
            total = term
            for _ in range(tprec):
                term = (term * (-h))._cut_above(tprec)
                total = (total + term)._cut_above(tprec)
            total = total._cut_above(tprec, force=True)
            return (total * unit).trim()
    raise PreconditionError("no dominant term: element not invertible at this truncation")


def _cut_above(self: OCLaurent, T: int, force: bool = False) -> OCLaurent:
    """Forget coefficients above t^T, keeping an integral-relative floor."""
    if self.imax <= T and not force:
        return self
    keep = [c for k, c in enumerate(self.coeffs) if self.imin + k <= T]
    dropped = [c for k, c in enumerate(self.coeffs) if self.imin + k > T]
    floor = min([_vlow(c) for c in dropped] + [min((_vlow(c) for c in self.coeffs), default=0)])
    if self.upper_floor is not None:
        floor = min(floor, self.upper_floor)
    return self._with(self.imin, keep, upper_floor=floor)


OCLaurent._cut_above = _cut_above


def epsnorm_select(f: OCLaurent, alpha0, eps) -> tuple[Fraction, dict]:
    """Pick alpha = eps*alpha0 and verify the norm interpolation inequality.

    The inequality w(alpha) >= (1-eps)*w(0) + eps*w(alpha0) is checked in exact
    rational arithmetic; failure raises instead of returning.
    """
    alpha0, eps = Fraction(alpha0), Fraction(eps)
    if not (0 < eps <= 1):
        raise PreconditionError("eps must lie in (0, 1]")
    if alpha0 <= 0:
        raise PreconditionError("alpha0 must be positive")
    alpha = eps * alpha0
    w_a = f.eta_norm(alpha)
    w_inf = f.pi_norm()
    w_0 = f.eta_norm(alpha0)
    cert = {
        "alpha": alpha,
        "w_alpha": w_a,
        "w_pi": w_inf,
        "w_alpha0": w_0,
    }
    if w_a.is_bottom:
        cert["rhs"] = BOTTOM
        return alpha, cert
    if w_inf.is_bottom or w_0.is_bottom:
        raise CertificateViolation("inconsistent norms: partial BOTTOM")
    rhs = (1 - eps) * w_inf.w + eps * w_0.w
    cert["rhs"] = LogNorm(rhs)
    if w_a.w < rhs:
        raise PreconditionError("norm interpolation inequality fails at this truncation")
    return alpha, cert
