"""The Robba ring over the bounded Robba ring, its integral subring and residue field.

A ``RobbaElement`` is an exact two-variable Laurent polynomial F (rows indexed
by the power of y, or u) together with an optional deviation certificate
(alpha, s, C, delta): the true element f satisfies

    log_p ||f_j - F_j||_{p^-alpha} <= C + s*j - delta*|j|     for every j.

``cert is None`` means f = F exactly.  Every operation propagates the
certificate, so eta_s_norm is always a certified bound on the true element.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Optional, Sequence

from .errors import CertificateViolation, PreconditionError, SchemaError
from .laurent import OCLaurent
from .lpoly import (
    deriv_outer, eta_w1, eta_w_rows, frob2, norm_c, padd, pmul, pneg, pscale,
    pshift2, psub, split_outer, truncate_weighted, vq, ceil_frac,
)
from .padic import BOTTOM, LogNorm, PadicScalar, format_rational, parse_rational, teichmuller_roots
from .residue import (
    FpLaurent, ResidueDoubleSeries, hensel_root_residue, partial_valuation,
    residue_invert, residue_membership,
)

TAGS = ("Rint_Edagger", "R_Edagger", "R_E")
GRID = tuple(Fraction(1, 2 ** k) for k in range(6))
JSON_PREC = 40

__all__ = [
    "RobbaCert", "RobbaElement", "robba_add", "robba_mul", "eta_s_norm", "aux_norm_Rs",
    "residue_membership", "lift_residue", "partial_valuation", "residue_invert",
    "hensel_root_residue", "hensel_lift_int", "int_unit_invert", "substitute",
    "eisenstein_relation", "trace_map", "inclusion", "decompose", "recompose",
]


@dataclass(frozen=True)
class RobbaCert:
    alpha: Fraction
    s: Fraction
    C: Fraction
    delta: Fraction

    def __post_init__(self):
        for name in ("alpha", "s", "C", "delta"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.alpha < 0 or self.delta < 0:
            raise SchemaError("certificate needs alpha >= 0 and delta >= 0")

    @property
    def s_lo(self) -> Fraction:
        return self.s - self.delta

    @property
    def s_hi(self) -> Fraction:
        return self.s + self.delta

    def admits(self, alpha, s) -> bool:
        return alpha <= self.alpha and self.s_lo <= s <= self.s_hi

    def to_json(self) -> dict:
        return {k: format_rational(getattr(self, k)) for k in ("alpha", "s", "C", "delta")}


def _common(certs: Sequence[RobbaCert]):
    """A single (alpha, s, delta) implied by every certificate."""
    alpha = min(c.alpha for c in certs)
    lo = max(c.s_lo for c in certs)
    hi = min(c.s_hi for c in certs)
    if lo > hi:
        raise PreconditionError("growth certificates have no common s")
    if hi <= 0:
        raise PreconditionError("growth certificates admit no positive s")
    lo = max(lo, Fraction(0))
    return alpha, (lo + hi) / 2, (hi - lo) / 2


def _join_tags(a: str, b: str) -> str:
    return a if TAGS.index(a) >= TAGS.index(b) else b


class RobbaElement:
    __slots__ = ("p", "poly", "jmin", "jmax", "cert", "integral", "tag", "var")

    def __init__(self, p: int, poly: dict, cert: Optional[RobbaCert] = None, integral: Optional[bool] = None,
                 tag: str = "R_Edagger", var: str = "y", jmin: Optional[int] = None, jmax: Optional[int] = None):
        if tag not in TAGS:
            raise SchemaError(f"unknown base tag {tag!r}")
        if var not in ("y", "u"):
            raise SchemaError(f"variable must be y or u, not {var!r}")
        poly = {(int(j), int(i)): norm_c(Fraction(c) if not isinstance(c, int) else c)
                for (j, i), c in poly.items() if c}
        js = [j for j, _ in poly]
        if jmin is None:
            jmin = min(js, default=0)
        if jmax is None:
            jmax = max(js, default=jmin - 1)
        if js and (min(js) < jmin or max(js) > jmax):
            raise SchemaError("polynomial rows fall outside the declared window")
        window_integral = all(vq(c, p) >= 0 for c in poly.values())
        if integral is None:
            integral = window_integral
        elif integral and not window_integral:
            raise SchemaError("integral flag set but a window coefficient has negative valuation")
        if cert is not None and cert.alpha == 0 and tag != "R_E":
            raise SchemaError("alpha = 0 certificates belong to the R_E model")
        self.p = p
        self.poly = poly
        self.jmin = jmin
        self.jmax = jmax
        self.cert = cert
        self.integral = bool(integral)
        self.tag = tag
        self.var = var

    # construction ---------------------------------------------------------

    @classmethod
    def constant(cls, c, p: int, var: str = "y", **kw) -> "RobbaElement":
        return cls(p, {(0, 0): c} if c else {}, var=var, **kw)

    @classmethod
    def monomial(cls, c, j: int, i: int, p: int, var: str = "y", **kw) -> "RobbaElement":
        return cls(p, {(j, i): c}, var=var, **kw)

    @classmethod
    def from_rows(cls, p: int, rows: dict, **kw) -> "RobbaElement":
        """rows: {j: {i: coeff}}."""
        return cls(p, {(j, i): c for j, row in rows.items() for i, c in row.items()}, **kw)

    def _new(self, poly, cert="keep", integral=None, tag=None, var=None, window=None):
        jmin, jmax = window if window is not None else (None, None)
        if window is None and poly:
            js = [j for j, _ in poly]
            jmin, jmax = min(min(js), self.jmin), max(max(js), self.jmax)
        elif window is None:
            jmin, jmax = self.jmin, self.jmax
        return RobbaElement(self.p, poly, self.cert if cert == "keep" else cert,
                            integral, tag or self.tag, var or self.var, jmin, jmax)

    # queries --------------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.cert is None

    def rows(self) -> dict:
        return split_outer(self.poly)

    def row(self, j: int) -> dict:
        return {i: c for (jj, i), c in self.poly.items() if jj == j}

    def row_oc(self, j: int, N: int = JSON_PREC) -> OCLaurent:
        return OCLaurent.from_poly(self.p, self.row(j), N)

    def is_zero(self) -> bool:
        return not self.poly and self.cert is None

    def lowest_row(self) -> Optional[int]:
        return min((j for j, _ in self.poly), default=None)

    def __eq__(self, other):
        if not isinstance(other, RobbaElement):
            return NotImplemented
        return (self.p, self.poly, self.cert, self.var) == (other.p, other.poly, other.cert, other.var)

    def __hash__(self):
        return hash((self.p, tuple(sorted(self.poly.items())), self.cert, self.var))

    def __repr__(self):
        terms = " + ".join(f"({format_rational(c)}){self.var}^{j}t^{i}" for (j, i), c in sorted(self.poly.items()))
        cert = "" if self.cert is None else (
            f" ~[a={format_rational(self.cert.alpha)}, s={format_rational(self.cert.s)}, "
            f"C={format_rational(self.cert.C)}, d={format_rational(self.cert.delta)}]")
        return f"Robba[{self.var}]({terms or '0'}{cert})"

    # norms ----------------------------------------------------------------

    def window_weight(self, alpha, s) -> Optional[Fraction]:
        """min_j (eta-weight of F_j + s*j) over the exact window; None for 0."""
        alpha, s = Fraction(alpha), Fraction(s)
        best = None
        for j, w in eta_w_rows(self.poly, self.p, alpha).items():
            val = w + s * j
            if best is None or val < best:
                best = val
        return best

    def eta_s_norm(self, alpha, s) -> LogNorm:
        alpha, s = Fraction(alpha), Fraction(s)
        if s <= 0:
            raise PreconditionError("s' must be positive")
        if alpha < 0:
            raise PreconditionError("alpha must be non-negative")
        if self.cert is not None and not self.cert.admits(alpha, s):
            raise PreconditionError(
                f"(alpha, s') = ({format_rational(alpha)}, {format_rational(s)}) is not admissible "
                f"for the certificate {self.cert.to_json()}")
        best = self.window_weight(alpha, s)
        if self.cert is not None:
            bound = -self.cert.C
            best = bound if best is None or bound < best else best
        return BOTTOM if best is None else LogNorm(best)

    def aux_norm(self, alpha, s, c_shift) -> LogNorm:
        """Weight of sup_j ||f_j||_eta r^(-j s + |j| c) (the auxiliary ring norm)."""
        alpha, s, c_shift = Fraction(alpha), Fraction(s), Fraction(c_shift)
        if c_shift <= 0:
            raise PreconditionError("c_shift must be positive")
        if s <= 0:
            raise PreconditionError("s must be positive")
        best = None
        for j, w in eta_w_rows(self.poly, self.p, alpha).items():
            val = w + s * j - abs(j) * c_shift
            if best is None or val < best:
                best = val
        if self.cert is not None:
            cert = self.cert
            if alpha > cert.alpha or abs(s - cert.s) + c_shift > cert.delta:
                raise PreconditionError("parameters not admissible for the growth certificate")
            bound = -cert.C
            best = bound if best is None or bound < best else best
        return BOTTOM if best is None else LogNorm(best)

    def pi_weight_window(self) -> Optional[int]:
        """Smallest coefficient valuation in the window (None for 0)."""
        return min((vq(c, self.p) for c in self.poly.values()), default=None)

    # arithmetic -----------------------------------------------------------

    def _chk(self, other) -> "RobbaElement":
        if isinstance(other, (int, Fraction)):
            return RobbaElement.constant(other, self.p, var=self.var)
        if not isinstance(other, RobbaElement):
            raise TypeError(f"cannot combine RobbaElement with {type(other).__name__}")
        if other.p != self.p:
            raise SchemaError(f"prime mismatch: {self.p} vs {other.p}")
        if other.var != self.var:
            raise SchemaError(f"incompatible variable names: {self.var} vs {other.var}")
        return other

    def __add__(self, other):
        other = self._chk(other)
        certs = [x.cert for x in (self, other) if x.cert is not None]
        cert = None
        if certs:
            alpha, s, delta = _common(certs)
            cert = RobbaCert(alpha, s, max(c.C for c in certs), delta)
        poly = padd(self.poly, other.poly)
        return RobbaElement(self.p, poly, cert, self.integral and other.integral,
                            _join_tags(self.tag, other.tag), self.var,
                            min(self.jmin, other.jmin), max(self.jmax, other.jmax))

    __radd__ = __add__

    def __neg__(self):
        return self._new(pneg(self.poly), integral=self.integral)

    def __sub__(self, other):
        return self + (-self._chk(other))

    def __rsub__(self, other):
        return self._chk(other) + (-self)

    def _mass(self, alpha, s, delta) -> Optional[Fraction]:
        """max_k (log ||F_k||_alpha - s*k + delta*|k|) over the window rows."""
        best = None
        for k, w in eta_w_rows(self.poly, self.p, alpha).items():
            val = -w - s * k + delta * abs(k)
            if best is None or val > best:
                best = val
        return best

    def __mul__(self, other):
        other = self._chk(other)
        f, g = self, other
        cert = None
        certs = [x.cert for x in (f, g) if x.cert is not None]
        if certs:
            alpha, s, delta = _common(certs)
            parts = []
            if g.cert is not None:
                m = f._mass(alpha, s, delta)
                if m is not None:
                    parts.append(g.cert.C + m)
            if f.cert is not None:
                m = g._mass(alpha, s, delta)
                if m is not None:
                    parts.append(f.cert.C + m)
            if f.cert is not None and g.cert is not None:
                parts.append(f.cert.C + g.cert.C)
            if parts:
                cert = RobbaCert(alpha, s, max(parts), delta)
            else:
                cert = RobbaCert(alpha, s, min(c.C for c in certs), delta)
        poly = pmul(f.poly, g.poly)
        lo = f.jmin + g.jmin if f.jmin <= f.jmax and g.jmin <= g.jmax else 0
        hi = f.jmax + g.jmax if f.jmin <= f.jmax and g.jmin <= g.jmax else -1
        if poly:
            js = [j for j, _ in poly]
            lo, hi = min(lo, min(js)), max(hi, max(js))
        return RobbaElement(self.p, poly, cert, f.integral and g.integral,
                            _join_tags(f.tag, g.tag), self.var, lo, hi)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise PreconditionError("use int_unit_invert for inverses")
        result = RobbaElement.constant(1, self.p, var=self.var)
        for _ in range(n):
            result = result * self
        return result

    def scale(self, c) -> "RobbaElement":
        c = Fraction(c)
        if c == 0:
            return RobbaElement(self.p, {}, None, True, self.tag, self.var, self.jmin, self.jmax)
        cert = None
        if self.cert is not None:
            cert = RobbaCert(self.cert.alpha, self.cert.s, self.cert.C - vq(c, self.p), self.cert.delta)
        return self._new(pscale(self.poly, c), cert=cert, integral=None)

    def shift(self, n: int) -> "RobbaElement":
        """Multiply by var^n."""
        cert = None
        if self.cert is not None:
            c = self.cert
            cert = RobbaCert(c.alpha, c.s, c.C - c.s * n + c.delta * abs(n), c.delta)
        return RobbaElement(self.p, pshift2(self.poly, n), cert, self.integral, self.tag, self.var,
                            self.jmin + n, self.jmax + n)

    def shift_t(self, n: int) -> "RobbaElement":
        """Multiply by t^n (exact elements only)."""
        if self.cert is not None:
            raise PreconditionError("t-shift of an inexact element is not supported")
        return self._new(pshift2(self.poly, 0, n))

    def truncate(self, alpha, s, W, delta=0) -> "RobbaElement":
        """Drop every term of weight >= W at (alpha, s, delta) and certify it."""
        alpha, s, W, delta = Fraction(alpha), Fraction(s), Fraction(W), Fraction(delta)
        kept, changed = truncate_weighted(self.poly, self.p, alpha, s, W, delta)
        if not changed:
            return self
        C = -W
        if self.cert is not None:
            c = self.cert
            if alpha > c.alpha or s - delta < c.s_lo or s + delta > c.s_hi:
                raise PreconditionError("truncation parameters outside the existing certificate")
            C = max(C, c.C)
        return RobbaElement(self.p, kept, RobbaCert(alpha, s, C, delta), self.integral, self.tag,
                            self.var, self.jmin, self.jmax)

    def with_ball(self, alpha, s, W) -> "RobbaElement":
        """Add an unknown error of (alpha, s)-weight >= W."""
        alpha, s, W = Fraction(alpha), Fraction(s), Fraction(W)
        C = -W
        if self.cert is not None:
            c = self.cert
            if not c.admits(alpha, s):
                raise PreconditionError("ball parameters outside the existing certificate")
            C = max(C, c.C)
            alpha = min(alpha, c.alpha)
        return RobbaElement(self.p, self.poly, RobbaCert(alpha, s, C, 0), self.integral, self.tag,
                            self.var, self.jmin, self.jmax)

    def derivative(self) -> "RobbaElement":
        """d/dvar."""
        cert = None
        if self.cert is not None:
            c = self.cert
            cert = RobbaCert(c.alpha, c.s, c.C + c.s + c.delta, c.delta)
        return RobbaElement(self.p, deriv_outer(self.poly), cert, self.integral, self.tag, self.var,
                            self.jmin - 1, self.jmax - 1)

    def frobenius(self) -> "RobbaElement":
        """Reference Frobenius: var -> var^p, t -> t^p."""
        p = self.p
        cert = None
        if self.cert is not None:
            c = self.cert
            cert = RobbaCert(c.alpha / p, c.s / p, c.C, c.delta / p)
        return RobbaElement(p, frob2(self.poly, p), cert, self.integral, self.tag, self.var,
                            self.jmin * p, self.jmax * p)

    def rename(self, var: str) -> "RobbaElement":
        return RobbaElement(self.p, self.poly, self.cert, self.integral, self.tag, var, self.jmin, self.jmax)

    def relax_to_E(self) -> "RobbaElement":
        """Same window viewed in the pi-adic-only model (certificate at alpha = 0)."""
        cert = None
        if self.cert is not None:
            c = self.cert
            cert = RobbaCert(0, c.s, c.C, c.delta)
        return RobbaElement(self.p, self.poly, cert, self.integral, "R_E", self.var, self.jmin, self.jmax)

    # residue field ------------------------------------------------------------

    def reduce_mod_pi(self) -> ResidueDoubleSeries:
        """Reduction of an integral element, as far in y as the certificate allows."""
        if not self.integral:
            raise PreconditionError("reduction mod pi needs an integral element")
        p = self.p
        rows: dict = {}
        for (j, i), c in self.poly.items():
            if vq(c, p) == 0:
                num = c if isinstance(c, int) else c.numerator * pow(c.denominator, -1, p)
                rows.setdefault(j, {})[i] = num % p
        yprec = None
        if self.cert is not None:
            c = self.cert
            # error rows are divisible by p wherever -C - s*j + delta*|j| >= 1
            if c.delta >= c.s:
                if -c.C - (c.s - c.delta) * 0 < 1:
                    raise PreconditionError("certificate too weak to reduce modulo pi")
            else:
                J = (-c.C - 1) / (c.s - c.delta)
                if J < 0:
                    raise PreconditionError("certificate too weak to reduce modulo pi")
                yprec = int(J // 1) + 1
                if -c.C + (c.s + c.delta) * 0 < 1:
                    raise PreconditionError("certificate too weak to reduce modulo pi")
        series = {j: FpLaurent(p, r) for j, r in rows.items() if yprec is None or j < yprec}
        cc, dd = _window_cd(series)
        return ResidueDoubleSeries.from_dict(p, series, cc, dd, yprec)

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        rows = self.rows()
        coeffs = []
        for j in range(self.jmin, self.jmax + 1):
            coeffs.append(_row_to_oc(self.p, rows.get(j, {})).to_json())
        cert = self.cert.to_json() if self.cert is not None else {
            "alpha": "1", "s": "1", "C": None, "delta": "0"}
        return {
            "p": self.p,
            "var": self.var,
            "jmin": self.jmin,
            "jmax": self.jmax,
            "coeffs": coeffs,
            "cert": cert,
            "integral": self.integral,
            "tag": self.tag,
        }

    @classmethod
    def from_json(cls, doc) -> "RobbaElement":
        need = {"var", "jmin", "jmax", "coeffs", "cert", "integral"}
        if not isinstance(doc, dict) or not need <= set(doc) or set(doc) - need - {"p", "tag"}:
            raise SchemaError(f"RobbaElement fields must be {sorted(need)} (+p, tag)")
        for key in ("jmin", "jmax"):
            if not isinstance(doc[key], int) or isinstance(doc[key], bool):
                raise SchemaError(f"{key} must be an integer")
        if doc["jmax"] - doc["jmin"] + 1 != len(doc["coeffs"]):
            raise SchemaError("window length does not match jmin/jmax")
        if not isinstance(doc["integral"], bool):
            raise SchemaError("integral must be a boolean")
        cert_doc = doc["cert"]
        if not isinstance(cert_doc, dict) or set(cert_doc) != {"alpha", "s", "C", "delta"}:
            raise SchemaError("cert needs exactly alpha, s, C, delta")
        rows = [OCLaurent.from_json(c) for c in doc["coeffs"]]
        primes = {r.p for r in rows if r.coeffs} | ({doc["p"]} if "p" in doc else set())
        if len(primes) != 1:
            raise SchemaError("cannot determine a single prime")
        p = primes.pop()
        tag = doc.get("tag", "R_Edagger")
        poly = {}
        exact = cert_doc["C"] is None
        alpha = parse_rational(cert_doc["alpha"])
        s = parse_rational(cert_doc["s"])
        delta = parse_rational(cert_doc["delta"])
        C = None if exact else parse_rational(cert_doc["C"])
        for k, oc in enumerate(rows):
            j = doc["jmin"] + k
            for n, a in enumerate(oc.coeffs):
                if not a.is_zero:
                    poly[(j, oc.imin + n)] = a.centered()
            if exact:
                if oc.beta is not None or oc.upper_floor is not None:
                    raise SchemaError("C = null declares an exact window but a row has tails")
                continue
            # fold the row's own uncertainty into C
            err = _row_error_weight(oc, alpha)
            if err is not None:
                need_C = -err - s * j + delta * abs(j)
                C = max(C, need_C)
        cert = None if exact else RobbaCert(alpha, s, C, delta)
        return cls(p, poly, cert, doc["integral"], tag, doc["var"], doc["jmin"], doc["jmax"])


def _row_to_oc(p: int, row: dict) -> OCLaurent:
    """Exact serialization of a row: each unit part gets just enough digits."""
    if not row:
        return OCLaurent(p, 0, ())
    lo, hi = min(row), max(row)
    coeffs = []
    for i in range(lo, hi + 1):
        c = Fraction(row.get(i, 0))
        if c == 0:
            coeffs.append(PadicScalar.zero(p, 1))
            continue
        v = vq(c, p)
        unit = c / Fraction(p) ** v
        if unit.denominator == 1:
            u = unit.numerator
            N = 1
            while p ** N <= 2 * abs(u):
                N += 1
            coeffs.append(PadicScalar(p, v, u % p ** N, N))
        else:
            coeffs.append(PadicScalar.from_rational(c, p, JSON_PREC))
    return OCLaurent(p, lo, coeffs)


def _row_error_weight(oc: OCLaurent, alpha) -> Optional[Fraction]:
    """Weight bound of the part of a serialized row not captured exactly."""
    best = None
    for n, a in enumerate(oc.coeffs):
        i = oc.imin + n
        rep = a.centered()
        exact_digits = (a.v is None and a.N == 1) or (
            a.v is not None and (rep / Fraction(a.p) ** a.v).denominator == 1 and a.p ** a.N > 2 * abs(rep / Fraction(a.p) ** a.v))
        if exact_digits:
            continue
        w = a.abs_prec + alpha * min(i, 0)
        best = w if best is None or w < best else best
    if oc.beta is not None:
        w = oc.alpha * (1 - oc.imin) - oc.beta + alpha * min(oc.imin - 1, 0) - (oc.alpha - alpha) * 0
        best = w if best is None or w < best else best
    if oc.upper_floor is not None:
        w = oc.upper_floor + alpha * min(oc.imax + 1, 0)
        best = w if best is None or w < best else best
    return None if best is None else Fraction(best)


def _window_cd(series: dict) -> tuple[int, int]:
    """Small (c, d) with -v_t(f_j) <= c*j + d on a finite window."""
    c = 0
    for j, f in series.items():
        v = f.valuation()
        if v is not None and j > 0 and -v > 0:
            c = max(c, ceil(Fraction(-v, j)))
    d = 0
    for j, f in series.items():
        v = f.valuation()
        if v is not None:
            d = max(d, -v - c * j)
    return c, d


# module-level operations ---------------------------------------------------

def robba_add(f: RobbaElement, g: RobbaElement) -> RobbaElement:
    return f + g


def robba_mul(f: RobbaElement, g: RobbaElement) -> RobbaElement:
    return f * g


def eta_s_norm(f: RobbaElement, alpha, s) -> LogNorm:
    return f.eta_s_norm(alpha, s)


def aux_norm_Rs(f: RobbaElement, alpha, s, c_shift) -> LogNorm:
    return f.aux_norm(alpha, s, c_shift)


def lift_residue(fbar: ResidueDoubleSeries, alpha=Fraction(1)) -> RobbaElement:
    """Coefficient-wise lift with representatives in [0, p).

    When the residue series is only known modulo y^yprec (or some row modulo a
    power of t), the unknown part is covered by the certificate obtained from
    the growth constants: log ||f_j||_alpha <= alpha*(c*j + d).
    """
    status, j = residue_membership(fbar, fbar.c, fbar.d)
    if status == "reject":
        raise PreconditionError(f"residue series violates its (c, d) certificate at j = {j}")
    alpha = Fraction(alpha)
    p = fbar.p
    poly = {}
    truncated = fbar.yprec is not None
    for j, f in fbar.rows().items():
        for i, c in f.coeffs.items():
            poly[(j, i)] = c
        if f.tprec is not None:
            truncated = True
            if j < 0 or -f.tprec > fbar.c * j + fbar.d:
                raise PreconditionError(f"row {j} is truncated below its growth bound")
    cert = None
    if truncated:
        if alpha <= 0:
            raise PreconditionError("a truncated lift needs alpha > 0")
        cert = RobbaCert(alpha, alpha * fbar.c + 1, alpha * fbar.d, 1)
    return RobbaElement(p, poly, cert, True, "Rint_Edagger", "y")


def _grid_pairs(certs, alphas=GRID, ss=GRID):
    for a in alphas:
        for s in ss:
            if all(c is None or c.admits(a, s) for c in certs):
                yield a, s


def int_unit_invert(a: RobbaElement, W=12, length: Optional[int] = None,
                    alpha=None, s=None, log: Optional[list] = None) -> RobbaElement:
    """Inverse of an integral element with invertible residue.

    u lifts the residue inverse, x = 1 - a*u is then small for some (alpha, s'),
    and a^-1 = u * sum x^k up to weight W.
    """
    if not a.integral:
        raise PreconditionError("int_unit_invert needs an integral element")
    W = Fraction(W)
    abar = a.reduce_mod_pi()
    m = abar.lowest()
    if m is None:
        raise PreconditionError("element is divisible by pi: not a unit of R^int")
    lead = abar.coeff(m)
    if len(lead.coeffs) != 1:
        raise PreconditionError(
            "leading residue coefficient is not a monomial in t: its inverse has no finite "
            "eta-precision representative at this truncation")
    L = length if length is not None else 2 * (a.jmax - a.jmin + 1) + 4
    if abar.yprec is not None:
        L = min(L, abar.yprec - m)
    ubar = residue_invert(abar, L)
    u = RobbaElement(a.p, {(j, i): c for j, f in ubar.rows().items() for i, c in f.coeffs.items()},
                     None, True, a.tag, a.var)
    x = RobbaElement.constant(1, a.p, var=a.var) - a * u
    if x.is_zero():
        return u
    if alpha is not None and s is not None:
        pairs = [(Fraction(alpha), Fraction(s))]
    else:
        pairs = list(_grid_pairs([x.cert]))
    best = None
    for al, ss in pairs:
        wx = x.eta_s_norm(al, ss)
        if wx.is_bottom:
            return u
        if wx.w > 0 and (best is None or wx.w > best[0]):
            best = (wx.w, al, ss)
    if best is None:
        raise PreconditionError("no (alpha, s') makes 1 - a*u small at this truncation")
    wx, al, ss = best
    wu = u.window_weight(al, ss)
    K = max(1, ceil_frac((W - wu) / wx))
    term = RobbaElement.constant(1, a.p, var=a.var)
    total = term
    for _ in range(1, K):
        term = (term * x).truncate(al, ss, W - wu)
        total = (total + term).truncate(al, ss, W - wu)
    result = (u * total).truncate(al, ss, W).with_ball(al, ss, min(W, wu + K * wx))
    if log is not None:
        log.append({"alpha": al, "s": ss, "w_x": wx, "terms": K, "w_u": wu})
    return RobbaElement(result.p, result.poly, result.cert, True, a.tag, a.var, result.jmin, result.jmax)


# Hensel lifting in R^int -------------------------------------------------------

def _eval_poly(coeffs: list, y: RobbaElement, al, ss, W) -> RobbaElement:
    """sum coeffs[k] * y^k by Horner, truncating at weight W."""
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = (acc * y + c).truncate(al, ss, W)
    return acc


def _unit_inverse_near_one(z: RobbaElement, al, ss, W) -> RobbaElement:
    """(1 + z)^-1 for z of positive weight, to weight W."""
    wz = z.eta_s_norm(al, ss)
    one = RobbaElement.constant(1, z.p, var=z.var)
    if wz.is_bottom:
        return one
    if wz.w <= 0:
        raise PreconditionError("P'(y_n) is not close to 1")
    K = ceil_frac(Fraction(W) / wz.w)
    term, total = one, one
    for _ in range(K):
        term = (term * (-z)).truncate(al, ss, W)
        total = (total + term).truncate(al, ss, W)
    return total.with_ball(al, ss, min(Fraction(W), (K + 1) * wz.w))


def hensel_lift_int(a: list, W=12, max_iter: int = 12, alphas=GRID, ss=GRID) -> dict:
    """Root y = 1 mod pi of X^m - X^(m-1) + a_2 X^(m-2) + ... + a_m by Newton.

    ``a`` lists a_2 .. a_m.  Returns the root, the chosen (alpha, s'), and the
    log of w_n = weight of P(y_n) P'(y_n)^-1, checked against w_n >= 2^n w_0.
    """
    if not a:
        raise PreconditionError("need at least a_2")
    p = a[0].p
    var = a[0].var
    m = len(a) + 1
    W = Fraction(W)
    for k, ak in enumerate(a, start=2):
        if not ak.integral:
            raise PreconditionError(f"a_{k} is not integral")
        v = ak.pi_weight_window()
        if v is not None and v < 1:
            raise PreconditionError(f"a_{k} is not divisible by pi")
    one = RobbaElement.constant(1, p, var=var)
    # P as a coefficient list by increasing degree
    P = [RobbaElement(p, {}, var=var) for _ in range(m + 1)]
    P[m] = one
    P[m - 1] = -one
    for k, ak in enumerate(a, start=2):
        P[m - k] = P[m - k] + ak
    dP = [P[k].scale(k) for k in range(1, m + 1)]
    certs = [ak.cert for ak in a]
    best = None
    for al, s in _grid_pairs(certs, alphas, ss):
        weights = [ak.eta_s_norm(al, s) for ak in a]
        if any(not w.is_bottom and w.w <= 0 for w in weights):
            continue
        P1 = sum(a[1:], a[0])
        w0 = P1.eta_s_norm(al, s)
        if w0.is_bottom:
            best = (None, al, s)
            break
        if w0.w > 0 and (best is None or w0.w > best[0]):
            best = (w0.w, al, s)
    if best is None:
        raise PreconditionError("no admissible (alpha, s') with all ||a_k|| < 1 at this truncation")
    _, al, s = best
    y = one
    log = []
    w0 = None
    for n in range(max_iter + 1):
        Py = _eval_poly(P, y, al, s, W + 1)
        dPy = _eval_poly(dP, y, al, s, W + 1)
        inv = _unit_inverse_near_one(dPy - one, al, s, W + 1)
        Q = (Py * inv).truncate(al, s, W + 1)
        wq = Q.eta_s_norm(al, s)
        wn = None if wq.is_bottom else wq.w
        if n == 0:
            w0 = wn
        entry = {"n": n, "w": wq, "envelope": None if w0 is None else (2 ** n) * w0}
        if wn is not None and wn < W and w0 is not None:
            entry["ok"] = wn >= (2 ** n) * w0
            if not entry["ok"]:
                log.append(entry)
                raise CertificateViolation(f"Newton step {n}: w = {wn} below 2^n w_0 = {(2 ** n) * w0}")
        else:
            entry["ok"] = True
        log.append(entry)
        if wn is None or wn >= W:
            final = W + 1 if wn is None else min(wn, W + 1)
            root = y.with_ball(al, s, final) if wn is not None or y.cert is not None else y
            root = RobbaElement(p, root.poly, root.cert, True, "Rint_Edagger", var, root.jmin, root.jmax)
            return {"root": root, "alpha": al, "s": s, "log": log, "iterations": n}
        y = (y - Q).truncate(al, s, W + 1)
    raise PreconditionError("Newton iteration did not reach the precision floor within the budget")


# substitution and Kummer extensions ------------------------------------------

def _row_element(f: RobbaElement, j: int, var: str) -> RobbaElement:
    return RobbaElement(f.p, {(0, i): c for i, c in f.row(j).items()}, None, None, f.tag, var)


def substitute(f: RobbaElement, g: RobbaElement, W=None, log: Optional[list] = None) -> RobbaElement:
    """sum_j f_j g^j for g = u^n (g_0 + g_1 u + ...) with g_0 a unit.

    Positive rows use powers of g, negative rows powers of
    g^-1 = u^-n (g_0 + ...)^-1.  The deviation of f is carried over only when
    ||g|| and ||g^-1|| close the estimate at the chosen (alpha, s_u); otherwise
    the substitution is refused.
    """
    if f.p != g.p:
        raise SchemaError("prime mismatch")
    n = g.lowest_row()
    if n is None or n < 1:
        raise PreconditionError("g must be divisible by u (n >= 1)")
    if not g.integral:
        raise PreconditionError("g must be integral")
    h = g.shift(-n)
    h0 = h.row(0)
    if not h0 or min(vq(c, g.p) for c in h0.values()) != 0:
        raise PreconditionError("leading coefficient g_0 is not a unit")
    info = {"n": n}
    if n == 1:
        info["flag"] = "degree-1 substitution (an automorphism); offered but flagged"
    var = g.var
    rows = f.rows()
    need_inverse = any(j < 0 for j in rows)
    positive_exact = not need_inverse and f.cert is None and g.cert is None
    if positive_exact and W is None:
        result = RobbaElement(f.p, {}, None, None, _join_tags(f.tag, g.tag), var)
        if rows:
            top = max(rows)
            result = _row_element(f, top, var)
            for j in range(top - 1, -1, -1):
                result = result * g + _row_element(f, j, var)
        if log is not None:
            log.append(info)
        return result
    if W is None:
        raise PreconditionError("inexact or two-sided substitution needs a target weight W")
    W = Fraction(W)
    al = s_u = None
    if f.cert is not None:
        al, s_u = f.cert.alpha, f.cert.s / n
        if g.cert is not None and not g.cert.admits(al, s_u):
            raise PreconditionError("g's certificate does not admit the substitution parameters")
    inv_log: list = []
    ginv = None
    if need_inverse or f.cert is not None:
        hinv = int_unit_invert(h, W + 2, alpha=al, s=s_u, log=inv_log)
        if al is None and inv_log:
            al, s_u = inv_log[-1]["alpha"], inv_log[-1]["s"]
        ginv = hinv.shift(-n)
    if al is None:
        al, s_u = GRID[1], GRID[1]
    result = RobbaElement(f.p, {}, None, None, _join_tags(f.tag, g.tag), var)
    if rows:
        pos = [j for j in rows if j >= 0]
        neg = [j for j in rows if j < 0]
        power = RobbaElement.constant(1, f.p, var=var)
        for j in range(0, max(pos) + 1 if pos else 0):
            if j in rows:
                result = (result + _row_element(f, j, var) * power).truncate(al, s_u, W)
            power = (power * g).truncate(al, s_u, W)
        power = RobbaElement.constant(1, f.p, var=var)
        for j in range(-1, min(neg) - 1 if neg else 0, -1):
            power = (power * ginv).truncate(al, s_u, W)
            if j in rows:
                result = (result + _row_element(f, j, var) * power).truncate(al, s_u, W)
    if f.cert is not None:
        wg = g.eta_s_norm(al, s_u)
        wgi = ginv.eta_s_norm(al, s_u)
        c = f.cert
        closes = (wg.is_bottom or wg.w >= c.s - c.delta) and (wgi.is_bottom or wgi.w >= -(c.s + c.delta))
        info.update({"w_g": wg, "w_ginv": wgi, "closes": closes})
        if not closes:
            raise PreconditionError("the growth estimate for sum f_j g^j does not close at this truncation")
        result = result.with_ball(al, s_u, -c.C)
    info.update({"alpha": al, "s": s_u})
    if log is not None:
        log.append(info)
    return result


def eisenstein_relation(h: list, m: int, prec: int, inv=None) -> dict:
    """Power series c_0..c_{m-1} in y with u^m + sum_k c_k u^k = 0, y = u^m h(u).

    ``h`` lists h_0, h_1, ... (coefficients in E^dagger or F_p((t)); any ring
    elements supporting +, -, * and an inverse for h_0).  Solves the
    triangular recursion on N = m*i + k and then re-checks every u^N
    coefficient by substitution.  Returns {"c": c[k][i], "residuals": [...]}.
    """
    if m < 1:
        raise PreconditionError("m must be positive")
    if not h:
        raise PreconditionError("empty g")
    zero = _zero_like(h[0])
    one_like = _one_like(h[0])
    try:
        h0inv = inv(h[0]) if inv is not None else _default_inv(h[0])
    except PreconditionError as exc:
        raise PreconditionError(f"recursion not triangularizable: {exc}") from exc
    top = m * (prec + 1)
    # powers of h truncated in u-degree < top
    hp = [[one_like] + [zero] * (top - 1)]
    hh = list(h[:top]) + [zero] * max(0, top - len(h))
    for i in range(1, prec + 1):
        prev = hp[-1]
        cur = []
        for e in range(top):
            acc = zero
            for a in range(e + 1):
                if not _is_zero(hh[a]) and not _is_zero(prev[e - a]):
                    acc = acc + hh[a] * prev[e - a]
            cur.append(acc)
        hp.append(cur)
    h0inv_pow = [one_like]
    for _ in range(prec):
        h0inv_pow.append(h0inv_pow[-1] * h0inv)
    c = [[zero] * (prec + 1) for _ in range(m)]

    def others(N, skip):
        acc = one_like if N == m else zero
        for i2 in range(prec + 1):
            for k2 in range(m):
                if (k2, i2) == skip:
                    continue
                e = N - k2 - m * i2
                if 0 <= e < top and not _is_zero(c[k2][i2]):
                    acc = acc + c[k2][i2] * hp[i2][e]
        return acc

    for N in range(top):
        i, k = divmod(N, m)
        c[k][i] = -(others(N, (k, i)) * h0inv_pow[i])
    residuals = [others(N, None) for N in range(top)]
    return {
        "c": c,
        "residuals": residuals,
        "residual_weights": [_weight(x) for x in residuals],
        "coefficient_weights": [[_weight(x) for x in row] for row in c],
    }


def _weight(x) -> LogNorm:
    """pi-adic weight (BOTTOM for a certified zero); residue elements are 0 or bottom."""
    if isinstance(x, OCLaurent):
        return x.pi_norm()
    if isinstance(x, FpLaurent):
        return BOTTOM if x.known_zero() else LogNorm(0)
    return BOTTOM if x == 0 else LogNorm(0)


def _zero_like(x):
    if isinstance(x, OCLaurent):
        return OCLaurent(x.p, 0, ())
    if isinstance(x, FpLaurent):
        return FpLaurent.zero(x.p)
    return 0


def _one_like(x):
    if isinstance(x, OCLaurent):
        return OCLaurent.constant(1, x.p, _rel_prec(x))
    if isinstance(x, FpLaurent):
        return FpLaurent.one(x.p)
    return 1


def _rel_prec(x: OCLaurent) -> int:
    rel = [c.N for c in x.coeffs if not c.is_zero]
    return min(rel) if rel else 20


def _default_inv(x):
    if isinstance(x, OCLaurent):
        return x.invert()
    if isinstance(x, FpLaurent):
        return x.inverse()
    return Fraction(1) / x


def _is_zero(x) -> bool:
    if isinstance(x, OCLaurent):
        return not x.coeffs and x.exact_tails
    if isinstance(x, FpLaurent):
        return x.is_zero()
    return x == 0


def trace_map(f: RobbaElement, m: int, prec: int = 20) -> RobbaElement:
    """Trace from the Kummer extension y = u^m down to y: sum over zeta^m = 1 of f(zeta u)."""
    p = f.p
    if m < 1 or (p - 1) % m != 0:
        raise PreconditionError(f"m = {m} must divide p - 1 = {p - 1}")
    if f.var != "u":
        raise SchemaError("trace_map expects an element in u")
    roots = teichmuller_roots(m, p, prec)
    mod = p ** prec
    for r in range(m):
        total = sum(pow(z, r, mod) for z in roots) % mod
        expect = m % mod if r == 0 else 0
        if total != expect:
            raise CertificateViolation(f"character sum for r = {r} is {total}, expected {expect}")
    poly = {(j // m, i): c * m for (j, i), c in f.poly.items() if j % m == 0}
    cert = None
    if f.cert is not None:
        c = f.cert
        cert = RobbaCert(c.alpha, m * c.s, c.C, m * c.delta)
    jmin = -((-f.jmin) // m) if f.jmin <= f.jmax else 0
    jmax = f.jmax // m if f.jmin <= f.jmax else -1
    return RobbaElement(p, poly, cert, f.integral, f.tag, "y", jmin, max(jmax, jmin - 1))


def inclusion(f: RobbaElement, m: int) -> RobbaElement:
    """y -> u^m."""
    if f.var != "y":
        raise SchemaError("inclusion expects an element in y")
    cert = None
    if f.cert is not None:
        c = f.cert
        cert = RobbaCert(c.alpha, c.s / m, c.C, c.delta / m)
    poly = {(j * m, i): c for (j, i), c in f.poly.items()}
    return RobbaElement(f.p, poly, cert, f.integral, f.tag, "u", f.jmin * m, f.jmax * m)


def decompose(F: RobbaElement, m: int) -> list:
    """F = sum_r u^r F_r(u^m) with F_r in y, r = 0..m-1."""
    if F.var != "u":
        raise SchemaError("decompose expects an element in u")
    parts = []
    for r in range(m):
        poly = {((j - r) // m, i): c for (j, i), c in F.poly.items() if (j - r) % m == 0}
        cert = None
        if F.cert is not None:
            c = F.cert
            cert = RobbaCert(c.alpha, m * c.s, c.C + r * (c.s + c.delta), m * c.delta)
        parts.append(RobbaElement(F.p, poly, cert, F.integral, F.tag, "y"))
    return parts


def recompose(parts: list, m: int) -> RobbaElement:
    if len(parts) != m:
        raise SchemaError("need exactly m parts")
    total = None
    for r, part in enumerate(parts):
        term = inclusion(part, m).shift(r)
        total = term if total is None else total + term
    return total
