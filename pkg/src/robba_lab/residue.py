"""The residue field F_p((t))^dagger((y)).

``FpLaurent`` is a Laurent series over F_p, either an exact Laurent polynomial
or known modulo t^tprec.  ``ResidueDoubleSeries`` is a window of them indexed
by the y-exponent together with a linear growth certificate (c, d):
-v_t(f_j) <= c*j + d for every j.
"""

from __future__ import annotations

from math import comb
from typing import Optional

from .errors import CertificateViolation, PreconditionError, SchemaError
from .lpoly import pmul

DEFAULT_TPREC = 40


class FpLaurent:
    __slots__ = ("p", "coeffs", "tprec")

    def __init__(self, p: int, coeffs: dict, tprec: Optional[int] = None):
        self.p = p
        self.tprec = tprec
        out = {}
        for i, c in coeffs.items():
            c %= p
            if c and (tprec is None or i < tprec):
                out[int(i)] = c
        self.coeffs = out

    @classmethod
    def zero(cls, p: int) -> "FpLaurent":
        return cls(p, {})

    @classmethod
    def one(cls, p: int) -> "FpLaurent":
        return cls(p, {0: 1})

    @classmethod
    def monomial(cls, c: int, n: int, p: int) -> "FpLaurent":
        return cls(p, {n: c})

    # queries --------------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.tprec is None

    def is_zero(self) -> bool:
        """Certified zero: exact and empty."""
        return not self.coeffs and self.tprec is None

    def known_zero(self) -> bool:
        """Zero to the known precision."""
        return not self.coeffs

    def valuation(self) -> Optional[int]:
        """v_t, or None when no term is known to be nonzero."""
        return min(self.coeffs) if self.coeffs else None

    def vt_lower(self):
        """A lower bound for v_t (inf for certified zero)."""
        if self.coeffs:
            return min(self.coeffs)
        return float("inf") if self.tprec is None else self.tprec

    def __eq__(self, other):
        if not isinstance(other, FpLaurent):
            return NotImplemented
        return (self.p, self.coeffs, self.tprec) == (other.p, other.coeffs, other.tprec)

    def __hash__(self):
        return hash((self.p, tuple(sorted(self.coeffs.items())), self.tprec))

    def agrees(self, other: "FpLaurent") -> bool:
        """Equality modulo the smaller of the two precisions."""
        return (self - other).known_zero()

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            body = " + ".join(f"{c}t^{i}" for i, c in sorted(self.coeffs.items()))
        return body if self.tprec is None else f"{body} + O(t^{self.tprec})"

    # arithmetic -----------------------------------------------------------

    def _chk(self, other):
        if isinstance(other, int):
            return FpLaurent(self.p, {0: other})
        if other.p != self.p:
            raise SchemaError(f"prime mismatch: {self.p} vs {other.p}")
        return other

    def __add__(self, other):
        other = self._chk(other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0) + c
        return FpLaurent(self.p, out, _minprec(self.tprec, other.tprec))

    __radd__ = __add__

    def __neg__(self):
        return FpLaurent(self.p, {i: -c for i, c in self.coeffs.items()}, self.tprec)

    def __sub__(self, other):
        return self + (-self._chk(other))

    def __rsub__(self, other):
        return self._chk(other) + (-self)

    def __mul__(self, other):
        other = self._chk(other)
        prec = None
        if self.tprec is not None:
            prec = _minprec(prec, self.tprec + other.vt_lower())
        if other.tprec is not None:
            prec = _minprec(prec, other.tprec + self.vt_lower())
        if prec == float("inf"):
            prec = None
        prod = pmul(self.coeffs, other.coeffs)
        return FpLaurent(self.p, {i: c % self.p for i, c in prod.items()}, prec)

    __rmul__ = __mul__

    def scale(self, c: int) -> "FpLaurent":
        return FpLaurent(self.p, {i: x * c for i, x in self.coeffs.items()}, self.tprec)

    def shift(self, n: int) -> "FpLaurent":
        return FpLaurent(self.p, {i + n: c for i, c in self.coeffs.items()},
                         None if self.tprec is None else self.tprec + n)

    def truncate(self, T: int) -> "FpLaurent":
        """Forget everything from t^T on."""
        return FpLaurent(self.p, self.coeffs, _minprec(self.tprec, T))

    def inverse(self, rel_prec: int = DEFAULT_TPREC) -> "FpLaurent":
        """Inverse known to relative t-precision rel_prec (exact for monomials)."""
        if not self.coeffs:
            raise PreconditionError("inverse of an element not known to be nonzero")
        n = min(self.coeffs)
        p = self.p
        a = self.coeffs[n]
        ainv = pow(a, -1, p)
        if len(self.coeffs) == 1 and self.tprec is None:
            return FpLaurent(p, {-n: ainv})
        R = rel_prec
        if self.tprec is not None:
            R = min(R, self.tprec - n)
        # h = f/(a t^n) - 1 has only positive powers
        h = {i - n: c * ainv % p for i, c in self.coeffs.items() if i != n and i - n < R}
        inv = [0] * R
        inv[0] = 1
        for k in range(1, R):
            s = 0
            for i, c in h.items():
                if i <= k:
                    s += c * inv[k - i]
            inv[k] = -s % p
        return FpLaurent(p, {k - n: v * ainv for k, v in enumerate(inv) if v}, R - n)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = FpLaurent.one(self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def frobenius(self) -> "FpLaurent":
        """The absolute p-power map (c^p = c on F_p)."""
        p = self.p
        return FpLaurent(p, {i * p: c for i, c in self.coeffs.items()},
                         None if self.tprec is None else self.tprec * p)

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "terms": [[i, c] for i, c in sorted(self.coeffs.items())],
            "tprec": self.tprec,
        }

    @classmethod
    def from_json(cls, doc) -> "FpLaurent":
        if not isinstance(doc, dict) or set(doc) != {"p", "terms", "tprec"}:
            raise SchemaError("Fp-Laurent needs exactly p, terms, tprec")
        try:
            terms = {int(i): int(c) for i, c in doc["terms"]}
        except (TypeError, ValueError) as exc:
            raise SchemaError("terms must be [exponent, coefficient] pairs") from exc
        if doc["tprec"] is not None and not isinstance(doc["tprec"], int):
            raise SchemaError("tprec must be an integer or null")
        return cls(doc["p"], terms, doc["tprec"])


def _minprec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class ResidueDoubleSeries:
    """Window f_jmin .. f_jmax of F_p((t))-coefficients in y, with (c, d) growth.

    ``yprec`` is None for an exact Laurent polynomial in y, otherwise the
    series is known modulo y^yprec.
    """

    __slots__ = ("p", "jmin", "coeffs", "c", "d", "yprec")

    def __init__(self, p: int, jmin: int, coeffs, c: int = 0, d: int = 0, yprec: Optional[int] = None):
        if c < 0 or d < 0:
            raise SchemaError("growth constants must be non-negative")
        self.p = p
        self.jmin = jmin
        self.coeffs = tuple(coeffs)
        self.c = int(c)
        self.d = int(d)
        self.yprec = yprec
        if yprec is not None and self.jmin + len(self.coeffs) > yprec:
            self.coeffs = self.coeffs[: max(0, yprec - jmin)]

    @classmethod
    def from_dict(cls, p: int, rows: dict, c: int = 0, d: int = 0, yprec=None) -> "ResidueDoubleSeries":
        """rows: {j: FpLaurent or {i: coeff}}."""
        rows = {j: (r if isinstance(r, FpLaurent) else FpLaurent(p, r)) for j, r in rows.items()}
        rows = {j: r for j, r in rows.items() if not r.is_zero()}
        if not rows:
            return cls(p, 0, (), c, d, yprec)
        lo, hi = min(rows), max(rows)
        return cls(p, lo, [rows.get(j, FpLaurent.zero(p)) for j in range(lo, hi + 1)], c, d, yprec)

    @classmethod
    def constant(cls, f: FpLaurent, c: int = 0, d: int = 0) -> "ResidueDoubleSeries":
        return cls.from_dict(f.p, {0: f}, c, d)

    @property
    def jmax(self) -> int:
        return self.jmin + len(self.coeffs) - 1

    def coeff(self, j: int) -> FpLaurent:
        if self.jmin <= j <= self.jmax:
            return self.coeffs[j - self.jmin]
        if self.yprec is not None and j >= self.yprec:
            raise PreconditionError(f"y^{j} lies beyond the known y-precision")
        return FpLaurent.zero(self.p)

    def rows(self) -> dict:
        return {self.jmin + k: f for k, f in enumerate(self.coeffs) if not f.is_zero()}

    def lowest(self) -> Optional[int]:
        for k, f in enumerate(self.coeffs):
            if not f.known_zero():
                return self.jmin + k
        return None

    def __repr__(self):
        terms = [f"({f})y^{j}" for j, f in self.rows().items()]
        tail = "" if self.yprec is None else f" + O(y^{self.yprec})"
        return " + ".join(terms or ["0"]) + tail

    # arithmetic -----------------------------------------------------------

    def _chk(self, other):
        if other.p != self.p:
            raise SchemaError("prime mismatch")
        return other

    def __add__(self, other):
        other = self._chk(other)
        rows = dict(self.rows())
        for j, f in other.rows().items():
            rows[j] = rows[j] + f if j in rows else f
        yprec = _minprec(self.yprec, other.yprec)
        if yprec is not None:
            rows = {j: f for j, f in rows.items() if j < yprec}
        return ResidueDoubleSeries.from_dict(self.p, rows, max(self.c, other.c), max(self.d, other.d), yprec)

    def __neg__(self):
        return ResidueDoubleSeries(self.p, self.jmin, [-f for f in self.coeffs], self.c, self.d, self.yprec)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        other = self._chk(other)
        a, b = self.rows(), other.rows()
        yprec = None
        la, lb = self.lowest(), other.lowest()
        if self.yprec is not None:
            yprec = _minprec(yprec, self.yprec + (lb if lb is not None else other.yprec or 0))
        if other.yprec is not None:
            yprec = _minprec(yprec, other.yprec + (la if la is not None else self.yprec or 0))
        rows: dict = {}
        for j1, f1 in a.items():
            for j2, f2 in b.items():
                j = j1 + j2
                if yprec is not None and j >= yprec:
                    continue
                prod = f1 * f2
                rows[j] = rows[j] + prod if j in rows else prod
        c = max(self.c, other.c)
        d = (self.d + other.d
             + (c - self.c) * max(0, -self.jmin)
             + (c - other.c) * max(0, -other.jmin))
        return ResidueDoubleSeries.from_dict(self.p, rows, c, d, yprec)

    def scale(self, f: FpLaurent) -> "ResidueDoubleSeries":
        return self * ResidueDoubleSeries.constant(f)

    def truncate_y(self, n: int) -> "ResidueDoubleSeries":
        """Keep the y-exponents below n."""
        rows = {j: f for j, f in self.rows().items() if j < n}
        return ResidueDoubleSeries.from_dict(self.p, rows, self.c, self.d, _minprec(self.yprec, n))

    def shift_y(self, n: int) -> "ResidueDoubleSeries":
        return ResidueDoubleSeries(self.p, self.jmin + n, self.coeffs, self.c, self.d + self.c * max(0, n),
                                   None if self.yprec is None else self.yprec + n)

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        doc = {
            "jmin": self.jmin,
            "jmax": self.jmax,
            "coeffs": [f.to_json() for f in self.coeffs],
            "c": self.c,
            "d": self.d,
        }
        if self.yprec is not None:
            doc["yprec"] = self.yprec
        return doc

    @classmethod
    def from_json(cls, doc, p: Optional[int] = None) -> "ResidueDoubleSeries":
        need = {"jmin", "jmax", "coeffs", "c", "d"}
        if not isinstance(doc, dict) or not need <= set(doc) or set(doc) - need - {"yprec", "p"}:
            raise SchemaError(f"residue series fields must be {sorted(need)} (+yprec)")
        coeffs = [FpLaurent.from_json(f) for f in doc["coeffs"]]
        if doc["jmax"] - doc["jmin"] + 1 != len(coeffs):
            raise SchemaError("window length does not match jmin/jmax")
        primes = {f.p for f in coeffs} | ({doc["p"]} if "p" in doc else set())
        if len(primes) > 1:
            raise SchemaError("mixed primes")
        p = primes.pop() if primes else (p or 2)
        for key in ("c", "d"):
            if not isinstance(doc[key], int) or doc[key] < 0:
                raise SchemaError(f"{key} must be a non-negative integer")
        return cls(p, doc["jmin"], coeffs, doc["c"], doc["d"], doc.get("yprec"))


def residue_membership(f: ResidueDoubleSeries, c: int, d: int):
    """("accept", None) iff every window coefficient obeys -v_t(f_j) <= c*j + d.

    Otherwise ("reject", j) with the first violating index.
    """
    for k, fj in enumerate(f.coeffs):
        j = f.jmin + k
        v = fj.valuation()
        if v is None:
            if fj.exact or -fj.tprec <= c * j + d:
                continue
            return "reject", j
        if -v > c * j + d:
            return "reject", j
    return "accept", None


def partial_valuation(f: ResidueDoubleSeries, n: int):
    """v_t of the y^n coefficient (float inf for zero)."""
    if not (f.jmin <= n <= f.jmax):
        if f.yprec is None and (n < f.jmin or n > f.jmax):
            raise PreconditionError(f"index {n} outside the window [{f.jmin}, {f.jmax}]")
        raise PreconditionError(f"index {n} outside the window")
    v = f.coeffs[n - f.jmin].valuation()
    return float("inf") if v is None else v


def residue_invert(f: ResidueDoubleSeries, length: Optional[int] = None,
                   tprec: int = DEFAULT_TPREC) -> ResidueDoubleSeries:
    """Inverse by the geometric series after writing f = f_m y^m (1 + A).

    The output certificate follows the product-of-terms estimate: with
    -v(a_j) <= c*j + d_a, every coefficient of (1 + A)^-1 obeys
    -v(b_j) <= (c + d_a)*j.  ``length`` is the number of y-terms returned.
    """
    m = f.lowest()
    if m is None:
        raise PreconditionError("cannot invert zero")
    status, j = residue_membership(f, f.c, f.d)
    if status == "reject":
        raise PreconditionError(f"input violates its own growth certificate at j = {j}")
    fm = f.coeff(m)
    if fm.valuation() is None:
        raise PreconditionError("leading coefficient not invertible at this truncation")
    L = length if length is not None else max(len(f.coeffs), 1)
    if f.yprec is not None:
        L = min(L, f.yprec - m)
    p = f.p
    fm_inv = fm.inverse(tprec)
    a = {}
    for j, fj in f.rows().items():
        if j > m and j - m < L:
            a[j - m] = fj * fm_inv
    b = [FpLaurent.one(p)]
    for n in range(1, L):
        s = FpLaurent.zero(p)
        for k, ak in a.items():
            if k <= n:
                s = s + ak * b[n - k]
        b.append(-s)
    vm = fm.valuation()
    d_a = max(0, f.c * m + f.d + vm)
    c_out = f.c + d_a
    d_out = max(0, c_out * m + vm)
    rows = {n - m: bn * fm_inv for n, bn in enumerate(b)}
    has_tail = any(j > m for j in f.rows()) or f.yprec is not None
    yprec = L - m if has_tail else None
    out = ResidueDoubleSeries.from_dict(p, rows, c_out, d_out, yprec)
    # certificate on the normalized coefficients
    for n, bn in enumerate(b):
        v = bn.valuation()
        if n >= 1 and v is not None and -v > c_out * n:
            raise CertificateViolation(f"-v_t(b_{n}) = {-v} exceeds (c+d)*{n}")
    return out


def normalized_parts(f: ResidueDoubleSeries, length: int, tprec: int = DEFAULT_TPREC):
    """(m, f_m, [b_0 .. b_{length-1}]) with f = f_m y^m / sum(b_n y^n)."""
    m = f.lowest()
    fm = f.coeff(m)
    fm_inv = fm.inverse(tprec)
    a = {j - m: fj * fm_inv for j, fj in f.rows().items() if j > m}
    b = [FpLaurent.one(f.p)]
    for n in range(1, length):
        s = FpLaurent.zero(f.p)
        for k, ak in a.items():
            if k <= n:
                s = s + ak * b[n - k]
        b.append(-s)
    return m, fm, b


# y-adic Hensel recursion ------------------------------------------------------

def _poly_eval(P: list, x: ResidueDoubleSeries, n: int) -> ResidueDoubleSeries:
    """P(x) modulo y^n by Horner."""
    acc = P[-1].truncate_y(n)
    for coeff in reversed(P[:-1]):
        acc = (acc * x).truncate_y(n) + coeff.truncate_y(n)
    return acc


def _taylor_shift(P: list, x0: FpLaurent) -> list:
    """Coefficients of P(X + x0)."""
    p = x0.p
    out = []
    m = len(P) - 1
    for k in range(m + 1):
        acc = None
        for l in range(k, m + 1):
            coef = comb(l, k) % p
            if coef == 0:
                continue
            term = P[l].scale((x0 ** (l - k)).scale(coef))
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else ResidueDoubleSeries(p, 0, ()))
    return out


def _window_cd(P: list, c0: int) -> int:
    """Smallest d >= 0 with v(a_ki) >= -c0*i - d on every window."""
    d = 0
    for a in P:
        for j, f in a.rows().items():
            v = f.valuation()
            if v is not None:
                d = max(d, -v - c0 * j)
    return d


def hensel_root_residue(P: list, x0: Optional[FpLaurent] = None, n: int = 12,
                        tprec: int = DEFAULT_TPREC) -> dict:
    """Root x = x0 + sum_{i>=1} x_i y^i of P by the Taylor recursion.

    P is a list of ResidueDoubleSeries (coefficient of X^k at index k), each a
    power series in y.  Returns the x_i, the normalized constants (c, d_shift)
    and a per-step log recording v(x_i) against -3ci + c.
    """
    if not P:
        raise PreconditionError("empty polynomial")
    p = P[0].p
    for a in P:
        if a.rows() and min(a.rows()) < 0:
            raise PreconditionError("coefficients must be power series in y")
    if x0 is None:
        x0 = FpLaurent.zero(p)
    Q = _taylor_shift(P, x0)
    a0 = Q[0].coeff(0) if Q[0].rows() else FpLaurent.zero(p)
    if not a0.known_zero():
        raise PreconditionError("P(x0) is not 0 mod y")
    if len(Q) < 2 or Q[1].coeff(0).known_zero():
        raise PreconditionError("P'(x0) vanishes mod y (beta not invertible)")
    c0 = max(a.c for a in P)
    d0 = _window_cd(Q, c0)
    scale = FpLaurent.monomial(1, d0, p)
    Q = [a.scale(scale) for a in Q]
    beta = Q[1].coeff(0)
    vb = beta.valuation()
    c = max(c0, vb, 0)
    beta_inv = beta.inverse(tprec)
    xs: list = []
    log = []
    x = ResidueDoubleSeries(p, 1, (), yprec=None)
    for i in range(1, n + 1):
        val = _poly_eval(Q, x, i + 1)
        alpha = val.coeff(i) if val.jmin <= i <= val.jmax else FpLaurent.zero(p)
        xi = -(alpha * beta_inv)
        xs.append(xi)
        v = xi.valuation()
        bound = -3 * c * i + c
        ok = v is None or v >= bound
        alt = -2 * c * i
        log.append({
            "i": i,
            "v": "inf" if v is None else v,
            "bound": bound,
            "holds": ok,
            "alt_bound": alt,
            "alt_holds": v is None or v >= alt,
        })
        if not ok:
            raise CertificateViolation(f"v(x_{i}) = {v} < {bound}")
        rows = x.rows()
        rows[i] = xi
        x = ResidueDoubleSeries.from_dict(p, rows)
    full = x + ResidueDoubleSeries.constant(x0)
    residual = _poly_eval(P, full, n + 1)
    for j, f in residual.rows().items():
        if not f.known_zero():
            raise CertificateViolation(f"P(x) has a nonzero y^{j} coefficient")
    tmin = min((f.tprec for f in residual.coeffs if f.tprec is not None), default=None)
    return {
        "x": [x0] + xs,
        "c": c,
        "d_shift": d0,
        "log": log,
        "check": {"mod_y": n + 1, "t_precision": tmin},
    }


def catalan_mod(n: int, p: int) -> int:
    """The n-th Catalan number modulo p."""
    return (comb(2 * n, n) // (n + 1)) % p
