"""Capped-precision p-adic scalars and exact log-domain norms.

A nonzero scalar is stored as p**v * u with u a unit known modulo p**N, so the
element itself is known modulo p**(v + N).  Zero is a distinguished state with
valuation +inf; it still remembers the absolute precision to which it is known
(``N`` holds that absolute exponent for zeros).

Norms are never floats.  ``LogNorm(w)`` stands for the real number p**(-w), so
products of norms add log-values and the ultrametric max of norms is the min of
log-values.  ``BOTTOM`` encodes the norm of zero.
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from typing import Optional, Union

from .errors import SchemaError, PreconditionError

Rational = Union[int, Fraction]


def vp(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp_rational(q: Rational, p: int) -> Optional[int]:
    q = Fraction(q)
    if q == 0:
        return None
    return vp(q.numerator, p) - vp(q.denominator, p)


def split_unit(n: int, p: int) -> tuple[int, int]:
    """Write a nonzero integer as p**v * u and return (v, u)."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def parse_rational(value) -> Fraction:
    """Parse "num/den", an int, or a decimal integer string exactly."""
    if isinstance(value, bool):
        raise SchemaError("boolean is not a rational")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        s = value.strip()
        try:
            if "/" in s:
                num, den = s.split("/")
                q = Fraction(int(num), int(den))
            else:
                q = Fraction(int(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"not a rational: {value!r}") from exc
        return q
    raise SchemaError(f"not a rational: {value!r}")


def format_rational(q: Rational) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def ceil_rational(q: Rational) -> int:
    q = Fraction(q)
    return -((-q.numerator) // q.denominator)


@total_ordering
class LogNorm:
    """Norm value p**(-w) with w rational, or the norm of zero (BOTTOM).

    Ordering follows w, so a *larger* LogNorm is a *smaller* norm and ``min``
    implements the ultrametric maximum.
    """

    __slots__ = ("w",)

    def __init__(self, w: Optional[Rational]):
        self.w = None if w is None else Fraction(w)

    @property
    def is_bottom(self) -> bool:
        return self.w is None

    def __add__(self, other: "LogNorm") -> "LogNorm":
        other = as_lognorm(other)
        if self.w is None or other.w is None:
            return BOTTOM
        return LogNorm(self.w + other.w)

    def shift(self, delta: Rational) -> "LogNorm":
        if self.w is None:
            return self
        return LogNorm(self.w + Fraction(delta))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LogNorm):
            try:
                other = as_lognorm(other)
            except TypeError:
                return NotImplemented
        return self.w == other.w

    def __lt__(self, other) -> bool:
        other = as_lognorm(other)
        if self.w is None:
            return False
        if other.w is None:
            return True
        return self.w < other.w

    def __hash__(self):
        return hash(self.w)

    def __repr__(self):
        return "LogNorm(BOTTOM)" if self.w is None else f"LogNorm({format_rational(self.w)})"

    def to_json(self):
        return "bottom" if self.w is None else format_rational(self.w)

    @classmethod
    def from_json(cls, doc) -> "LogNorm":
        if doc == "bottom":
            return BOTTOM
        return cls(parse_rational(doc))


BOTTOM = LogNorm(None)


def as_lognorm(x) -> LogNorm:
    if isinstance(x, LogNorm):
        return x
    if x is None:
        return BOTTOM
    if isinstance(x, (int, Fraction)):
        return LogNorm(x)
    raise TypeError(f"cannot interpret {x!r} as a LogNorm")


def lmin(*values) -> LogNorm:
    """Ultrametric max of norms: the smallest log-value, BOTTOM if all are."""
    best = BOTTOM
    for x in values:
        x = as_lognorm(x)
        if x < best:
            best = x
    return best


class PadicScalar:
    """Element of Q_p known to a capped precision."""

    __slots__ = ("p", "v", "u", "N")

    def __init__(self, p: int, v: Optional[int], u: int, N: int):
        if p < 2:
            raise SchemaError("p must be a prime >= 2")
        if v is None:
            if u % (p ** max(N, 0)) != 0 and N > 0:
                raise SchemaError("zero must have unit 0")
            self.p, self.v, self.u, self.N = p, None, 0, int(N)
            return
        if N <= 0:
            raise SchemaError("relative precision must be positive")
        mod = p ** N
        u %= mod
        if u % p == 0:
            raise SchemaError("unit part must be coprime to p")
        self.p, self.v, self.u, self.N = p, int(v), u, int(N)

    # construction ---------------------------------------------------------

    @classmethod
    def zero(cls, p: int, abs_prec: int) -> "PadicScalar":
        return cls(p, None, 0, abs_prec)

    @classmethod
    def from_int(cls, n: int, p: int, N: int) -> "PadicScalar":
        """n known to relative precision N (absolute precision for n = 0)."""
        if n == 0:
            return cls.zero(p, N)
        v, u = split_unit(n, p)
        return cls(p, v, u, N)

    @classmethod
    def from_rational(cls, q: Rational, p: int, N: int) -> "PadicScalar":
        q = Fraction(q)
        if q == 0:
            return cls.zero(p, N)
        vn, un = split_unit(q.numerator, p)
        vd, ud = split_unit(q.denominator, p)
        mod = p ** N
        return cls(p, vn - vd, un * pow(ud, -1, mod), N)

    # queries --------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.v is None

    @property
    def abs_prec(self) -> int:
        """Exponent a such that the element is known modulo p**a."""
        return self.N if self.v is None else self.v + self.N

    def valuation(self) -> Optional[int]:
        return self.v

    def lognorm(self) -> LogNorm:
        return BOTTOM if self.v is None else LogNorm(self.v)

    def to_fraction(self) -> Fraction:
        """The stored representative as an exact rational."""
        if self.v is None:
            return Fraction(0)
        if self.v >= 0:
            return Fraction(self.u * self.p ** self.v)
        return Fraction(self.u, self.p ** (-self.v))

    def centered(self) -> Fraction:
        """Representative with unit part in (-p^N/2, p^N/2]."""
        if self.v is None:
            return Fraction(0)
        m = self.p ** self.N
        u = self.u - m if self.u > m // 2 else self.u
        return Fraction(u) * Fraction(self.p) ** self.v

    def _check(self, other: "PadicScalar") -> "PadicScalar":
        if not isinstance(other, PadicScalar):
            other = PadicScalar.from_rational(other, self.p, self._default_N())
        if other.p != self.p:
            raise SchemaError(f"prime mismatch: {self.p} vs {other.p}")
        return other

    def _default_N(self) -> int:
        return max(self.N, 1)

    # arithmetic -----------------------------------------------------------

    def __neg__(self) -> "PadicScalar":
        if self.v is None:
            return self
        return PadicScalar(self.p, self.v, -self.u, self.N)

    def __add__(self, other) -> "PadicScalar":
        other = self._check(other)
        p = self.p
        cap = min(self.abs_prec, other.abs_prec)
        if self.v is None and other.v is None:
            return PadicScalar.zero(p, cap)
        base = min(x.v for x in (self, other) if x.v is not None)
        total = 0
        for x in (self, other):
            if x.v is not None:
                total += x.u * p ** (x.v - base)
        if cap <= base:
            return PadicScalar.zero(p, cap)
        total %= p ** (cap - base)
        if total == 0:
            return PadicScalar.zero(p, cap)
        dv, unit = split_unit(total, p)
        return PadicScalar(p, base + dv, unit, cap - base - dv)

    __radd__ = __add__

    def __sub__(self, other) -> "PadicScalar":
        return self + (-self._check(other))

    def __rsub__(self, other) -> "PadicScalar":
        return self._check(other) + (-self)

    def __mul__(self, other) -> "PadicScalar":
        other = self._check(other)
        p = self.p
        if self.v is None and other.v is None:
            return PadicScalar.zero(p, self.N + other.N)
        if self.v is None:
            return PadicScalar.zero(p, self.N + other.v)
        if other.v is None:
            return PadicScalar.zero(p, other.N + self.v)
        N = min(self.N, other.N)
        return PadicScalar(p, self.v + other.v, self.u * other.u, N)

    __rmul__ = __mul__

    def inverse(self) -> "PadicScalar":
        if self.v is None:
            raise PreconditionError("inversion of certified zero")
        mod = self.p ** self.N
        return PadicScalar(self.p, -self.v, pow(self.u, -1, mod), self.N)

    def __truediv__(self, other) -> "PadicScalar":
        return self * self._check(other).inverse()

    def __pow__(self, n: int) -> "PadicScalar":
        if n < 0:
            return self.inverse() ** (-n)
        result = PadicScalar.from_int(1, self.p, self._default_N())
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparison -----------------------------------------------------------

    def equals(self, other: "PadicScalar") -> bool:
        """Equality to the common precision of both operands."""
        return (self - other).is_zero

    def __eq__(self, other) -> bool:
        if not isinstance(other, PadicScalar):
            return NotImplemented
        return (self.p, self.v, self.u, self.N) == (other.p, other.v, other.u, other.N)

    def __hash__(self):
        return hash((self.p, self.v, self.u, self.N))

    def __repr__(self):
        if self.v is None:
            return f"O({self.p}^{self.N})"
        return f"{self.p}^{self.v}*{self.u} + O({self.p}^{self.v + self.N})"

    # serialization --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "v": "inf" if self.v is None else self.v,
            "u": str(self.u),
            "N": self.N,
            "p": self.p,
        }

    @classmethod
    def from_json(cls, doc) -> "PadicScalar":
        if not isinstance(doc, dict) or set(doc) != {"v", "u", "N", "p"}:
            raise SchemaError(f"PadicScalar needs exactly v, u, N, p: {doc!r}")
        p, N = doc["p"], doc["N"]
        if not isinstance(p, int) or not isinstance(N, int) or isinstance(p, bool):
            raise SchemaError("p and N must be integers")
        try:
            u = int(doc["u"])
        except (TypeError, ValueError) as exc:
            raise SchemaError("u must be a decimal string") from exc
        if doc["v"] == "inf":
            if u != 0:
                raise SchemaError("zero must carry u = 0")
            return cls.zero(p, N)
        if not isinstance(doc["v"], int):
            raise SchemaError("v must be an integer or 'inf'")
        if N <= 0 or u <= 0 or u >= p ** N:
            raise SchemaError("u must lie in [1, p^N) with N positive")
        return cls(p, doc["v"], u, N)


def scalar_add(a: PadicScalar, b: PadicScalar) -> PadicScalar:
    return a + b


def scalar_mul(a: PadicScalar, b: PadicScalar) -> PadicScalar:
    return a * b


def scalar_inv(a: PadicScalar) -> PadicScalar:
    return a.inverse()


def lognorm_of(a: PadicScalar) -> LogNorm:
    return a.lognorm()


def teichmuller_roots(m: int, p: int, prec: int) -> list[int]:
    """The m-th roots of unity in Z_p modulo p**prec, for m dividing p - 1."""
    if (p - 1) % m != 0:
        raise PreconditionError(f"m = {m} does not divide p - 1 = {p - 1}")
    mod = p ** prec
    roots = []
    for a in range(1, p):
        if pow(a, m, p) != 1:
            continue
        # omega(a) = lim a**(p**n); precision doubles through the Frobenius fixed point
        x = a
        for _ in range(prec + 1):
            x = pow(x, p, mod)
        roots.append(x)
    return roots
