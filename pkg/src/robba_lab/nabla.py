"""Modules with connection (and optional Frobenius) over the Robba and MW bases.

Convention: nabla(e_j) = sum_i N[i][j] e_i, so the connection acts on a column
vector v of coefficients by nabla(v) = d(v) + N v.  Over the Robba base the
derivation is d/dy and D = y*nabla has matrix B = y N; over the MW base the
derivation is d/dx.

All matrices here hold exact window elements.  Cohomology is computed by
exact linear algebra over Q(t) once the D-matrix has been made constant in y,
so the "rank at precision" question never arises for exact inputs; elements
carrying deviation certificates are refused where exactness is needed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from . import linalg
from .errors import CertificateViolation, PreconditionError, SchemaError
from .lpoly import vq
from .mw import MWElement, mw_frobenius
from .padic import BOTTOM, LogNorm, format_rational
from .robba import RobbaElement

BASES = ("robba-E†", "robba-E", "mw-E†", "mw-E")
_ALIASES = {"robba-Edagger": "robba-E†", "mw-Edagger": "mw-E†"}
DEFAULT_FLOOR = 20
NORM_ALPHA = Fraction(1)
NORM_S = Fraction(1, 2)

__all__ = [
    "NablaModule", "CohomologyResult", "connection_apply", "d_apply", "check_phi_nabla_compat",
    "is_unipotent_basis", "strongly_unipotent_reduce", "nilpotency_index", "cohomology_unipotent",
    "horizontal_sections", "mw_cohomology", "base_change_compare", "random_unipotent_module",
    "direct_sum", "vector_weight", "Reduction", "mw_preimage", "trivial_module",
]


# element helpers --------------------------------------------------------------

def _is_robba(base: str) -> bool:
    return base.startswith("robba")


def _zero(base: str, p: int):
    if _is_robba(base):
        return RobbaElement(p, {}, tag="R_E" if base == "robba-E" else "R_Edagger")
    return MWElement(p, {}, tag="E" if base == "mw-E" else "Edagger")


def _one(base: str, p: int):
    if _is_robba(base):
        return RobbaElement(p, {(0, 0): 1}, tag="R_E" if base == "robba-E" else "R_Edagger")
    return MWElement(p, {(0, 0): 1}, tag="E" if base == "mw-E" else "Edagger")


def _elem_zero(x) -> bool:
    return x.is_zero()


def _weight(x) -> LogNorm:
    if x.is_zero():
        return BOTTOM
    if isinstance(x, RobbaElement):
        return x.eta_s_norm(NORM_ALPHA if x.tag != "R_E" else 0, NORM_S)
    return x.eta_rho_norm(NORM_ALPHA if x.tag != "E" else 0, 0)


def vector_weight(v: list) -> LogNorm:
    """min over components of the element weight (BOTTOM for the zero vector)."""
    out = BOTTOM
    for x in v:
        w = _weight(x)
        if w < out:
            out = w
    return out


def _matmul(A: list, B: list) -> list:
    n, m, k = len(A), len(B[0]), len(B)
    return [[_dot([A[i][r] for r in range(k)], [B[r][j] for r in range(k)]) for j in range(m)]
            for i in range(n)]


def _dot(a: list, b: list):
    acc = None
    for x, y in zip(a, b):
        if x.is_zero() or y.is_zero():
            continue
        term = x * y
        acc = term if acc is None else acc + term
    if acc is None:
        return a[0] - a[0] if a else None
    return acc


def _matvec(A: list, v: list) -> list:
    return [_dot(row, v) for row in A]


def _identity(base: str, p: int, n: int) -> list:
    return [[_one(base, p) if i == j else _zero(base, p) for j in range(n)] for i in range(n)]


def _entrywise(A: list, f: Callable) -> list:
    return [[f(x) for x in row] for row in A]


# the module type ----------------------------------------------------------------

class NablaModule:
    """Finite free module with connection matrix N and optional Frobenius matrix A."""

    def __init__(self, base: str, N: list, A: Optional[list] = None, p: Optional[int] = None):
        base = _ALIASES.get(base, base)
        if base not in BASES:
            raise SchemaError(f"base must be one of {BASES}")
        n = len(N)
        if any(len(row) != n for row in N):
            raise SchemaError("connection matrix must be square")
        if A is not None and (len(A) != n or any(len(row) != n for row in A)):
            raise SchemaError("Frobenius matrix must have the same size as N")
        kind = RobbaElement if _is_robba(base) else MWElement
        primes = set()
        for row in N + (A or []):
            for x in row:
                if not isinstance(x, kind):
                    raise SchemaError(f"entries over {base} must be {kind.__name__}")
                primes.add(x.p)
        if p is not None:
            primes.add(p)
        if len(primes) != 1:
            raise SchemaError("module entries must share one prime")
        self.p = primes.pop()
        if _is_robba(base) and any(x.var != "y" for row in N for x in row):
            raise SchemaError("Robba connection entries must be series in y")
        self.base = base
        self.rank = n
        self.N = [list(row) for row in N]
        self.A = None if A is None else [list(row) for row in A]

    @property
    def exact(self) -> bool:
        return all(x.exact for row in self.N for x in row)

    def derive(self, x):
        return x.derivative()

    def sigma(self, x):
        return x.frobenius() if isinstance(x, RobbaElement) else mw_frobenius(x)

    def zero_vector(self) -> list:
        return [_zero(self.base, self.p) for _ in range(self.rank)]

    def basis_vector(self, i: int) -> list:
        v = self.zero_vector()
        v[i] = _one(self.base, self.p)
        return v

    def D_matrix(self) -> list:
        if not _is_robba(self.base):
            raise PreconditionError("D = y*nabla is defined over the Robba base")
        return _entrywise(self.N, lambda x: x.shift(1) if not x.is_zero() else x)

    def relax_to_E(self) -> "NablaModule":
        base = {"robba-E†": "robba-E", "mw-E†": "mw-E"}.get(self.base, self.base)
        relax = lambda x: x.relax_to_E()
        A = None if self.A is None else _entrywise(self.A, relax)
        return NablaModule(base, _entrywise(self.N, relax), A, self.p)

    def to_json(self) -> dict:
        doc = {"base": self.base, "rank": self.rank, "N": [[x.to_json() for x in row] for row in self.N]}
        if self.A is not None:
            doc["A"] = [[x.to_json() for x in row] for row in self.A]
        return doc

    @classmethod
    def from_json(cls, doc) -> "NablaModule":
        if not isinstance(doc, dict) or not {"base", "rank", "N"} <= set(doc) \
                or set(doc) - {"base", "rank", "N", "A"}:
            raise SchemaError("module fields must be base, rank, N (+A)")
        base = _ALIASES.get(doc["base"], doc["base"])
        if base not in BASES:
            raise SchemaError(f"base must be one of {BASES}")
        if not isinstance(doc["rank"], int) or isinstance(doc["rank"], bool) or doc["rank"] < 1:
            raise SchemaError("rank must be a positive integer")
        kind = RobbaElement if _is_robba(base) else MWElement

        def parse(mat, name):
            if not isinstance(mat, list) or len(mat) != doc["rank"] or \
                    any(not isinstance(r, list) or len(r) != doc["rank"] for r in mat):
                raise SchemaError(f"{name} must be a rank x rank matrix")
            return [[kind.from_json(x) for x in row] for row in mat]

        N = parse(doc["N"], "N")
        A = parse(doc["A"], "A") if doc.get("A") is not None else None
        return cls(base, N, A)

    def __repr__(self):
        return f"NablaModule({self.base}, rank={self.rank})"


def direct_sum(M1: NablaModule, M2: NablaModule) -> NablaModule:
    if M1.base != M2.base or M1.p != M2.p:
        raise SchemaError("direct sum needs a common base and prime")
    n1, n2 = M1.rank, M2.rank
    z = _zero(M1.base, M1.p)
    N = [[M1.N[i][j] if i < n1 and j < n1 else
          M2.N[i - n1][j - n1] if i >= n1 and j >= n1 else z
          for j in range(n1 + n2)] for i in range(n1 + n2)]
    A = None
    if M1.A is not None and M2.A is not None:
        A = [[M1.A[i][j] if i < n1 and j < n1 else
              M2.A[i - n1][j - n1] if i >= n1 and j >= n1 else z
              for j in range(n1 + n2)] for i in range(n1 + n2)]
    return NablaModule(M1.base, N, A, M1.p)


# basic operations -----------------------------------------------------------------

def connection_apply(M: NablaModule, v: list) -> list:
    """nabla(v) = d(v) + N v for a coefficient column v."""
    if len(v) != M.rank:
        raise SchemaError("vector length does not match the rank")
    Nv = _matvec(M.N, v)
    return [M.derive(a) + b for a, b in zip(v, Nv)]


def d_apply(B: list, v: list) -> list:
    """D(v) = y d/dy(v) + B v for a D-matrix B over the Robba base."""
    Bv = _matvec(B, v)
    return [a.derivative().shift(1) + b for a, b in zip(v, Bv)]


def check_phi_nabla_compat(M: NablaModule) -> LogNorm:
    """Weight of d(A) + N A - d(sigma(var)) A sigma(N); BOTTOM means exactly compatible."""
    if M.A is None:
        raise PreconditionError("no Frobenius matrix to check")
    p = M.p
    if _is_robba(M.base):
        ds = RobbaElement(p, {(p - 1, 0): p}, tag="R_E" if M.base == "robba-E" else "R_Edagger")
    else:
        ds = MWElement(p, {(p - 1, 0): p}, tag="E" if M.base == "mw-E" else "Edagger")
    dA = _entrywise(M.A, M.derive)
    NA = _matmul(M.N, M.A)
    AsN = _matmul(M.A, _entrywise(M.N, M.sigma))
    resid = [[dA[i][j] + NA[i][j] - ds * AsN[i][j] for j in range(M.rank)] for i in range(M.rank)]
    out = BOTTOM
    for row in resid:
        w = vector_weight(row)
        if w < out:
            out = w
    return out


def is_unipotent_basis(M: NablaModule) -> bool:
    """True iff nabla(e_j) lies in the span of e_1..e_{j-1} for every j.

    With the column convention this means N[i][j] = 0 whenever i >= j.
    """
    return all(M.N[i][j].is_zero() for i in range(M.rank) for j in range(i + 1))


# strong unipotence -------------------------------------------------------------------

@dataclass
class Reduction:
    T: list
    T_inv: list
    B: list
    precision_loss: int
    steps: list = field(default_factory=list)

    def constant_rows(self) -> list:
        """The reduced D-matrix as Laurent polynomials in t."""
        return [[x.row(0) for x in row] for row in self.B]

    def to_json(self) -> dict:
        return {
            "T": [[x.to_json() for x in row] for row in self.T],
            "T_inv": [[x.to_json() for x in row] for row in self.T_inv],
            "B": [[x.to_json() for x in row] for row in self.B],
            "precision_loss": self.precision_loss,
        }


def _require_exact(M: NablaModule):
    if not M.exact:
        raise PreconditionError("this operation needs exact connection entries")


def _only_constant_row(x: RobbaElement) -> bool:
    return all(j == 0 for j, _ in x.poly)


def strongly_unipotent_reduce(M: NablaModule) -> Reduction:
    """Gauge the D-matrix to constants in y, working outward from the diagonal.

    Returns T (new basis e'_j = sum_i T[i][j] e_i), its inverse and the new
    D-matrix B' = T^-1 (B T + y dT/dy).
    """
    if not _is_robba(M.base):
        raise PreconditionError("strong reduction runs over the Robba base")
    _require_exact(M)
    if not is_unipotent_basis(M):
        raise PreconditionError("basis is not unipotent")
    n, p, base = M.rank, M.p, M.base
    B = M.D_matrix()
    T = _identity(base, p, n)
    T_inv = _identity(base, p, n)
    loss = 0
    steps = []
    for dist in range(1, n):
        for i in range(n - dist):
            j = i + dist
            b = B[i][j]
            corr = {}
            for (k, e), c in b.poly.items():
                if k != 0:
                    corr[(k, e)] = Fraction(-c) / k
                    loss = max(loss, vq(k, p))
            if not corr:
                continue
            c_el = RobbaElement(p, corr, tag=b.tag)
            step = _identity(base, p, n)
            step[i][j] = c_el
            step_inv = _identity(base, p, n)
            step_inv[i][j] = -c_el
            dstep = [[x.derivative().shift(1) if not x.is_zero() else x for x in row] for row in step]
            BT = _matmul(B, step)
            B = _matmul(step_inv, [[BT[a][c] + dstep[a][c] for c in range(n)] for a in range(n)])
            T = _matmul(T, step)
            T_inv = _matmul(step_inv, T_inv)
            steps.append({"entry": [i, j], "correction": c_el.to_json()})
    for row in B:
        for x in row:
            if not _only_constant_row(x):
                raise CertificateViolation("gauge left a non-constant entry in the D-matrix")
    return Reduction(T, T_inv, B, loss, steps)


def nilpotency_index(B: list) -> int:
    """Smallest e >= 1 with B^e = 0 (B strictly upper triangular)."""
    n = len(B)
    P = B
    e = 1
    while any(not x.is_zero() for row in P for x in row):
        P = _matmul(P, B)
        e += 1
        if e > n + 1:
            raise PreconditionError("D-matrix is not nilpotent")
    return e


# cohomology over the Robba base ---------------------------------------------------------

@dataclass
class CohomologyResult:
    h0: int
    h1: int
    reps_h0: list
    reps_h1: list
    precision_loss: int
    details: dict = field(default_factory=dict)

    @property
    def dims(self) -> tuple:
        return (self.h0, self.h1)

    def to_json(self) -> dict:
        return {
            "h0": self.h0,
            "h1": self.h1,
            "reps_h0": [[x.to_json() for x in v] for v in self.reps_h0],
            "reps_h1": [[x.to_json() for x in v] for v in self.reps_h1],
            "precision_loss": self.precision_loss,
            "details": self.details,
        }


def _const_vector(base: str, p: int, polys: list) -> list:
    tag = "R_E" if base == "robba-E" else "R_Edagger"
    return [RobbaElement(p, {(0, i): c for i, c in poly.items()}, tag=tag) for poly in polys]


def _splice_dims(Bc: list) -> tuple:
    """Dims through the flag M_1 < M_2 < ... with rank-1 quotients.

    Each quotient is the trivial line with dims (1, 1).  For the step
    M_{k-1} -> M_k -> R the connecting map H^0(R) -> H^1(M_{k-1}) sends 1 to
    the class of the k-th column of the D-matrix; its rank is the rank jump
    between the blocks B[:k-1,:k-1] and B[:k-1,:k].
    """
    h0 = h1 = 0
    trace = []
    for k in range(1, len(Bc) + 1):
        if k == 1:
            rk = 0
        else:
            top = [row[:k - 1] for row in Bc[:k - 1]]
            ext = [row[:k] for row in Bc[:k - 1]]
            rk = linalg.rank(ext) - linalg.rank(top)
        h0 += 1 - rk
        h1 += 1 - rk
        trace.append({"step": k, "connecting_rank": rk, "h0": h0, "h1": h1})
    return h0, h1, trace


def cohomology_unipotent(M: NablaModule, reduction: Optional[Reduction] = None) -> CohomologyResult:
    """H^0 and H^1 of a unipotent module over the Robba base.

    After strong reduction D acts on the y^k part of a vector as k + B' with
    B' nilpotent, which is invertible for k != 0.  Hence both groups live in
    the y^0 part: H^0 = ker B' and H^1 is represented by y^-1 times a
    complement of im B' (nabla = y^-1 D).  The dims are cross-checked against
    the filtration splice.
    """
    red = reduction or strongly_unipotent_reduce(M)
    n, p, base = M.rank, M.p, M.base
    Bc = red.constant_rows()
    r = linalg.rank(Bc)
    h0 = h1 = n - r
    s0, s1, trace = _splice_dims(Bc)
    if (s0, s1) != (h0, h1):
        raise CertificateViolation(f"splice gives {(s0, s1)} but the direct count gives {(h0, h1)}")
    reps0 = []
    for vec in linalg.nullspace(Bc):
        v = _matvec(red.T, _const_vector(base, p, vec))
        if any(not x.is_zero() for x in connection_apply(M, v)):
            raise CertificateViolation("kernel representative is not horizontal")
        reps0.append(v)
    reps1 = []
    for idx in linalg.complement_basis(Bc):
        unit = [{0: 1} if k == idx else {} for k in range(n)]
        w = [x.shift(-1) for x in _const_vector(base, p, unit)]
        reps1.append(_matvec(red.T, w))
    return CohomologyResult(h0, h1, reps0, reps1, red.precision_loss,
                            {"rank_B": r, "splice": trace, "method": "strong reduction"})


def _windowed_kernel_dim(M: NablaModule, K: int) -> int:
    """dim of horizontal vectors supported on y^[-K, K], by brute linear algebra."""
    B = M.D_matrix()
    n = M.rank
    span = [j for row in B for x in row for j, _ in x.poly]
    lo, hi = (min(span), max(span)) if span else (0, 0)
    rows_out = list(range(-K + min(lo, 0), K + max(hi, 0) + 1))
    cols = [(a, k) for a in range(n) for k in range(-K, K + 1)]
    col_index = {c: m for m, c in enumerate(cols)}
    mat = [[{} for _ in cols] for _ in range(n * len(rows_out))]
    row_index = {(b, k): m for m, (b, k) in enumerate((b, k) for b in range(n) for k in rows_out)}
    for (a, k), m in col_index.items():
        if k:
            mat[row_index[(a, k)]][m] = {0: k}
        for b in range(n):
            for (j, e), c in B[b][a].poly.items():
                cell = mat[row_index[(b, k + j)]][m]
                cell[e] = cell.get(e, 0) + c
    mat = [[{e: c for e, c in cell.items() if c} for cell in row] for row in mat]
    return len(cols) - linalg.rank(mat)


# horizontal sections ---------------------------------------------------------------------

def horizontal_sections(M: NablaModule, m: list, e: Optional[int] = None, steps: Optional[int] = None,
                        l_of: Optional[Callable[[int], int]] = None, floor=DEFAULT_FLOOR,
                        reduction: Optional[Reduction] = None) -> dict:
    """Project m onto the horizontal sections by the averaging iteration.

    f_0 = D^(e-1) m and f_n = (1 - D^2 / l^2)^e f_(n-1) with l = l_of(n)
    (default l = n), computed in the strongly unipotent basis.  The log holds
    the weight of D(f_n) after every step.  The iteration is exact, so the
    default step count (the largest |y-exponent| present) reaches a true
    horizontal vector.
    """
    red = reduction or strongly_unipotent_reduce(M)
    if len(m) != M.rank:
        raise SchemaError("vector length does not match the rank")
    B = red.B
    if e is None:
        e = nilpotency_index(B)
    if e < 1:
        raise PreconditionError("nilpotency index must be at least 1")
    l_of = l_of or (lambda k: k)
    mp = _matvec(red.T_inv, m)
    f = mp
    for _ in range(e - 1):
        f = d_apply(B, f)
    if steps is None:
        steps = max((abs(j) for x in f for j, _ in x.poly), default=0)
    p = M.p
    log = []
    loss = 0
    resid = vector_weight(d_apply(B, f))
    log.append({"step": 0, "l": None, "residual": resid.to_json()})
    weights = [resid]
    for n_step in range(1, steps + 1):
        l = l_of(n_step)
        if not isinstance(l, int) or l == 0:
            raise PreconditionError("l must be a nonzero integer")
        loss = max(loss, 2 * vq(l, p))
        for _ in range(e):
            DDf = d_apply(B, d_apply(B, f))
            f = [a - b.scale(Fraction(1, l * l)) for a, b in zip(f, DDf)]
        resid = vector_weight(d_apply(B, f))
        weights.append(resid)
        log.append({"step": n_step, "l": l, "residual": resid.to_json()})
    monotone = all(weights[k + 1] >= weights[k] for k in range(len(weights) - 1))
    # image of D^(e-1) on the constant span of the reduced basis
    target = [x for x in mp]
    target = [RobbaElement(p, {(0, i): c for (j, i), c in x.poly.items() if j == 0}, tag=x.tag) for x in target]
    for _ in range(e - 1):
        target = _matvec(B, target)
    in_image = all((a - b).is_zero() for a, b in zip(f, target))
    v = _matvec(red.T, f)
    final = vector_weight(connection_apply(M, v))
    below = final.is_bottom or final.w >= floor
    return {
        "vector": v,
        "reduced_vector": f,
        "e": e,
        "steps": steps,
        "log": log,
        "monotone": monotone,
        "divergence": not monotone,
        "residual": final,
        "below_floor": below,
        "in_image": in_image,
        "precision_loss": loss,
    }


# the MW base ---------------------------------------------------------------------------------

def _mw_supported(M: NablaModule) -> list:
    """Check the supported class and return the diagonal constants."""
    n = M.rank
    diag = []
    for i in range(n):
        for j in range(n):
            x = M.N[i][j]
            if any(k != 0 for k, _ in x.poly):
                raise PreconditionError("only connection matrices constant in x are supported")
            if i > j and not x.is_zero():
                raise PreconditionError("connection matrix must be upper triangular")
        d = M.N[i][i]
        if any(e != 0 for _, e in d.poly):
            raise PreconditionError("diagonal entries must be rational constants")
        c = Fraction(d.poly.get((0, 0), 0))
        if c and vq(c, M.p) > 0:
            raise PreconditionError(
                "diagonal constant with positive valuation: exp(-c x) overconvergent, "
                "not decidable by polynomial windows")
        diag.append(c)
    return diag


def _mw_window(M: NablaModule, D: int) -> tuple:
    """(h0, h1, loss) from nabla on polynomials of degree <= D + n."""
    n = M.rank
    top = D + n
    cols = [(a, d) for a in range(n) for d in range(top + 1)]
    rows = [(b, d) for b in range(n) for d in range(top + 1)]
    ci = {c: k for k, c in enumerate(cols)}
    ri = {r: k for k, r in enumerate(rows)}
    mat = [[{} for _ in cols] for _ in rows]
    loss = 0
    for (a, d), k in ci.items():
        if d >= 1:
            mat[ri[(a, d - 1)]][k] = {0: d}
            loss = max(loss, vq(d, M.p))
        for b in range(n):
            entry = M.N[b][a].row(0)
            if entry:
                cell = mat[ri[(b, d)]][k]
                for e, c in entry.items():
                    cell[e] = cell.get(e, 0) + c
    mat = [[{e: c for e, c in cell.items() if c} for cell in row] for row in mat]
    rank_full = linalg.rank(mat)
    high = [mat[ri[(b, d)]] for b in range(n) for d in range(D + 1, top + 1)]
    rank_high = linalg.rank(high) if high else 0
    h0 = len(cols) - rank_full
    h1 = n * (D + 1) - (rank_full - rank_high)
    return h0, h1, loss, mat


def mw_cohomology(M: NablaModule, window: Optional[int] = None) -> CohomologyResult:
    """H^0, H^1 over the MW base for constant upper triangular connections.

    The direct count uses nabla on polynomial windows; the splice count uses
    the rank-1 pieces, each of which has H^1 = 0 and H^0 of dim 1 exactly when
    its diagonal constant vanishes.  Both counts must agree and be stable under
    enlarging the window.
    """
    if _is_robba(M.base):
        raise PreconditionError("mw_cohomology needs an MW base")
    _require_exact(M)
    diag = _mw_supported(M)
    n, p = M.rank, M.p
    D = window if window is not None else n + 1
    h0, h1, loss, mat = _mw_window(M, D)
    h0b, h1b, loss_b, _ = _mw_window(M, D + 2)
    if (h0, h1) != (h0b, h1b):
        raise CertificateViolation(f"dims moved under window refinement: {(h0, h1)} vs {(h0b, h1b)}")
    splice = (sum(1 for c in diag if c == 0), 0)
    if splice != (h0, h1):
        raise CertificateViolation(f"splice gives {splice} but the window gives {(h0, h1)}")
    top = D + n
    reps0 = []
    tag = "E" if M.base == "mw-E" else "Edagger"
    for vec in linalg.nullspace(mat):
        comps = []
        for a in range(n):
            poly = {}
            for d in range(top + 1):
                for e, c in vec[a * (top + 1) + d].items():
                    poly[(d, e)] = c
            comps.append(MWElement(p, poly, tag=tag))
        if any(not x.is_zero() for x in connection_apply(M, comps)):
            raise CertificateViolation("kernel representative is not horizontal")
        reps0.append(comps)
    return CohomologyResult(h0, h1, reps0, [], max(loss, loss_b),
                            {"window": D, "splice": list(splice), "method": "polynomial window"})


def mw_preimage(M: NablaModule, w: list) -> list:
    """Solve nabla(v) = w for polynomial w when N is constant and nilpotent.

    With I the termwise antiderivative (which commutes with N), the finite
    sum v = sum_k (-1)^k (I N)^k I w satisfies v' = w - N v.  Dividing by i+1
    is where precision would be lost for inexact data.
    """
    _mw_supported(M)
    if any(not M.N[i][i].is_zero() for i in range(M.rank)):
        raise PreconditionError("preimages are implemented for nilpotent constant N")
    n = M.rank

    def integrate(x: MWElement) -> MWElement:
        return MWElement(x.p, {(i + 1, e): Fraction(c) / (i + 1) for (i, e), c in x.poly.items()}, tag=x.tag)

    v = [integrate(x) for x in w]
    term = v
    for _ in range(n):
        term = [integrate(x) for x in _matvec(M.N, term)]
        term = [-x for x in term]
        v = [a + b for a, b in zip(v, term)]
    if any(not x.is_zero() for x in term):
        raise CertificateViolation("Neumann series did not terminate")
    return v


# base change --------------------------------------------------------------------------------

def _cohomology(M: NablaModule) -> CohomologyResult:
    return cohomology_unipotent(M) if _is_robba(M.base) else mw_cohomology(M)


def base_change_compare(M: NablaModule, window_check: bool = True) -> dict:
    """Compare cohomology over the overconvergent model with the pi-adic-only model."""
    if M.base not in ("robba-E†", "mw-E†"):
        raise PreconditionError("base change starts from an overconvergent base")
    r1 = _cohomology(M)
    ME = M.relax_to_E()
    r2 = _cohomology(ME)
    report = {"dagger": [r1.h0, r1.h1], "E": [r2.h0, r2.h1], "equal": r1.dims == r2.dims}
    if window_check and _is_robba(M.base):
        K = max((abs(j) for row in strongly_unipotent_reduce(M).T for x in row for j, _ in x.poly), default=0)
        report["window_h0"] = _windowed_kernel_dim(ME, K + 1)
        report["equal"] = report["equal"] and report["window_h0"] == r2.h0
    if not report["equal"]:
        raise CertificateViolation(f"base change mismatch: {report}")
    report["results"] = [r1, r2]
    return report


# random suites ------------------------------------------------------------------------------

_BPRIME_CHOICES = ((0, {}), (1, {0: 1}), (1, {0: -1}), (1, {0: 2}), (1, {1: 1}), (1, {0: 1, 1: 1}), (1, "p/t"))


def random_unipotent_module(rng: random.Random, p: int, n: int, ydeg: int = 1, B_prime: Optional[list] = None
                            ) -> tuple:
    """(M, T, B') with B' constant strictly upper and N = y^-1 (T B' - y dT/dy) T^-1.

    T is unipotent upper triangular with integral entries of y-degree in
    [-ydeg, ydeg]; B' has integral entries of eta-norm <= 1.
    """
    base = "robba-E†"
    z = _zero(base, p)
    if B_prime is None:
        B_prime = [[z] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                kind, poly = rng.choice(_BPRIME_CHOICES)
                if poly == "p/t":
                    poly = {-1: p}
                B_prime[i][j] = RobbaElement(p, {(0, e): c for e, c in poly.items()})
    T = _identity(base, p, n)
    Tinv_terms = _identity(base, p, n)
    U = [[z] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            poly = {}
            for k in range(-ydeg, ydeg + 1):
                if rng.random() < 0.5:
                    poly[(k, rng.choice((0, 0, 1, -1)))] = rng.choice((1, -1, 2, -2, 3))
            U[i][j] = RobbaElement(p, poly)
            T[i][j] = U[i][j]
    # T^-1 = sum_k (-U)^k
    negU = _entrywise(U, lambda x: -x)
    power = negU
    T_inv = [[Tinv_terms[i][j] + negU[i][j] for j in range(n)] for i in range(n)]
    for _ in range(n):
        power = _matmul(power, negU)
        T_inv = [[T_inv[i][j] + power[i][j] for j in range(n)] for i in range(n)]
    TB = _matmul(T, B_prime)
    dT = _entrywise(T, lambda x: x.derivative().shift(1))
    B = _matmul([[TB[i][j] - dT[i][j] for j in range(n)] for i in range(n)], T_inv)
    N = _entrywise(B, lambda x: x.shift(-1))
    return NablaModule(base, N, None, p), T, B_prime


def trivial_module(base: str, p: int, n: int = 1) -> NablaModule:
    z = _zero(_ALIASES.get(base, base), p)
    return NablaModule(base, [[z] * n for _ in range(n)], None, p)
