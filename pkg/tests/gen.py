"""Random instance generators shared by the test modules."""

import random
from fractions import Fraction

from robba_lab.laurent import OCLaurent
from robba_lab.mw import MWElement
from robba_lab.residue import FpLaurent, ResidueDoubleSeries
from robba_lab.robba import RobbaElement


def random_division_pair(rng: random.Random, p: int, kmax: int = 6):
    """(f, g, k) with g of order k whose x^k coefficient is a t^0 unit plus p-small terms."""
    k = rng.randint(0, kmax)
    rows = {}
    for i in range(rng.randint(k + 1, k + 3)):
        if i == k:
            rows[i] = {0: rng.choice(range(1, p)), rng.choice((-2, -1, 1, 2)): p * rng.randint(1, 4)}
        elif i < k:
            rows[i] = {rng.randint(-1, 1): rng.choice((1, 2, p))}
        else:
            rows[i] = {rng.randint(-1, 1): p * rng.choice((1, 2, p))}
    g = MWElement.from_rows(p, rows)
    f = MWElement.from_rows(p, {i: {rng.randint(-2, 2): rng.randint(1, 9) * rng.choice((1, -1))}
                                for i in range(rng.randint(1, 7))})
    return f, g, k


def random_hensel_coeffs(rng: random.Random, p: int):
    """a_2 .. a_m in p*R^int on windows inside 16 x 16."""
    m = rng.randint(2, 3)
    out = []
    for _ in range(m - 1):
        poly = {}
        for _ in range(rng.randint(1, 3)):
            poly[(rng.randint(0, 3), rng.randint(-3, 0))] = p * rng.choice((1, -1, 2, p))
        out.append(RobbaElement(p, poly))
    return out


def random_residue_series(rng: random.Random, p: int, length: int = 6):
    """A unit-leading residue series with a random (c, d) growth envelope it satisfies."""
    c, d = rng.randint(1, 3), rng.randint(0, 2)
    rows = {0: FpLaurent.monomial(rng.randint(1, p - 1), 0, p)}
    for j in range(1, length):
        if rng.random() < 0.7:
            e = -rng.randint(0, c * j + d)
            rows[j] = FpLaurent(p, {e: rng.randint(1, p - 1), e + rng.randint(1, 3): rng.randint(1, p - 1)}, None)
    return ResidueDoubleSeries.from_dict(p, rows, c, d), c, d


def random_eisenstein_instance(rng: random.Random, p: int):
    """X^2 + b X + a with a(0) = 0 and b(0) a unit: a simple root at X = 0 mod y."""
    def ps(lo, length=5):
        rows = {}
        for j in range(lo, length):
            if rng.random() < 0.6:
                rows[j] = FpLaurent(p, {-rng.randint(0, 2) * j: rng.randint(1, p - 1)}, None)
        return rows

    a = ps(1)
    a.setdefault(1, FpLaurent.one(p))
    b = ps(1)
    b[0] = FpLaurent.monomial(rng.randint(1, p - 1), -rng.randint(0, 1), p)
    one = FpLaurent.one(p)
    c = 2
    return [ResidueDoubleSeries.from_dict(p, a, c, 0), ResidueDoubleSeries.from_dict(p, b, c, 1),
            ResidueDoubleSeries.from_dict(p, {0: one}, c, 0)]


def random_oc(rng: random.Random, p: int):
    poly = {i: rng.choice((1, -1)) * rng.randint(1, 30) * p ** rng.randint(0, 3)
            for i in rng.sample(range(-6, 7), rng.randint(1, 5))}
    return OCLaurent.from_poly(p, poly, N=30)


def random_robba(rng: random.Random, p: int, var: str = "y", jlo: int = -2, jhi: int = 3):
    poly = {(rng.randint(jlo, jhi), rng.randint(-3, 2)): rng.randint(-9, 9) or 1 for _ in range(rng.randint(1, 4))}
    return RobbaElement(p, poly, var=var)


def random_mw(rng: random.Random, p: int):
    return MWElement.from_rows(p, {i: {rng.randint(-2, 2): rng.randint(-9, 9) or 1} for i in range(rng.randint(1, 4))})


def frac(rng: random.Random):
    return Fraction(rng.randint(1, 4), rng.randint(1, 4))


def below_floor(w, floor=20) -> bool:
    """A LogNorm counts as zero when it is BOTTOM or its weight reaches the floor."""
    return w.is_bottom or w.w >= floor
