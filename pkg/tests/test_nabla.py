import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from robba_lab.errors import PreconditionError, SchemaError
from robba_lab.mw import MWElement
from robba_lab.nabla import (
    NablaModule, base_change_compare, check_phi_nabla_compat, cohomology_unipotent, connection_apply,
    d_apply, direct_sum, horizontal_sections, is_unipotent_basis, mw_cohomology, mw_preimage,
    nilpotency_index, random_unipotent_module, strongly_unipotent_reduce, trivial_module, vector_weight,
)
from robba_lab.padic import BOTTOM
from robba_lab.robba import RobbaElement

from gen import random_robba

P = 5


def R(poly, p=P):
    return RobbaElement(p, poly)


Z = R({})
ONE = R({(0, 0): 1})


def W(poly, p=P):
    return MWElement(p, poly)


def rank2(entry):
    return NablaModule("robba-E†", [[Z, entry], [Z, Z]])


# compatibility --------------------------------------------------------------------

def test_trivial_module_is_compatible():
    for n in (1, 2, 3):
        eye = [[ONE if i == j else Z for j in range(n)] for i in range(n)]
        M = NablaModule("robba-E†", [[Z] * n for _ in range(n)], eye)
        assert check_phi_nabla_compat(M) is BOTTOM


def test_rank_one_zero_connection_compatible():
    assert check_phi_nabla_compat(NablaModule("robba-E†", [[Z]], [[ONE]])) is BOTTOM


def test_incompatible_pair_detected():
    M = NablaModule("robba-E†", [[R({(1, 0): 1})]], [[ONE]])
    assert not check_phi_nabla_compat(M).is_bottom


def test_compat_on_mw_base():
    M = NablaModule("mw-E†", [[W({})]], [[W({(0, 0): 1})]])
    assert check_phi_nabla_compat(M) is BOTTOM


# unipotence ---------------------------------------------------------------------------

def test_is_unipotent_basis():
    assert is_unipotent_basis(trivial_module("robba-E†", P, 3))
    assert is_unipotent_basis(rank2(R({(2, 1): 7})))
    assert not is_unipotent_basis(NablaModule("robba-E†", [[ONE, Z], [Z, Z]]))
    assert not is_unipotent_basis(NablaModule("robba-E†", [[Z, Z], [ONE, Z]]))


def test_reduce_trivial_is_identity():
    red = strongly_unipotent_reduce(trivial_module("robba-E†", P, 2))
    assert red.T[0][0] == ONE and red.T[0][1].is_zero()


def test_reduce_already_constant():
    red = strongly_unipotent_reduce(rank2(R({(-1, 0): 1})))
    assert red.T[0][1].is_zero()
    assert red.B[0][1] == ONE


def test_reduce_one_plus_y():
    # D(e2) = (1 + y) e1 becomes D(e2 - y e1) = e1
    M = rank2(R({(-1, 0): 1, (0, 0): 1}))
    red = strongly_unipotent_reduce(M)
    assert red.T[0][1] == R({(1, 0): -1})
    assert red.B[0][1] == ONE
    e2p = [red.T[0][1], ONE]
    assert d_apply(M.D_matrix(), e2p) == [ONE, Z]


def test_reduce_refuses_non_unipotent():
    with pytest.raises(PreconditionError):
        strongly_unipotent_reduce(NablaModule("robba-E†", [[ONE]]))


def test_precision_loss_reported():
    # N = y^-1 + y^2 gives D-entry 1 + y^3: divide by 3
    M = rank2(R({(-1, 0): 1, (2, 0): 1}))
    assert strongly_unipotent_reduce(M).precision_loss == 0
    # N = y^-1 + y^(p-1) gives D-entry 1 + y^p: divide by p
    M = rank2(R({(-1, 0): 1, (P - 1, 0): 1}))
    assert strongly_unipotent_reduce(M).precision_loss == 1


# cohomology over the Robba base ----------------------------------------------------------

def test_trivial_rank_one():
    res = cohomology_unipotent(trivial_module("robba-E†", P))
    assert res.dims == (1, 1)
    assert res.reps_h0 == [[ONE]]
    assert res.reps_h1 == [[R({(-1, 0): 1})]]


def test_nilpotent_rank_two():
    # D(e2) = e1: the connecting map kills one class in each degree
    res = cohomology_unipotent(rank2(R({(-1, 0): 1})))
    assert res.dims == (1, 1)
    assert res.details["splice"][1]["connecting_rank"] == 1


def test_direct_sum_of_trivial_lines():
    for r in (1, 2, 3):
        assert cohomology_unipotent(trivial_module("robba-E†", P, r)).dims == (r, r)


def test_dims_additive_over_direct_sums():
    rng = random.Random(3)
    for _ in range(6):
        M1, _, _ = random_unipotent_module(rng, P, rng.randint(1, 2))
        M2, _, _ = random_unipotent_module(rng, P, rng.randint(1, 2))
        a, b = cohomology_unipotent(M1), cohomology_unipotent(M2)
        s = cohomology_unipotent(direct_sum(M1, M2))
        assert s.dims == (a.h0 + b.h0, a.h1 + b.h1)


def test_h1_representatives_are_not_exact():
    # y^-1 e is not in the image: nabla lands in y^(k-1) with factor k for exact y^k
    res = cohomology_unipotent(trivial_module("robba-E†", P))
    rep = res.reps_h1[0][0]
    assert rep.poly == {(-1, 0): 1}


# horizontal sections -----------------------------------------------------------------------

def test_horizontal_fixed_point():
    M = trivial_module("robba-E†", P)
    out = horizontal_sections(M, [ONE], e=1)
    assert out["vector"] == [ONE]
    assert out["residual"] is BOTTOM


def test_horizontal_nilpotent_immediate():
    M = rank2(R({(-1, 0): 1}))
    out = horizontal_sections(M, [Z, ONE], e=2)
    assert out["reduced_vector"] == [ONE, Z]
    assert out["log"][0]["residual"] == "bottom"


def test_horizontal_random_after_reduction():
    rng = random.Random(5)
    M = rank2(R({(-1, 0): 1, (0, 0): 1, (1, -1): 2}))
    red = strongly_unipotent_reduce(M)
    mp = [R({(j, 0): rng.randint(-3, 3) for j in range(-3, 4)}) for _ in range(2)]
    m = [red.T[0][0] * mp[0] + red.T[0][1] * mp[1], mp[1]]
    out = horizontal_sections(M, m, reduction=red)
    assert out["residual"] is BOTTOM and out["in_image"] and out["monotone"]
    assert all(x.is_zero() for x in connection_apply(M, out["vector"]))


def test_horizontal_counterexample_when_p_divides_l():
    # y^4 at p = 3: step l = 3 divides by 9 and the residual grows
    M = trivial_module("robba-E†", 3)
    out = horizontal_sections(M, [R({(4, 0): 1}, p=3)])
    weights = [e["residual"] for e in out["log"]]
    assert weights == ["2", "3", "4", "2", "bottom"]
    assert not out["monotone"] and out["divergence"]
    assert out["precision_loss"] == 2


def test_nilpotency_index():
    assert nilpotency_index([[Z]]) == 1
    assert nilpotency_index([[Z, ONE], [Z, Z]]) == 2


# MW base -------------------------------------------------------------------------------------

def test_mw_trivial():
    res = mw_cohomology(trivial_module("mw-E†", P))
    assert res.dims == (1, 0)
    # the horizontal section is a nonzero constant
    assert set(res.reps_h0[0][0].poly) == {(0, 0)}


def test_mw_constant_unit():
    assert mw_cohomology(NablaModule("mw-E†", [[W({(0, 0): 1})]])).dims == (0, 0)
    assert mw_cohomology(NablaModule("mw-E†", [[W({(0, 0): Fraction(1, 5)})]])).dims == (0, 0)


def test_mw_small_constant_refused():
    with pytest.raises(PreconditionError):
        mw_cohomology(NablaModule("mw-E†", [[W({(0, 0): 5})]]))


def test_mw_nilpotent_rank_two():
    Zw = W({})
    M = NablaModule("mw-E†", [[Zw, W({(0, 0): 1})], [Zw, Zw]])
    res = mw_cohomology(M)
    assert res.dims == (2, 0)
    assert res.details["splice"] == [2, 0]


def test_mw_preimage():
    Zw = W({})
    M = NablaModule("mw-E†", [[Zw, W({(0, 0): 1})], [Zw, Zw]])
    w = [W({(2, 0): 3, (0, 1): 1}), W({(1, 0): 2})]
    v = mw_preimage(M, w)
    assert connection_apply(M, v) == w


# base change -----------------------------------------------------------------------------------

def test_base_change_examples():
    rep = base_change_compare(trivial_module("robba-E†", P))
    assert rep["dagger"] == rep["E"] == [1, 1]
    rep = base_change_compare(trivial_module("mw-E†", P))
    assert rep["dagger"] == rep["E"] == [1, 0]


def test_base_change_needs_dagger_base():
    with pytest.raises(PreconditionError):
        base_change_compare(trivial_module("robba-E", P))


# module plumbing ---------------------------------------------------------------------------------

def test_json_round_trip():
    M = rank2(R({(-1, 0): 1, (2, -1): 5}))
    M2 = NablaModule.from_json(M.to_json())
    assert M2.N[0][1] == M.N[0][1] and M2.base == M.base
    doc = M.to_json()
    doc["extra"] = True
    with pytest.raises(SchemaError):
        NablaModule.from_json(doc)
    doc = M.to_json()
    doc["base"] = "nowhere"
    with pytest.raises(SchemaError):
        NablaModule.from_json(doc)


def test_mismatched_entry_types():
    with pytest.raises(SchemaError):
        NablaModule("robba-E†", [[W({})]])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_leibniz_rule(seed):
    rng = random.Random(seed)
    M, _, _ = random_unipotent_module(rng, P, 2)
    f = random_robba(rng, P)
    m = [random_robba(rng, P), random_robba(rng, P)]
    lhs = connection_apply(M, [f * x for x in m])
    rhs = [f.derivative() * x + f * y for x, y in zip(m, connection_apply(M, m))]
    assert vector_weight([a - b for a, b in zip(lhs, rhs)]) is BOTTOM


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_generated_modules_reduce_to_constants(seed):
    rng = random.Random(seed)
    M, T, Bp = random_unipotent_module(rng, P, rng.randint(1, 3))
    assert is_unipotent_basis(M)
    red = strongly_unipotent_reduce(M)
    # T^-1 T = 1 and the reduced D-matrix is y-free
    n = M.rank
    for i in range(n):
        for j in range(n):
            acc = Z
            for k in range(n):
                acc = acc + red.T_inv[i][k] * red.T[k][j]
            assert acc == (ONE if i == j else Z) or (acc - (ONE if i == j else Z)).is_zero()
            assert all(jj == 0 for jj, _ in red.B[i][j].poly)
