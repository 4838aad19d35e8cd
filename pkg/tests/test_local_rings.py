from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from randbuild.gf import GF
from randbuild.local_rings import (LocalRing, LocalRingParams, MatrixOps, ProjectiveGroup,
                                   brute_force_orders, commuting_bound,
                                   commuting_pair_bound_check, count_cube_roots,
                                   count_cube_roots_in, frobenius_unipotent_order, group_order,
                                   parse_poly, pgl3_elements, ring_for)

RINGS = [
    LocalRing(2, [1, 1, 1], 1),
    LocalRing(2, [1, 1, 1], 2),
    LocalRing(3, [1, 0, 1], 1),
    LocalRing(3, [2, 1], 2),  # f = y + 2
    LocalRing(5, [2, 1], 2),
    ring_for(2, 3),
    ring_for(4, 2),
]


def test_params_guards():
    with pytest.raises(ValueError, match="y\\+1"):
        LocalRingParams(2, (1, 1), 1)
    with pytest.raises(ValueError, match="coprime to y"):
        LocalRingParams(3, (0, 1), 1)
    with pytest.raises(ValueError, match="reducible"):
        LocalRingParams(2, (1, 0, 1), 1)
    with pytest.raises(ValueError):
        LocalRingParams(2, (1, 1, 1), 0)
    with pytest.raises(ValueError):
        LocalRingParams(6, (1, 1), 1)
    p = LocalRingParams(2, (1, 1, 1), 3)
    assert p.Q == 4 and p.degree == 2


@pytest.mark.parametrize("ring", RINGS, ids=repr)
def test_ring_axioms(ring):
    A, M = ring.add_table, ring.mul_table
    r = np.arange(ring.size)
    a, b, c = np.meshgrid(r, r, r, indexing="ij")
    assert (A == A.T).all() and (M == M.T).all()
    assert (A[A[a, b], c] == A[a, A[b, c]]).all()
    assert (M[M[a, b], c] == M[a, M[b, c]]).all()
    assert (M[a, A[b, c]] == A[M[a, b], M[a, c]]).all()
    assert (A[r, ring.neg_table] == 0).all()


@pytest.mark.parametrize("ring", RINGS, ids=repr)
def test_units_and_inverse(ring):
    M = ring.mul_table
    brute = {a for a in range(ring.size) if (M[a] == 1).any()}
    assert set(ring.units()) == brute
    for a in brute:
        assert M[a, ring.ring_inv(a)] == 1
    assert len(brute) == ring.size - ring.size // ring.Q
    with pytest.raises(ZeroDivisionError):
        ring.ring_inv(0)


@pytest.mark.parametrize("ring", RINGS, ids=repr)
def test_maximal_ideal_nilpotent(ring):
    ideal = ring.maximal_ideal()
    assert len(ideal) == ring.size // ring.Q
    for x in ideal:
        assert ring.ring_pow(x, ring.s) == 0


def test_gf4_crosscheck():
    ring = LocalRing(2, [1, 1, 1], 1)
    F = GF(4)
    assert (ring.mul_table == F.mul_table).all()
    assert [ring.ring_inv(a) for a in range(1, 4)] == [F.inv(a) for a in range(1, 4)]


def test_f_squared_vanishes():
    ring = LocalRing(2, [1, 1, 1], 2)
    f = ring.encode([1, 1, 1])
    assert f != 0 and ring.ring_mul(f, f) == 0


def test_parse_poly():
    F = GF(3)
    assert parse_poly("y^2+1", F) == [1, 0, 1]
    assert parse_poly("y+2", F) == [2, 1]
    assert parse_poly("y - 1", F) == [2, 1]
    assert parse_poly("2y^3+y", F) == [0, 1, 0, 2]


@pytest.mark.parametrize("Q,s", [(2, 1), (3, 1), (4, 1), (2, 2)])
def test_orders_bruteforce(Q, s):
    rep = brute_force_orders(ring_for(Q, s))
    assert rep.ok
    assert rep.reduction_images == rep.gl3_residue


def test_orders_examples():
    assert group_order("GL3", 2, 1) == 168
    assert group_order("SL3", 2, 1) == 168
    assert group_order("GL3", 2, 2) == 86016
    assert group_order("PSL3", 4, 1) == 20160
    with pytest.raises(ValueError):
        group_order("GL4", 2, 1)


def test_orders_on_presented_ring():
    # F_3[y]/(y+2) is F_3 presented through a nontrivial f
    rep = brute_force_orders(LocalRing(3, [2, 1], 1))
    assert rep.ok and rep.gl3 == 11232


@settings(max_examples=50)
@given(st.sampled_from([2, 3, 4, 5, 7, 8, 9, 11, 16, 25, 27]), st.integers(1, 6))
def test_sl_is_gl_over_units(Q, s):
    gl, sl = group_order("GL3", Q, s), group_order("SL3", Q, s)
    units = Q ** (s - 1) * (Q - 1)
    assert gl % units == 0 and gl // units == sl
    assert group_order("PGL3", Q, s) == sl


@pytest.mark.parametrize("Q,s,mu", [(2, 1, 1), (4, 1, 3), (7, 1, 3), (3, 2, 3), (4, 2, 3),
                                     (13, 1, 3), (5, 3, 1)])
def test_cube_roots(Q, s, mu):
    assert count_cube_roots(Q, s) == mu


def test_cube_roots_oracle_cyclic():
    # s = 1: F_Q^x is cyclic, so mu = gcd(3, Q - 1)
    from math import gcd
    for Q in (2, 3, 4, 5, 7, 8, 9, 11, 13, 16):
        assert count_cube_roots(Q, 1) == gcd(3, Q - 1)


def test_cube_roots_presented_ring():
    assert count_cube_roots_in(LocalRing(2, [1, 1, 1], 2)) == 3
    with pytest.raises(ValueError):
        count_cube_roots(2, 17)


@pytest.mark.parametrize("Q,s,e,size", [(2, 1, 1, 1), (2, 2, 2, 512), (3, 2, 3, 19683),
                                        (2, 3, 4, 2 ** 18)])
def test_frobenius(Q, s, e, size):
    rep = frobenius_unipotent_order(Q, s)
    assert rep.exponent == e and rep.kernel_size == size
    assert rep.ok and rep.max_order <= e


def test_bound_values():
    assert commuting_bound(2, 1) == 21
    assert commuting_bound(3, 1) == 78
    assert commuting_bound(2, 2) == 84


def test_pgl_enumeration():
    assert len(pgl3_elements(ring_for(2, 1))) == 168
    elems = pgl3_elements(ring_for(2, 2))
    assert len(elems) == 43008
    ops = MatrixOps(ring_for(2, 2))
    keys = ops.keys(elems)
    assert len(np.unique(keys)) == len(keys)
    assert (ops.keys(ops.normalize(elems)) == keys).all()


def _naive_gl3_f2():
    mats = []
    for bits in product((0, 1), repeat=9):
        m = np.array(bits).reshape(3, 3)
        if round(np.linalg.det(m)) % 2:
            mats.append(m)
    return mats


def _naive_closure(gens):
    ident = np.eye(3, dtype=int)
    seen = {ident.tobytes(): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = (x @ g) % 2
                if y.tobytes() not in seen:
                    seen[y.tobytes()] = y
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def test_commuting_f2_against_naive():
    # over F_2 the only unit is 1, so projective commuting is plain commuting
    mats = _naive_gl3_f2()
    assert len(mats) == 168
    best, pairs = 0, 0
    for a in mats:
        for b in mats:
            if ((a @ b) % 2 == (b @ a) % 2).all():
                pairs += 1
                best = max(best, _naive_closure([a, b]))
    rep = commuting_pair_bound_check(2, 1)
    assert rep.pairs_tested == pairs
    assert rep.max_found == best
    assert rep.ok


def test_commuting_sampled_reproducible():
    a = commuting_pair_bound_check(2, 2, "sampled", budget=500, seed=3, per_outer=50)
    b = commuting_pair_bound_check(2, 2, "sampled", budget=500, seed=3, per_outer=50)
    assert (a.max_found, a.pairs_tested, a.subgroups_closed) == \
        (b.max_found, b.pairs_tested, b.subgroups_closed)
    assert a.ok and a.pairs_tested == 500


def test_commuting_guards():
    with pytest.raises(ValueError):
        commuting_pair_bound_check(2, 2, "exhaustive")
    with pytest.raises(ValueError):
        commuting_pair_bound_check(2, 1, "random")


def test_projective_closure_over_f3():
    group = ProjectiveGroup(ring_for(3, 1))
    # -I is the identity in PGL3
    minus = (2, 0, 0, 0, 2, 0, 0, 0, 2)
    assert group.closure([minus]) == {(1, 0, 0, 0, 1, 0, 0, 0, 1)}
    # a projective transvection has order 3
    t = (1, 1, 0, 0, 1, 0, 0, 0, 1)
    assert len(group.cyclic(t)) == 3
