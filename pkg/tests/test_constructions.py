from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from prgraph.constructions import (EXPECTED_EXCEPTIONAL, LiftMap, closed_walk_counts_by_enumeration,
                                   conjugate_tuple, conjugation_fibers, conjugation_path, embed_gamma2,
                                   lift_vertex, quadrant_tree_check, quadrant_tree_sweep,
                                   reduce_redundant_tuple, tree_parent, verify_center_quotient_cheeger,
                                   verify_conjugation_lipschitz, verify_local_isomorphism,
                                   verify_return_domination)
from prgraph.errors import GroupError
from prgraph.graph import NielsenMove, ProductReplacementGraph
from prgraph.groups import (DihedralGroup, FiniteAbelianGroup, FreeAbelianGroup, InfiniteDihedralGroup,
                            SymmetricGroup, quaternion_group, random_generating_tuple)
from prgraph.metrics import return_probability

Z, Z2 = FreeAbelianGroup(1), FreeAbelianGroup(2)
S3 = SymmetricGroup(3)
Q8 = quaternion_group()
D4 = DihedralGroup(4)


def s3_gens():
    return (S3.parse("(1 2)"), S3.parse("(1 2 3)"))


def test_conjugate_tuple_examples():
    S = s3_gens()
    out = conjugate_tuple(S3, S, S3.parse("(1 2)"))
    assert [S3.format(x) for x in out] == ["(1 2)", "(1 3 2)"]
    assert conjugate_tuple(S3, S, S3.identity) == S


@pytest.mark.parametrize("G,S", [(S3, s3_gens()), (D4, ((1, 0), (0, 1))), (Q8, (2, 4))])
def test_conjugation_path_realises_conjugation(G, S):
    pr = ProductReplacementGraph(G, len(S))
    for i, sign in itertools.product(range(1, len(S) + 1), (1, -1)):
        path = conjugation_path(len(S), i, sign)
        assert len(path) == 2 * len(S) - 2
        g = S[i - 1] if sign > 0 else G.inv(S[i - 1])
        assert pr.apply_path(S, path) == conjugate_tuple(G, S, g)


@pytest.mark.parametrize("G,S", [(S3, s3_gens()), (D4, ((1, 0), (0, 1))), (Q8, (2, 4))])
def test_lipschitz(G, S):
    rep = verify_conjugation_lipschitz(G, S, radius=3)
    assert rep.passed and rep.max_distance <= 2 == rep.bound


def test_lipschitz_abelian_is_constant():
    rep = verify_conjugation_lipschitz(FiniteAbelianGroup([6]), ((1,), (0,)), radius=3)
    assert rep.max_distance == 0 and rep.passed


def test_fibers():
    rep = conjugation_fibers(Q8, (2, 4))
    assert rep.passed and len(rep.fibers) == 4 and all(len(f) == 2 for f in rep.fibers)
    rep = conjugation_fibers(S3, s3_gens())
    assert rep.passed and all(len(f) == 1 for f in rep.fibers)
    A = FiniteAbelianGroup([4])
    rep = conjugation_fibers(A, ((1,), (0,)))
    assert len(rep.fibers) == 1 and len(rep.fibers[0]) == 4


def test_lift_vertex_examples():
    L = LiftMap.from_subgroup(Z, Z.scalar_subgroup(5))
    assert lift_vertex(L, ((2,), (3,))) == ((2,), (3,))
    assert lift_vertex(L, ((7,), (-1,))) == ((2,), (4,))
    I = LiftMap.identity(Z2)
    assert lift_vertex(I, ((1, 0), (0, 1))) == ((1, 0), (0, 1))
    L2 = LiftMap.from_subgroup(Z2, Z2.scalar_subgroup(2))
    assert lift_vertex(L2, ((1, 0), (0, 1))) == ((1, 0), (0, 1))


def test_local_isomorphism_random_Z7():
    L = LiftMap.from_subgroup(Z, Z.scalar_subgroup(7))
    rng = np.random.default_rng(7)
    pr = ProductReplacementGraph(Z, 2)
    T = ((1,), (0,))
    for _ in range(200):
        assert verify_local_isomorphism(L, T)
        T = pr.apply_move(T, pr.moves[int(rng.integers(0, 8))])


def test_local_isomorphism_D4_center_exhaustive():
    L = LiftMap.from_subgroup(D4, D4.center())
    pr = ProductReplacementGraph(D4, 2)
    g = pr.explore_ball(((1, 0), (0, 1)), 99)
    assert g.fully_explored
    assert all(verify_local_isomorphism(L, T) for T in g.vertices)


def test_domination_identity_is_equality():
    rep = verify_return_domination(LiftMap.identity(Z), ((1,), (0,)), 8)
    assert rep.passed and rep.strict_ks == []


def test_domination_examples():
    rep = verify_return_domination(LiftMap.from_subgroup(Z, Z.scalar_subgroup(5)), ((1,), (0,)), 10)
    assert rep.passed and rep.strict_ks
    rep = verify_return_domination(LiftMap.from_subgroup(Z2, Z2.scalar_subgroup(3)), ((1, 0), (0, 1)), 8)
    assert rep.passed


def test_closed_walks_enumeration_matches_dp():
    pr = ProductReplacementGraph(Z, 2)
    for k in range(5):
        assert closed_walk_counts_by_enumeration(pr, ((1,), (0,)), k) == return_probability(pr, ((1,), (0,)), k) * 8 ** k


def test_quadrant_examples():
    rep = quadrant_tree_check(4)
    assert rep.passed
    q = {(v[0][0], v[1][0]) for v in ProductReplacementGraph(Z, 2).explore_ball(((1,), (1,)), 3).vertices
         if v[0][0] > 0 and v[1][0] > 0 and v[0][0] + v[1][0] <= 4}
    assert q == {(1, 1), (1, 2), (2, 1), (1, 3), (3, 1)}
    assert rep.vertices[(1, 1)] == 5
    assert tree_parent(((2,), (3,))) == ((2,), (1,))
    assert quadrant_tree_check(10).exceptional == EXPECTED_EXCEPTIONAL


def test_quadrant_sweep_agrees_with_direct():
    sweep = quadrant_tree_sweep(60)
    direct = quadrant_tree_check(60)
    assert sweep.passed and direct.passed
    assert sweep.vertices == direct.vertices and sweep.edges == direct.edges


def test_quadrant_counts_match_totient_oracle():
    # coprime (a, b) with a, b >= 1 and a + b = s number phi(s) for s >= 3, plus (1, 1)
    N = 40
    phi = lambda s: sum(1 for a in range(1, s + 1) if math.gcd(a, s) == 1)
    expected = 1 + sum(phi(s) for s in range(3, N + 1))
    assert quadrant_tree_check(N).vertices[(1, 1)] == expected


def test_reduction_trivial_quotient():
    L = LiftMap.from_subgroup(Z, Z.lattice_subgroup([[1]]))
    res = reduce_redundant_tuple(L, ((2,), (3,), (5,)))
    assert res.path == [] and res.reduced == ((2,), (3,), (5,))


def test_reduction_dinf():
    D = InfiniteDihedralGroup()
    L = LiftMap(D, FiniteAbelianGroup([2]), lambda x: (x[1],))
    pr = ProductReplacementGraph(D, 3)
    rng = np.random.default_rng(11)
    for _ in range(30):
        T = random_generating_tuple(D, 3, rng)
        res = reduce_redundant_tuple(L, T)
        assert res.replay(pr, T) == res.reduced
        assert res.reduced[1][1] == 0 and res.reduced[2][1] == 0
        assert D.is_generating(res.reduced)


def test_reduction_already_reduced():
    D = InfiniteDihedralGroup()
    L = LiftMap(D, FiniteAbelianGroup([2]), lambda x: (x[1],))
    res = reduce_redundant_tuple(L, ((0, 1), (1, 0), (5, 0)))
    assert res.path == []


def test_reduction_rank_hypothesis():
    L = LiftMap.from_subgroup(Z, Z.scalar_subgroup(5))
    with pytest.raises(GroupError):
        reduce_redundant_tuple(L, ((1,), (0,), (0,)))


def test_embedding():
    D = InfiniteDihedralGroup()
    embed, rep = embed_gamma2(D, ((0, 1),), Z, lambda h: (h[0], 0), radius=3)
    assert rep.passed
    prD = ProductReplacementGraph(D, 3)
    a, b = embed(((1,), (0,))), embed(((1,), (1,)))
    assert prD.apply_move(a, NielsenMove("R", 1, 2, 3)) == b
    with pytest.raises(GroupError):
        embed_gamma2(D, ((0, 1),), Z, lambda h: (0, 0))


def test_center_cheeger():
    rep = verify_center_quotient_cheeger(Q8, (2, 4))
    assert rep.passed and rep.quotient_order == 4
    rep = verify_center_quotient_cheeger(D4, ((1, 0), (0, 1)))
    assert rep.passed
    rep = verify_center_quotient_cheeger(FiniteAbelianGroup([6]), ((1,),))
    assert rep.degenerate
