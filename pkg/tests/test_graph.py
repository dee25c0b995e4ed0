from __future__ import annotations

import itertools
import json
import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prgraph.errors import NotGeneratingError
from prgraph.graph import ExploredGraph, NielsenMove, ProductReplacementGraph, all_moves, cayley_graph
from prgraph.groups import FiniteAbelianGroup, FreeAbelianGroup, InfiniteDihedralGroup, parse_group_spec

Z, Z2 = FreeAbelianGroup(1), FreeAbelianGroup(2)


def test_move_count_and_order():
    for n in range(2, 6):
        ms = all_moves(n)
        assert len(ms) == 4 * n * (n - 1)
        assert list(ms) == sorted(ms)
        assert len(set(ms)) == len(ms)
    assert len(all_moves(1)) == 0


def test_move_text_roundtrip():
    for m in all_moves(3):
        assert NielsenMove.parse(str(m)) == m
    with pytest.raises(ValueError):
        NielsenMove("R", 1, 2, 2)


def test_apply_examples():
    pr = ProductReplacementGraph(Z2, 2)
    assert pr.apply_move(((1, 0), (0, 1)), NielsenMove("R", 1, 1, 2)) == ((1, 0), (1, 1))
    pr1 = ProductReplacementGraph(Z, 2)
    assert pr1.apply_move(((2,), (3,)), NielsenMove("R", -1, 2, 1)) == ((-1,), (3,))


def test_left_vs_right_in_nonabelian_group():
    D = InfiniteDihedralGroup()
    pr = ProductReplacementGraph(D, 2)
    T = ((1, 0), (0, 1))
    r = pr.apply_move(T, NielsenMove("R", 1, 1, 2))
    l = pr.apply_move(T, NielsenMove("L", 1, 1, 2))
    assert r == (T[0], D.mul(T[1], T[0]))
    assert l == (T[0], D.mul(T[0], T[1]))
    assert r != l


def test_neighbor_multisets():
    pr = ProductReplacementGraph(Z, 2)
    targets = Counter(U for _, U in pr.neighbors(((1,), (0,))))
    assert targets == Counter({((1,), (0,)): 4, ((1,), (1,)): 2, ((1,), (-1,)): 2})
    pr2 = ProductReplacementGraph(FiniteAbelianGroup([2]), 2)
    targets = Counter(U for _, U in pr2.neighbors(((1,), (0,))))
    assert targets == Counter({((1,), (1,)): 4, ((1,), (0,)): 4})


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=3, max_size=3), st.sampled_from(all_moves(3)))
def test_involution_Z(xs, m):
    pr = ProductReplacementGraph(Z, 3)
    T = tuple((x,) for x in xs)
    assert pr.apply_move(pr.apply_move(T, m), m.inverse()) == T


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(-9, 9), st.integers(0, 1)), min_size=3, max_size=3),
       st.sampled_from(all_moves(3)))
def test_involution_dinf(xs, m):
    pr = ProductReplacementGraph(InfiniteDihedralGroup(), 3)
    T = tuple(xs)
    assert pr.apply_move(pr.apply_move(T, m), m.inverse()) == T


def test_vertex_validation():
    pr = ProductReplacementGraph(Z, 2)
    with pytest.raises(NotGeneratingError):
        pr.vertex([(2,), (4,)])
    assert pr.parse_vertex("2;3") == ((2,), (3,))
    assert pr.format_vertex(((2,), (-3,))) == "2;-3"


def test_radius_zero():
    pr = ProductReplacementGraph(Z, 2)
    g = pr.explore_ball(((1,), (0,)), 0)
    assert len(g) == 1 and not g.is_complete(0) and list(g.half_edges()) == []


def brute_generating_pairs(m):
    G = FiniteAbelianGroup([m])
    return {((a,), (b,)) for a in range(m) for b in range(m) if G.is_generating([(a,), (b,)])}


@pytest.mark.parametrize("m,expected", [(2, 3), (3, 8), (5, 24)])
def test_full_exploration_finite_cyclic(m, expected):
    pr = ProductReplacementGraph(FiniteAbelianGroup([m]), 2)
    g = pr.explore_ball(pr.default_root(), 99)
    assert g.fully_explored and not g.truncated
    assert set(g.vertices) == brute_generating_pairs(m)
    assert len(g) == expected
    # every nonzero pair of Z/p generates
    assert len(brute_generating_pairs(m)) == m * m - 1


def test_completeness_depends_on_root():
    pr = ProductReplacementGraph(FiniteAbelianGroup([2]), 2)
    g = pr.explore_ball(((1,), (1,)), 2)
    assert g.fully_explored
    g = pr.explore_ball(((1,), (0,)), 2)
    assert not g.fully_explored
    assert pr.explore_ball(((1,), (0,)), 3).fully_explored


def test_explore_regularity_and_depths():
    pr = ProductReplacementGraph(Z2, 3)
    g = pr.explore_ball(pr.default_root(), 2)
    for i in range(len(g)):
        if g.is_complete(i):
            assert len(g.adj[i]) == 24
    for i, m, j in g.half_edges():
        assert abs(g.depth[i] - g.depth[j]) <= 1
        assert pr.apply_move(g.vertices[i], m) == g.vertices[j]


def test_explore_cap_flags_truncation():
    pr = ProductReplacementGraph(Z, 2)
    g = pr.explore_ball(((1,), (0,)), 50, cap=20)
    assert g.truncated and len(g) <= 20


def test_distances():
    pr = ProductReplacementGraph(Z, 2)
    assert pr.distance(((1,), (0,)), ((1,), (0,))) == 0
    assert pr.distance(((1,), (0,)), ((1,), (1,))) == 1
    pr2 = ProductReplacementGraph(Z2, 2)
    e = ((1, 0), (0, 1))
    # Nielsen moves preserve the determinant, so the plain swap is unreachable
    assert pr2.distance(e, ((0, 1), (1, 0)), cap=20_000) == math.inf
    assert pr2.distance(e, ((0, 1), (-1, 0))) == 3


def bfs_oracle(pr, a, b, limit):
    seen, frontier = {a}, [a]
    for d in range(limit + 1):
        if b in seen:
            return d
        nxt = []
        for T in frontier:
            for m in pr.moves:
                U = pr.apply_move(T, m)
                if U not in seen:
                    seen.add(U)
                    nxt.append(U)
        frontier = nxt
    return math.inf


def test_distance_matches_plain_bfs():
    pr = ProductReplacementGraph(Z, 2)
    root = ((1,), (0,))
    g = pr.explore_ball(root, 4)
    for i in range(0, len(g), 7):
        assert pr.distance(root, g.vertices[i]) == g.depth[i] == bfs_oracle(pr, root, g.vertices[i], 4)


def test_json_roundtrip_and_determinism():
    pr = ProductReplacementGraph(parse_group_spec("Sym:3"), 2)
    g = pr.explore_ball(pr.default_root(), 2)
    text = g.to_json({"k": 1})
    assert text == pr.explore_ball(pr.default_root(), 2).to_json({"k": 1})
    h = ExploredGraph.from_dict(json.loads(text), pr)
    assert h.vertices == g.vertices
    assert list(h.half_edges()) == list(g.half_edges())
    assert h.to_dot() == g.to_dot()


def test_csv_rows_pair_half_edges():
    pr = ProductReplacementGraph(FiniteAbelianGroup([3]), 2)
    g = pr.explore_ball(pr.default_root(), 99)
    lines = g.to_csv({"x": 1}).split("\r\n")
    assert lines[0].startswith("# manifest:")
    assert lines[1] == "src,dst,side,sign,i,j"
    rows = [r for r in lines[2:] if r]
    assert 2 * len(rows) == len(g) * pr.degree


def test_cayley_graph():
    G = parse_group_spec("Sym:3")
    S = [G.parse("(1 2)"), G.parse("(1 2 3)")]
    g = cayley_graph(G, S)
    assert len(g) == 6 and all(len(g.adj[i]) == 4 for i in range(6))
    ew = g.edge_weights()
    assert sum(ew.values()) * 2 + sum(1 for i, _, j in g.half_edges() if i == j) == 24


def test_from_adjacency():
    g = ExploredGraph.from_adjacency([[1], [0], [3], [2]])
    assert g.fully_explored and len(g) == 4
    assert sorted(g.edge_weights()) == [(0, 1), (2, 3)]


def test_generating_pairs_of_small_groups_closed_under_moves():
    for spec in ["Zmod:4", "Zmod:2x2", "D:3"]:
        G = parse_group_spec(spec)
        pr = ProductReplacementGraph(G, 2)
        for T in itertools.product(G.elements, repeat=2):
            if pr.is_vertex(T):
                assert all(pr.is_vertex(U) for _, U in pr.neighbors(T))
