from __future__ import annotations

import itertools
import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prgraph.errors import GroupError, GroupOverflowError, GroupSpecError
from prgraph.groups import (DihedralGroup, FiniteAbelianGroup, FreeAbelianGroup, InfiniteDihedralGroup,
                            SymmetricGroup, TableGroup, parse_group_spec, quaternion_group, quotient,
                            random_generating_tuple, smith_diagonalize)

small = st.integers(-20, 20)


def test_parse_specs():
    assert parse_group_spec("Z^2") == FreeAbelianGroup(2)
    assert parse_group_spec("Z") == FreeAbelianGroup(1)
    g = parse_group_spec("Zmod:3")
    assert g.order == 3 and g.is_finite
    d = parse_group_spec("Dinf")
    assert isinstance(d, InfiniteDihedralGroup) and not d.is_finite
    assert parse_group_spec("D:4").order == 8
    assert parse_group_spec("Sym:3").order == 6
    assert parse_group_spec("Zmod:2x3").order == 6


@pytest.mark.parametrize("bad", ["", "Q", "Z^0", "Zmod:0", "Zmod:x", "Z^a", "D:0", "Sym:0", "Foo:3"])
def test_parse_errors(bad):
    with pytest.raises(GroupSpecError):
        parse_group_spec(bad)


def test_basic_products():
    Z2 = FreeAbelianGroup(2)
    assert Z2.mul((1, 0), (0, 1)) == (1, 1)
    Z3 = FiniteAbelianGroup([3])
    assert Z3.mul((2,), (2,)) == (1,)


def matrix(x):
    t, f = x
    return np.array([[(-1) ** f, t], [0, 1]], dtype=object)


def test_dinf_product_matches_matrix_rep():
    D = InfiniteDihedralGroup()
    assert D.mul((1, 1), (1, 0)) == (0, 1)
    for a, b in itertools.product(itertools.product(range(-3, 4), (0, 1)), repeat=2):
        assert (matrix(D.mul(a, b)) == matrix(a).dot(matrix(b))).all()


def test_overflow_reported():
    Z = FreeAbelianGroup(1)
    big = 2 ** 62
    with pytest.raises(GroupOverflowError):
        Z.mul((big,), (big,))
    D = InfiniteDihedralGroup()
    with pytest.raises(GroupOverflowError):
        D.mul((big, 0), (big, 0))


def test_is_generating_examples():
    Z2, Z = FreeAbelianGroup(2), FreeAbelianGroup(1)
    assert Z2.is_generating([(1, 0), (0, 1)])
    assert Z.is_generating([(2,), (3,)])
    assert not Z2.is_generating([(2, 0), (0, 2)])
    assert not Z.is_generating([(0,), (0,)])


@settings(max_examples=200, deadline=None)
@given(st.lists(small, min_size=1, max_size=4))
def test_is_generating_Z_matches_gcd(xs):
    assert FreeAbelianGroup(1).is_generating([(x,) for x in xs]) == (math.gcd(*xs) == 1)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=3))
def test_is_generating_Z2_matches_determinant_gcd(vs):
    # Z^2 is generated iff the gcd of the 2x2 minors is 1
    minors = [a[0] * b[1] - a[1] * b[0] for a, b in itertools.combinations(vs, 2)]
    expected = bool(minors) and math.gcd(*minors) == 1
    assert FreeAbelianGroup(2).is_generating(vs) == expected


def closure_oracle(G, gens):
    seen = {G.identity}
    frontier = [G.identity]
    while frontier:
        x = frontier.pop()
        for s in gens:
            for y in (G.mul(x, s), G.mul(x, G.inv(s))):
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
    return seen


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 3)), min_size=1, max_size=3))
def test_finite_abelian_generation_vs_closure(vs):
    G = FiniteAbelianGroup([6, 4])
    assert G.is_generating(vs) == (len(closure_oracle(G, vs)) == 24)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(0, 1)), min_size=1, max_size=3))
def test_dinf_generation_vs_quotient_closure(vs):
    # <vs> = Dinf iff the image in every D_m is everything; m <= 12 covers the box
    D = InfiniteDihedralGroup()
    expected = all(
        len(closure_oracle(DihedralGroup(m), [(t % m, f) for t, f in vs])) == 2 * m for m in range(1, 13)
    ) and any(f for _, f in vs)
    assert D.is_generating(vs) == expected


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(["Zmod:6", "D:4", "Sym:3", "Zmod:2x2"]), st.data())
def test_group_axioms(spec, data):
    G = parse_group_spec(spec)
    els = st.sampled_from(G.elements)
    a, b, c = data.draw(els), data.draw(els), data.draw(els)
    assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    assert G.mul(a, G.identity) == a == G.mul(G.identity, a)
    assert G.mul(a, G.inv(a)) == G.identity


@settings(max_examples=100, deadline=None)
@given(st.tuples(small, st.integers(0, 1)), st.tuples(small, st.integers(0, 1)), st.tuples(small, st.integers(0, 1)))
def test_dinf_axioms(a, b, c):
    D = InfiniteDihedralGroup()
    assert D.mul(D.mul(a, b), c) == D.mul(a, D.mul(b, c))
    assert D.mul(a, D.inv(a)) == D.identity


@pytest.mark.parametrize("spec", ["Z^3", "Zmod:5x2", "Dinf", "D:5", "Sym:4"])
def test_codec_and_text_roundtrip(spec):
    G = parse_group_spec(spec)
    rng = np.random.default_rng(1)
    for _ in range(30):
        x = G.random_element(rng)
        assert G.decode(G.encode(x)) == x
        assert G.parse(G.format(x)) == x


def test_pickle_roundtrip():
    for spec in ["Z^2", "Zmod:5", "Dinf", "Sym:3"]:
        G = parse_group_spec(spec)
        H = pickle.loads(pickle.dumps(G))
        assert H == G
        x = G.random_element(np.random.default_rng(0))
        assert H.encode(x) == G.encode(x)


def test_centers():
    assert FreeAbelianGroup(2).center().contains((5, -3))
    D = InfiniteDihedralGroup()
    Zc = D.center()
    box = [(t, f) for t in range(-3, 4) for f in (0, 1)]
    brute = [x for x in box if D.mul(x, (1, 0)) == D.mul((1, 0), x) and D.mul(x, (0, 1)) == D.mul((0, 1), x)]
    assert brute == [(0, 0)]
    assert all(Zc.contains(x) == (x == (0, 0)) for x in box)
    Q = quaternion_group()
    brute = {x for x in Q.elements if all(Q.mul(x, y) == Q.mul(y, x) for y in Q.elements)}
    assert set(Q.center().elements) == brute
    assert sorted(Q.format(x) for x in brute) == ["-1", "1"]
    assert SymmetricGroup(3).center().is_trivial


def test_quotients():
    Z = FreeAbelianGroup(1)
    H, p = quotient(Z, Z.scalar_subgroup(5))
    assert H == FiniteAbelianGroup([5])
    assert p((7,)) == (2,) and p((-1,)) == (4,)
    D4 = DihedralGroup(4)
    Q, p = quotient(D4, D4.center())
    assert Q.order == 4
    assert all(Q.mul(x, x) == Q.identity for x in Q.elements)
    for a, b in itertools.product(D4.elements, repeat=2):
        assert p(D4.mul(a, b)) == Q.mul(p(a), p(b))
    S3 = SymmetricGroup(3)
    Q, p = quotient(S3, S3.trivial_subgroup())
    assert Q.order == 6 and len({p(x) for x in S3.elements}) == 6


def test_quotient_rejects_non_normal():
    S3 = SymmetricGroup(3)
    with pytest.raises(GroupError):
        quotient(S3, S3.subgroup([S3.parse("(1 2)")]))


def test_dinf_by_translations():
    D = InfiniteDihedralGroup()
    H, p = quotient(D, D.translation_subgroup(3))
    assert H == DihedralGroup(3)
    for a, b in itertools.product([(t, f) for t in range(-4, 5) for f in (0, 1)], repeat=2):
        assert p(D.mul(a, b)) == H.mul(p(a), p(b))


def test_lattice_quotient_drops_trivial_factors():
    Z2 = FreeAbelianGroup(2)
    H, p = quotient(Z2, Z2.lattice_subgroup([[2, 0], [1, 3]]))
    assert H.order == 6
    assert p((2, 0)) == H.identity and p((1, 3)) == H.identity


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=4))
def test_smith_diagonal_divisibility(rows):
    diag, _ = smith_diagonalize(rows, 3)
    nz = [d for d in diag if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    # product of invariant factors = gcd of maximal minors (rank-sized)
    r = len(nz)
    if r:
        minors = []
        for ri in itertools.combinations(range(len(rows)), r):
            for ci in itertools.combinations(range(3), r):
                sub = np.array([[rows[i][j] for j in ci] for i in ri], dtype=float)
                minors.append(int(round(np.linalg.det(sub))))
        assert math.prod(nz) == math.gcd(*minors)


def test_symmetric_group_conventions():
    S3 = SymmetricGroup(3)
    a, b = S3.parse("(1 2)"), S3.parse("(1 2 3)")
    assert S3.parse("(12)") == a
    # b applied first: 1 -> 2 -> 1
    ab = S3.mul(a, b)
    assert S3.format(ab) == "(2 3)"
    assert S3.format(S3.identity) == "()"
    assert S3.rank == 2


def test_table_group_validation(tmp_path):
    Q = quaternion_group()
    T = TableGroup.from_group(SymmetricGroup(3))
    assert T.order == 6
    path = tmp_path / "g.txt"
    path.write_text(Q.to_text())
    R = parse_group_spec(f"table:{path}")
    assert R.order == 8 and R.center().order == 2
    with pytest.raises(GroupSpecError):
        TableGroup([[0, 1], [0, 1]])
    with pytest.raises(GroupSpecError):
        TableGroup([[1, 0], [0, 1]])


def test_random_generating_tuple():
    rng = np.random.default_rng(3)
    for spec in ["Z^2", "Dinf", "Zmod:5", "Sym:3"]:
        G = parse_group_spec(spec)
        T = random_generating_tuple(G, 3, rng)
        assert len(T) == 3 and G.is_generating(T)
