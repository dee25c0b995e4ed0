"""Constructive maps between product replacement graphs and their verifiers.

Each ``verify_*`` function returns a report dataclass whose ``passed`` field
states whether the checked property held on the instance, together with the
witnesses needed to recheck it.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import CapExceededError, GroupError, NotGeneratingError
from .graph import NielsenMove, ProductReplacementGraph, all_moves, cayley_graph
from .groups import FiniteGroup, FreeAbelianGroup, Group, Subgroup, quotient
from .metrics import cheeger_exact, return_probabilities


# --------------------------------------------------------------------------
# conjugation map g -> g S g^-1
# --------------------------------------------------------------------------

def conjugate_tuple(G: Group, S: Sequence, g) -> tuple:
    return tuple(G.conj(g, s) for s in S)


def conjugation_path(n: int, i: int, sign: int = 1) -> list[NielsenMove]:
    """Moves taking U to u_i^sign U u_i^-sign, in 2n - 2 steps.

    Each u_j (j != i) is multiplied on the left by u_i^sign, then on the right
    by u_i^-sign; u_i itself is fixed by this conjugation.
    """
    path = []
    for j in range(1, n + 1):
        if j != i:
            path.append(NielsenMove("L", sign, i, j))
            path.append(NielsenMove("R", -sign, i, j))
    return path


def word_ball(G: Group, S: Sequence, radius: int) -> dict:
    """Word length w.r.t. S (and inverses) of every element of length <= radius."""
    gens = list(S) + [G.inv(s) for s in S]
    length = {G.identity: 0}
    layer = [G.identity]
    for r in range(1, radius + 1):
        nxt = []
        for x in layer:
            for s in gens:
                y = G.mul(x, s)
                if y not in length:
                    length[y] = r
                    nxt.append(y)
        layer = nxt
        if not layer:
            break
    return length


@dataclass
class LipschitzReport:
    max_distance: float
    bound: int
    pairs_checked: int
    witness_paths_ok: bool
    composition_ok: bool
    worst_pair: tuple | None = None

    @property
    def passed(self) -> bool:
        return self.max_distance <= self.bound and self.witness_paths_ok and self.composition_ok


def verify_conjugation_lipschitz(G: Group, S: Sequence, radius: int, cap: int = 200_000) -> LipschitzReport:
    """Check d(f_S(g), f_S(g s_i)) <= 2n - 2 for every g of word length <= radius.

    Distances come from BFS in Gamma_n(G); independently, the explicit
    ``conjugation_path`` is replayed and must land on f_S(g s_i).  Also checks
    d(f_S(1), f_S(g)) <= (2n - 2) * |g|.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    n = len(S)
    pr = ProductReplacementGraph(G, n)
    S = pr.vertex(S)
    bound = 2 * n - 2
    lengths = word_ball(G, S, radius)
    base = conjugate_tuple(G, S, G.identity)
    worst, worst_pair, checked = 0, None, 0
    paths_ok = composition_ok = True
    for g, ell in lengths.items():
        fg = conjugate_tuple(G, S, g)
        for i, s in enumerate(S, start=1):
            fgs = conjugate_tuple(G, S, G.mul(g, s))
            d = pr.distance(fg, fgs, cap=cap)
            checked += 1
            if d > worst:
                worst, worst_pair = d, (G.format(g), i)
            if pr.apply_path(fg, conjugation_path(n, i)) != fgs:
                paths_ok = False
        if pr.distance(base, fg, cap=cap) > bound * ell:
            composition_ok = False
    return LipschitzReport(worst, bound, checked, paths_ok, composition_ok, worst_pair)


@dataclass
class FiberReport:
    fibers: list
    center_order: int
    fibers_are_center_cosets: bool
    orbits_partition_all: bool | None = None
    orbit_count: int | None = None
    component_is_union_of_orbits: bool | None = None

    @property
    def passed(self) -> bool:
        return (self.fibers_are_center_cosets
                and self.orbits_partition_all is not False
                and self.component_is_union_of_orbits is not False)


def conjugation_fibers(G: FiniteGroup, S: Sequence, sample: Sequence | None = None,
                       check_partition: bool = True) -> FiberReport:
    """Group ``sample`` (default: all of G) by the value of g S g^-1.

    Each fiber must equal g Z(G) intersected with the sample.  With
    ``check_partition`` the conjugation orbits are also checked to partition
    every generating n-tuple of G, and the BFS component of S to be a union
    of orbits.
    """
    if not isinstance(G, FiniteGroup):
        raise GroupError("conjugation_fibers needs a finite group")
    sample = list(G.elements if sample is None else sample)
    Z = G.center().elements
    by_value: dict = {}
    for g in sample:
        by_value.setdefault(conjugate_tuple(G, S, g), []).append(g)
    fibers = list(by_value.values())
    sample_set = set(sample)
    cosets_ok = all(set(fib) == {G.mul(fib[0], z) for z in Z} & sample_set for fib in fibers)
    rep = FiberReport(fibers, len(Z), cosets_ok)
    if check_partition:
        n = len(S)
        pr = ProductReplacementGraph(G, n)
        verts = [T for T in itertools.product(G.elements, repeat=n) if G.is_generating(T)]
        orbit_of: dict = {}
        orbits = []
        ok = True
        for T in verts:
            if T in orbit_of:
                continue
            orb = {conjugate_tuple(G, T, g) for g in G.elements}
            if any(U in orbit_of for U in orb) or len(orb) != G.order // len(Z):
                ok = False
            for U in orb:
                orbit_of[U] = len(orbits)
            orbits.append(orb)
        ok &= set(orbit_of) == set(verts)
        rep.orbits_partition_all = ok
        rep.orbit_count = len(orbits)
        comp = pr.explore_ball(S, radius=len(verts) + 1)
        comp_set = set(comp.vertices)
        rep.component_is_union_of_orbits = all(orbits[orbit_of[T]] <= comp_set for T in comp_set)
    return rep


# --------------------------------------------------------------------------
# lifts along quotient maps
# --------------------------------------------------------------------------

@dataclass
class LiftMap:
    """Componentwise projection Gamma_n(G) -> Gamma_n(H) along pi: G -> H."""

    source: Group
    target: Group
    project: Callable

    @classmethod
    def from_subgroup(cls, G: Group, N: Subgroup) -> "LiftMap":
        H, pi = quotient(G, N)
        return cls(G, H, pi)

    @classmethod
    def identity(cls, G: Group) -> "LiftMap":
        return cls(G, G, lambda x: x)

    def kernel_contains(self, g) -> bool:
        return self.target.is_identity(self.project(g))


def lift_vertex(L: LiftMap, T: Sequence) -> tuple:
    return tuple(L.project(x) for x in T)


def verify_local_isomorphism(L: LiftMap, T: Sequence) -> bool:
    """pi(T) generates H and pi commutes with every Nielsen move at T."""
    n = len(T)
    src = ProductReplacementGraph(L.source, n)
    dst = ProductReplacementGraph(L.target, n)
    piT = lift_vertex(L, T)
    if not L.target.is_generating(piT):
        return False
    down = dst.neighbors(piT)
    up = src.neighbors(T)
    return all(mu == md and lift_vertex(L, U) == V for (mu, U), (md, V) in zip(up, down))


@dataclass
class DominationResult:
    rows: list = field(default_factory=list)  # (k, p_G, p_H)

    @property
    def passed(self) -> bool:
        return all(pg <= ph for _, pg, ph in self.rows)

    @property
    def strict_ks(self) -> list[int]:
        return [k for k, pg, ph in self.rows if pg < ph]


def verify_return_domination(L: LiftMap, S: Sequence, k_max: int, cap: int = 2_000_000) -> DominationResult:
    """Exact p^(k)_G(S, S) <= p^(k)_H(pi S, pi S) for even k <= k_max."""
    n = len(S)
    ks = list(range(0, k_max + 1, 2))
    pG = return_probabilities(ProductReplacementGraph(L.source, n), S, ks, cap)
    pH = return_probabilities(ProductReplacementGraph(L.target, n), lift_vertex(L, S), ks, cap)
    return DominationResult([(k, pG[k], pH[k]) for k in ks])


def closed_walk_counts_by_enumeration(pr: ProductReplacementGraph, T: Sequence, k: int) -> int:
    """Closed k-walks at T by enumerating all d^k move sequences (small k only)."""
    count = 0
    for word in itertools.product(pr.moves, repeat=k):
        if pr.apply_path(T, word) == tuple(T):
            count += 1
    return count


# --------------------------------------------------------------------------
# Gamma_2(Z) quadrant trees
# --------------------------------------------------------------------------

QUADRANTS = ((1, 1), (-1, 1), (-1, -1), (1, -1))


@dataclass
class QuadrantReport:
    N: int
    vertices: dict = field(default_factory=dict)   # quadrant -> count
    edges: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    exceptional: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


class _Quadrant:
    """In-region structure of one open quadrant of Gamma_2(Z) up to |a| + |b| <= N."""

    def __init__(self, pr: ProductReplacementGraph, signs: tuple[int, int], N: int):
        sa, sb = signs
        self.root = ((sa,), (sb,))
        self.verts = [((sa * a,), (sb * (s - a),)) for s in range(2, N + 1) for a in range(1, s)
                      if math.gcd(a, s - a) == 1]
        self.size = {v: abs(v[0][0]) + abs(v[1][0]) for v in self.verts}
        self.nbrs = {}
        for v in self.verts:
            self.nbrs[v] = sorted({U for _, U in pr.neighbors(v) if U != v and U in self.size})


def _evaluate_quadrant(q: _Quadrant, N: int, failures: list, label) -> tuple[int, int]:
    size = q.size
    verts = [v for v in q.verts if size[v] <= N]
    vset = set(verts)
    edges = {(min(u, v), max(u, v)) for u in verts for v in q.nbrs[u] if v in vset}
    # connectivity from the root inside the region
    seen, stack = {q.root}, [q.root]
    while stack:
        u = stack.pop()
        for v in q.nbrs[u]:
            if v in vset and v not in seen:
                seen.add(v)
                stack.append(v)
    if seen != vset:
        failures.append(f"N={N} {label}: {len(vset - seen)} vertices not connected to root")
    if len(edges) != len(verts) - 1:
        failures.append(f"N={N} {label}: |E|={len(edges)} but |V|-1={len(verts) - 1}")
    for v in verts:
        smaller = [u for u in q.nbrs[v] if size[u] < size[v]]
        if v != q.root and len(smaller) != 1:
            failures.append(f"N={N} {label}: {v} has {len(smaller)} smaller neighbours")
        if 2 * size[v] <= N:
            larger = [u for u in q.nbrs[v] if size[u] > size[v] and u in vset]
            if len(larger) != 2:
                failures.append(f"N={N} {label}: {v} has {len(larger)} larger neighbours")
    return len(verts), len(edges)


def _exceptional(pr: ProductReplacementGraph, N: int) -> list:
    G = pr.group
    axis = {((a,), (0,)) for a in range(-N, N + 1)} | {((0,), (b,)) for b in range(-N, N + 1)}
    return sorted(T for T in axis if G.is_generating(T))


EXPECTED_EXCEPTIONAL = sorted([((1,), (0,)), ((-1,), (0,)), ((0,), (1,)), ((0,), (-1,))])


def quadrant_tree_check(N: int) -> QuadrantReport:
    """Check that each open quadrant of Gamma_2(Z) induces a tree rooted at (+-1, +-1).

    Region: coprime (a, b) in the quadrant with |a| + |b| <= N.  Checks
    connectivity by BFS from the root, |E| = |V| - 1, a unique smaller
    neighbour for non-root vertices, two larger neighbours when
    |a| + |b| <= N/2, that the only vertices with a*b = 0 are (+-1, 0) and
    (0, +-1), and that quadrants plus those four cover the whole diamond.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    pr = ProductReplacementGraph(FreeAbelianGroup(1), 2)
    rep = QuadrantReport(N)
    for s in QUADRANTS:
        rep.vertices[s], rep.edges[s] = _evaluate_quadrant(_Quadrant(pr, s, N), N, rep.failures, s)
    _finish(pr, rep, N)
    return rep


def _finish(pr, rep: QuadrantReport, N: int) -> None:
    rep.exceptional = _exceptional(pr, N)
    if rep.exceptional != EXPECTED_EXCEPTIONAL:
        rep.failures.append(f"N={N}: exceptional set {rep.exceptional}")
    total = sum(1 for a in range(-N, N + 1) for b in range(-N, N + 1)
                if abs(a) + abs(b) <= N and math.gcd(a, b) == 1)
    if total != sum(rep.vertices.values()) + len(rep.exceptional):
        rep.failures.append(f"N={N}: quadrants and exceptional vertices do not cover {total} vertices")


def quadrant_tree_sweep(N_max: int) -> QuadrantReport:
    """The quadrant checks for every N in 2..N_max in one incremental pass.

    Vertices enter in order of |a| + |b|; a union-find tracks components and
    edges are counted as they close.  The count of larger in-region
    neighbours of v is nondecreasing in N, so checking it when v first
    qualifies (N = 2|v|) and at N_max covers every N in between.
    """
    if N_max < 2:
        raise ValueError("N must be >= 2")
    pr = ProductReplacementGraph(FreeAbelianGroup(1), 2)
    rep = QuadrantReport(N_max)
    for signs in QUADRANTS:
        q = _Quadrant(pr, signs, N_max)
        size = q.size
        by_size: dict[int, list] = {}
        for v in q.verts:
            by_size.setdefault(size[v], []).append(v)
        uf: dict = {}

        def find(x):
            while uf[x] != x:
                uf[x] = uf[uf[x]]
                x = uf[x]
            return x

        comps = edges = nverts = 0
        for N in range(2, N_max + 1):
            for v in by_size.get(N, ()):
                uf[v] = v
                nverts += 1
                comps += 1
                smaller = [u for u in q.nbrs[v] if size[u] < size[v]]
                if v != q.root and len(smaller) != 1:
                    rep.failures.append(f"N={N} {signs}: {v} has {len(smaller)} smaller neighbours")
                for u in smaller:
                    edges += 1
                    ru, rv = find(u), find(v)
                    if ru != rv:
                        uf[ru] = rv
                        comps -= 1
            if comps != 1:
                rep.failures.append(f"N={N} {signs}: {comps} components")
            if edges != nverts - 1:
                rep.failures.append(f"N={N} {signs}: |E|={edges} but |V|-1={nverts - 1}")
            for v in by_size.get(N // 2, ()):
                larger = [u for u in q.nbrs[v] if size[v] < size[u] <= N]
                if len(larger) != 2:
                    rep.failures.append(f"N={N} {signs}: {v} has {len(larger)} larger neighbours")
        for v in q.verts:
            if 2 * size[v] <= N_max and sum(1 for u in q.nbrs[v] if size[u] > size[v]) != 2:
                rep.failures.append(f"N={N_max} {signs}: {v} larger-neighbour count changed")
        rep.vertices[signs], rep.edges[signs] = nverts, edges
    for N in range(2, N_max + 1):
        exc = _exceptional(pr, N)
        if exc != EXPECTED_EXCEPTIONAL:
            rep.failures.append(f"N={N}: exceptional set {exc}")
    _finish(pr, rep, N_max)
    return rep


def tree_parent(v: Sequence) -> tuple:
    """The unique in-quadrant neighbour of v = (a, b) with smaller |a| + |b|."""
    pr = ProductReplacementGraph(FreeAbelianGroup(1), 2)
    a, b = v[0][0], v[1][0]
    if a == 0 or b == 0:
        raise ValueError("exceptional vertices have no parent")
    sa, sb = (1 if a > 0 else -1), (1 if b > 0 else -1)
    cands = {U for _, U in pr.neighbors(tuple(v))
             if U[0][0] * sa > 0 and U[1][0] * sb > 0 and abs(U[0][0]) + abs(U[1][0]) < abs(a) + abs(b)}
    if len(cands) != 1:
        raise ValueError(f"{v} has {len(cands)} candidate parents")
    return cands.pop()


# --------------------------------------------------------------------------
# redundancy reduction and Gamma_2(K) embeddings
# --------------------------------------------------------------------------

@dataclass
class ReductionResult:
    path: list
    reduced: tuple
    quotient_moves: int
    extension_moves: int

    def replay(self, pr: ProductReplacementGraph, T: Sequence) -> tuple:
        return pr.apply_path(T, self.path)


def reduce_redundant_tuple(L: LiftMap, T: Sequence, cap: int = 500_000) -> ReductionResult:
    """Nielsen-reduce an (n+2)-tuple so its last two entries lie in ker(pi).

    Finds a shortest path in Gamma_{n+2}(Q) sending the last two projected
    entries to the identity and replays it in G.  If both resulting entries
    are trivial, repeated R-moves by some t_i make the (n+1)-st entry a
    nontrivial kernel element (at most |Q| extra moves).
    """
    Q = L.target
    if not Q.is_finite:
        raise GroupError("the quotient must be finite")
    T = tuple(T)
    m = len(T)
    n = m - 2
    if n < 0:
        raise ValueError("tuple must have at least 2 entries")
    if (1 << n) < Q.order:
        raise GroupError(f"n={n} violates n >= log2|Q| for |Q|={Q.order}")
    G = L.source
    pr_G = ProductReplacementGraph(G, m)
    pr_Q = ProductReplacementGraph(Q, m)
    if not G.is_generating(T):
        raise NotGeneratingError("tuple does not generate")
    start = lift_vertex(L, T)
    e = Q.identity
    parent: dict = {start: None}
    queue = deque([start])
    goal = None
    while queue:
        U = queue.popleft()
        if U[-1] == e and U[-2] == e:
            goal = U
            break
        for mv, V in pr_Q.neighbors(U):
            if V not in parent:
                parent[V] = (U, mv)
                queue.append(V)
                if len(parent) > cap:
                    raise CapExceededError(f"quotient BFS exceeded cap {cap}")
    if goal is None:
        raise GroupError("no reduction exists in the quotient graph")
    path = []
    while parent[goal] is not None:
        goal, mv = parent[goal]
        path.append(mv)
    path.reverse()
    qlen = len(path)
    reduced = pr_G.apply_path(T, path)
    if not (L.kernel_contains(reduced[-1]) and L.kernel_contains(reduced[-2])):
        raise AssertionError("replayed path did not land in the kernel")
    ext = 0
    if G.is_identity(reduced[-1]) and G.is_identity(reduced[-2]):
        for i in range(1, n + 1):
            mv = NielsenMove("R", 1, i, n + 1)
            cur, steps = reduced, []
            for _ in range(Q.order):
                cur = pr_G.apply_move(cur, mv)
                steps.append(mv)
                if L.kernel_contains(cur[n]):
                    break
            if L.kernel_contains(cur[n]) and not G.is_identity(cur[n]):
                path += steps
                reduced, ext = cur, len(steps)
                break
        else:
            raise GroupError("could not make a kernel entry nontrivial")
    return ReductionResult(path, reduced, qlen, ext)


@dataclass
class EmbeddingReport:
    vertices: int
    edges_checked: int
    injective: bool
    edges_preserved: bool
    images_are_vertices: bool

    @property
    def passed(self) -> bool:
        return self.injective and self.edges_preserved and self.images_are_vertices


def embed_gamma2(G: Group, T: Sequence, K: Group, inclusion: Callable, radius: int = 5,
                 cap: int = 200_000) -> tuple[Callable, EmbeddingReport]:
    """Embedding (h1, h2) -> (t_1..t_n, h1, h2) of Gamma_2(K) into Gamma_{n+2}(G).

    ``inclusion`` maps K into G.  Returns the vertex map and a report checked
    on the radius-``radius`` ball of Gamma_2(K) around its standard root.
    """
    T = tuple(T)
    n = len(T)
    prK = ProductReplacementGraph(K, 2)
    rootK = prK.default_root()
    gensK = [inclusion(h) for h in rootK]
    if all(G.is_identity(x) for x in gensK):
        raise GroupError("K must be nontrivial")
    if not G.is_generating(T + tuple(gensK)):
        raise NotGeneratingError("T together with K does not generate G")
    prG = ProductReplacementGraph(G, n + 2)

    def embed(v):
        return T + tuple(inclusion(h) for h in v)

    ball = prK.explore_ball(rootK, radius, cap=cap)
    images = [embed(v) for v in ball.vertices]
    injective = len(set(images)) == len(images)
    ok_vertices = all(G.is_generating(U) for U in images[:200])
    preserved, checked = True, 0
    for i, mv, j in ball.half_edges():
        checked += 1
        if prG.apply_move(images[i], mv.shifted(n)) != images[j]:
            preserved = False
    return embed, EmbeddingReport(len(images), checked, injective, preserved, ok_vertices)


# --------------------------------------------------------------------------
# center quotient Cheeger comparison
# --------------------------------------------------------------------------

@dataclass
class CenterCheegerReport:
    h_G: Fraction | None
    h_Q: Fraction | None
    h_G_half: Fraction | None
    h_Q_half: Fraction | None
    quotient_order: int
    degenerate: bool

    @property
    def holds_all(self) -> bool:
        return self.h_Q >= self.h_G

    @property
    def holds_half(self) -> bool | None:
        if self.h_Q_half is None or self.h_G_half is None:
            return None
        return self.h_Q_half >= self.h_G_half

    @property
    def passed(self) -> bool:
        return self.holds_all and self.holds_half is not False


def verify_center_quotient_cheeger(G: FiniteGroup, S: Sequence, max_order: int = 24) -> CenterCheegerReport:
    """Exact h(G/Z(G), S~) >= h(G, S) on Cayley graphs under both subset conventions."""
    if not isinstance(G, FiniteGroup):
        raise GroupError("needs a finite group")
    if G.order > max_order:
        raise GroupError(f"|G|={G.order} exceeds {max_order}")
    if not G.is_generating(S):
        raise NotGeneratingError("S does not generate G")
    L = LiftMap.from_subgroup(G, G.center())
    hG = cheeger_exact(cayley_graph(G, S))
    hQ = cheeger_exact(cayley_graph(L.target, lift_vertex(L, S)))
    return CenterCheegerReport(hG.value, hQ.value, hG.value_half, hQ.value_half,
                               L.target.order, L.target.order == 1)
