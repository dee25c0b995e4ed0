"""Nielsen moves, product replacement graphs and bounded BFS exploration.

A vertex of the product replacement graph is a plain tuple of group elements
that generates the group.  Every vertex has exactly ``4n(n-1)`` outgoing
half-edges, one per Nielsen move; loops and parallel edges are kept.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Iterable, Sequence

from .errors import NotGeneratingError
from .groups import Group


@dataclass(frozen=True, order=True)
class NielsenMove:
    """Replace item ``j`` by ``s_j s_i^sign`` (side R) or ``s_i^sign s_j`` (side L).

    Indices are 1-based, matching the usual notation for R_ij and L_ij.
    """

    side: str
    sign: int
    i: int
    j: int

    def __post_init__(self):
        if self.side not in ("L", "R") or self.sign not in (-1, 1) or self.i == self.j:
            raise ValueError(f"invalid Nielsen move {self.side} {self.sign} {self.i} {self.j}")

    def inverse(self) -> "NielsenMove":
        return NielsenMove(self.side, -self.sign, self.i, self.j)

    def shifted(self, offset: int) -> "NielsenMove":
        return NielsenMove(self.side, self.sign, self.i + offset, self.j + offset)

    def __str__(self) -> str:
        return f"{self.side}{'+' if self.sign > 0 else '-'}{self.i},{self.j}"

    @classmethod
    def parse(cls, text: str) -> "NielsenMove":
        head, rest = text[:2], text[2:]
        i, j = (int(x) for x in rest.split(","))
        return cls(head[0], 1 if head[1] == "+" else -1, i, j)


@lru_cache(maxsize=None)
def all_moves(n: int) -> tuple[NielsenMove, ...]:
    """The 4n(n-1) moves in (side, sign, i, j) lexicographic order."""
    return tuple(
        NielsenMove(side, sign, i, j)
        for side in ("L", "R")
        for sign in (-1, 1)
        for i in range(1, n + 1)
        for j in range(1, n + 1)
        if i != j
    )


class ProductReplacementGraph:
    """The graph Gamma_n(G) of generating n-tuples connected by Nielsen moves."""

    def __init__(self, group: Group, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.group = group
        self.n = n
        self.moves = all_moves(n)
        self.degree = len(self.moves)

    def __repr__(self):
        return f"ProductReplacementGraph({self.group.spec}, n={self.n})"

    # -- vertices ----------------------------------------------------------
    def is_vertex(self, T: Sequence) -> bool:
        return len(T) == self.n and self.group.is_generating(T)

    def vertex(self, items: Iterable) -> tuple:
        T = tuple(self.group.validate(x) for x in items)
        if len(T) != self.n:
            raise ValueError(f"expected {self.n} items, got {len(T)}")
        if not self.group.is_generating(T):
            raise NotGeneratingError(f"{self.format_vertex(T)} does not generate {self.group.spec}")
        return T

    def format_vertex(self, T: Sequence) -> str:
        return ";".join(self.group.format(x) for x in T)

    def parse_vertex(self, text: str) -> tuple:
        return self.vertex(self.group.parse(part) for part in text.split(";"))

    def vertex_key(self, T: Sequence) -> str:
        """Comma-joined hex of the canonical element encodings."""
        return ",".join(self.group.encode(x).hex() for x in T)

    def default_root(self) -> tuple:
        """Standard generating tuple padded with identities."""
        G = self.group
        gens = _standard_generators(G)
        if len(gens) > self.n:
            raise NotGeneratingError(f"no default root of length {self.n} for {G.spec}")
        return self.vertex(list(gens) + [G.identity] * (self.n - len(gens)))

    # -- moves -------------------------------------------------------------
    def apply_move(self, T: Sequence, m: NielsenMove) -> tuple:
        G = self.group
        si = T[m.i - 1] if m.sign > 0 else G.inv(T[m.i - 1])
        sj = T[m.j - 1]
        new = G.mul(sj, si) if m.side == "R" else G.mul(si, sj)
        out = list(T)
        out[m.j - 1] = new
        return tuple(out)

    def apply_path(self, T: Sequence, path: Iterable[NielsenMove]) -> tuple:
        for m in path:
            T = self.apply_move(T, m)
        return tuple(T)

    def neighbors(self, T: Sequence) -> list[tuple[NielsenMove, tuple]]:
        G = self.group
        inv = [G.inv(x) for x in T]
        out = []
        for m in self.moves:
            si = T[m.i - 1] if m.sign > 0 else inv[m.i - 1]
            sj = T[m.j - 1]
            new = G.mul(sj, si) if m.side == "R" else G.mul(si, sj)
            U = list(T)
            U[m.j - 1] = new
            out.append((m, tuple(U)))
        return out

    # -- exploration -------------------------------------------------------
    def explore_ball(self, root: Sequence, radius: int, cap: int = 1_000_000,
                     check_generation: bool = False) -> "ExploredGraph":
        """BFS ball of the given radius around ``root``.

        Vertices are numbered in discovery order.  A vertex is expanded (and
        marked complete) iff its depth is below ``radius``.  If expanding a
        vertex would push the vertex count past ``cap``, exploration stops
        before that vertex and the result is flagged truncated.
        """
        root = tuple(root)
        if radius < 0:
            raise ValueError("radius must be >= 0")
        if check_generation and not self.is_vertex(root):
            raise NotGeneratingError("root does not generate")
        g = ExploredGraph(root=root, radius=radius, degree=self.degree, labels_are_moves=True)
        g._add(root, 0)
        truncated = len(g.vertices) > cap
        head = 0
        while head < len(g.vertices) and not truncated:
            if g.depth[head] >= radius:
                break
            T = g.vertices[head]
            nbrs = self.neighbors(T)
            new = {U for _, U in nbrs if U not in g.index}
            if len(g.vertices) + len(new) > cap:
                truncated = True
                break
            adj = []
            for m, U in nbrs:
                j = g.index.get(U)
                if j is None:
                    if check_generation and not self.is_vertex(U):
                        raise AssertionError(f"neighbor {U} of {T} does not generate")
                    j = g._add(U, g.depth[head] + 1)
                adj.append((m, j))
            g.adj[head] = adj
            head += 1
        g.truncated = truncated
        g.meta = {"group": self.group.spec, "n": self.n}
        g._pr = self
        return g

    def distance(self, a: Sequence, b: Sequence, cap: int = 1_000_000) -> float:
        """Bidirectional BFS distance; ``math.inf`` if not found within ``cap`` visited vertices."""
        a, b = tuple(a), tuple(b)
        if a == b:
            return 0
        dist_a, dist_b = {a: 0}, {b: 0}
        front_a, front_b = [a], [b]
        while front_a and front_b:
            if len(dist_a) + len(dist_b) > cap:
                return math.inf
            # expand the smaller side one full layer
            if len(front_a) > len(front_b):
                front_a, front_b, dist_a, dist_b = front_b, front_a, dist_b, dist_a
            nxt, best = [], math.inf
            for T in front_a:
                d = dist_a[T] + 1
                for _, U in self.neighbors(T):
                    if U in dist_b:
                        best = min(best, d + dist_b[U])
                    if U not in dist_a:
                        dist_a[U] = d
                        nxt.append(U)
            if best < math.inf:
                return best
            front_a = nxt
        return math.inf


def _standard_generators(G: Group) -> list:
    from .groups import (DihedralGroup, FiniteAbelianGroup, FreeAbelianGroup,
                         InfiniteDihedralGroup, SymmetricGroup)

    if isinstance(G, FreeAbelianGroup):
        return [tuple(int(i == j) for j in range(G.k)) for i in range(G.k)]
    if isinstance(G, FiniteAbelianGroup):
        k = len(G.moduli)
        return [tuple(int(i == j) % G.moduli[i] for j in range(k)) for i in range(k)]
    if isinstance(G, InfiniteDihedralGroup):
        return [(1, 0), (0, 1)]
    if isinstance(G, DihedralGroup):
        return [(1 % G.m, 0), (0, 1)]
    if isinstance(G, SymmetricGroup):
        if G.m <= 2:
            return [G.parse("(1 2)")] if G.m == 2 else []
        return [G.parse("(1 2)"), G.parse("(" + " ".join(str(i) for i in range(1, G.m + 1)) + ")")]
    # generic finite group: smallest generating set by search, else greedy closure
    d = G.rank
    if d is not None:
        for combo in itertools.combinations(G.elements, d):
            if len(G.closure(combo)) == G.order:
                return list(combo)
    gens, closed = [], G.closure([])
    for g in G.elements:
        if g not in closed:
            gens.append(g)
            closed = G.closure(gens)
            if len(closed) == G.order:
                break
    return gens


@dataclass
class ExploredGraph:
    """A finite window onto a (possibly infinite) regular multigraph.

    ``adj[i]`` lists the outgoing half-edges ``(label, j)`` of vertex ``i``
    and is present exactly for complete vertices.
    """

    root: Hashable
    radius: int
    degree: int
    vertices: list = field(default_factory=list)
    index: dict = field(default_factory=dict)
    depth: list = field(default_factory=list)
    adj: dict = field(default_factory=dict)
    truncated: bool = False
    labels_are_moves: bool = False
    meta: dict = field(default_factory=dict)
    _pr: ProductReplacementGraph | None = field(default=None, repr=False, compare=False)

    def _add(self, v, d) -> int:
        i = len(self.vertices)
        self.vertices.append(v)
        self.index[v] = i
        self.depth.append(d)
        return i

    def __len__(self):
        return len(self.vertices)

    def is_complete(self, i: int) -> bool:
        return i in self.adj

    @property
    def fully_explored(self) -> bool:
        return len(self.adj) == len(self.vertices)

    def half_edges(self):
        for i in sorted(self.adj):
            for label, j in self.adj[i]:
                yield i, label, j

    def edge_weights(self) -> dict[tuple[int, int], int]:
        """Multiplicity of each non-loop edge {u, v}, keyed with u < v.

        Uses the side of a complete endpoint; on a regular undirected
        multigraph both sides agree.
        """
        w: dict[tuple[int, int], int] = {}
        for i, adj in self.adj.items():
            for _, j in adj:
                if i == j:
                    continue
                key = (i, j) if i < j else (j, i)
                if i < j or j not in self.adj:
                    w[key] = w.get(key, 0) + 1
        return w

    # -- construction helpers ---------------------------------------------
    @classmethod
    def from_adjacency(cls, adjacency: Sequence[Sequence[int]], vertices: Sequence | None = None,
                       degree: int | None = None) -> "ExploredGraph":
        """Fully explored graph from half-edge lists (loops listed once per half-edge)."""
        verts = list(vertices) if vertices is not None else list(range(len(adjacency)))
        if degree is None:
            degree = max((len(a) for a in adjacency), default=0)
        g = cls(root=verts[0] if verts else None, radius=math.inf, degree=degree)
        for v in verts:
            g._add(v, 0)
        for i, nbrs in enumerate(adjacency):
            g.adj[i] = [(k, j) for k, j in enumerate(nbrs)]
        _fill_depths(g)
        return g

    # -- export ------------------------------------------------------------
    def _labels(self):
        if self._pr is not None:
            return [self._pr.format_vertex(v) for v in self.vertices], [self._pr.vertex_key(v) for v in self.vertices]
        return [str(v) for v in self.vertices], [str(v) for v in self.vertices]

    def canonical_half_edges(self):
        """One representative per half-edge pair (u, m, v) / (v, m^-1, u)."""
        for i, label, j in self.half_edges():
            if j not in self.adj:
                yield i, label, j
            elif i < j or (i == j and _label_sign(label) > 0):
                yield i, label, j

    def to_dict(self) -> dict:
        labels, keys = self._labels()
        return {
            "group": self.meta.get("group"),
            "n": self.meta.get("n"),
            "root": labels[0] if labels else None,
            "radius": self.radius if self.radius != math.inf else None,
            "degree": self.degree,
            "truncated": self.truncated,
            "fully_explored": self.fully_explored,
            "vertices": [
                {"id": keys[i], "label": labels[i], "depth": self.depth[i], "complete": self.is_complete(i)}
                for i in range(len(self.vertices))
            ],
            "half_edges": [_edge_row(i, label, j) for i, label, j in self.half_edges()],
        }

    def to_json(self, manifest: dict | None = None) -> str:
        d = self.to_dict()
        if manifest is not None:
            d = {"manifest": manifest, **d}
        return json.dumps(d, indent=1, sort_keys=True, ensure_ascii=False) + "\n"

    def to_csv(self, manifest: dict | None = None) -> str:
        _, keys = self._labels()
        buf = io.StringIO()
        if manifest is not None:
            buf.write("# manifest: " + json.dumps(manifest, sort_keys=True) + "\r\n")
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["src", "dst", "side", "sign", "i", "j"])
        for i, label, j in self.canonical_half_edges():
            row = _edge_row(i, label, j)
            w.writerow([keys[i], keys[j]] + row[2:])
        return buf.getvalue()

    def to_dot(self, manifest: dict | None = None) -> str:
        labels, keys = self._labels()
        lines = []
        if manifest is not None:
            lines.append("// manifest: " + json.dumps(manifest, sort_keys=True))
        lines.append("graph explored {")
        for i in range(len(self.vertices)):
            style = "" if self.is_complete(i) else ", style=dashed"
            lines.append(f'  "{keys[i]}" [label="{labels[i]}"{style}];')
        for i, label, j in self.canonical_half_edges():
            lines.append(f'  "{keys[i]}" -- "{keys[j]}" [label="{label}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_dict(cls, data: dict, pr: ProductReplacementGraph) -> "ExploredGraph":
        verts = [pr.parse_vertex(v["label"]) for v in data["vertices"]]
        g = cls(root=verts[0], radius=data["radius"] if data["radius"] is not None else math.inf,
                degree=data["degree"], labels_are_moves=True)
        for v, rec in zip(verts, data["vertices"]):
            g._add(v, rec["depth"])
        complete = {i for i, rec in enumerate(data["vertices"]) if rec["complete"]}
        for i in complete:
            g.adj[i] = []
        for src, dst, side, sign, i, j in data["half_edges"]:
            g.adj[src].append((NielsenMove(side, sign, i, j), dst))
        g.truncated = data["truncated"]
        g.meta = {"group": data["group"], "n": data["n"]}
        g._pr = pr
        return g


def _label_sign(label) -> int:
    if isinstance(label, NielsenMove):
        return label.sign
    if isinstance(label, tuple) and len(label) == 2:
        return label[1]
    return 1


def _edge_row(i, label, j) -> list:
    if isinstance(label, NielsenMove):
        return [i, j, label.side, label.sign, label.i, label.j]
    if isinstance(label, tuple):
        return [i, j, "C", label[1], label[0], 0]
    return [i, j, "", 0, label, 0]


def _fill_depths(g: ExploredGraph) -> None:
    if not g.vertices:
        return
    depth = [math.inf] * len(g.vertices)
    depth[0] = 0
    q = deque([0])
    while q:
        i = q.popleft()
        for _, j in g.adj.get(i, ()):
            if depth[j] == math.inf:
                depth[j] = depth[i] + 1
                q.append(j)
    g.depth = depth


def cayley_graph(G: Group, S: Sequence) -> ExploredGraph:
    """Cay(G, S) with half-edges g -> g s_i^{+-1}, labelled ``(i, sign)``; G finite."""
    elems = G.elements
    idx = G.index
    S = list(S)
    inv = [G.inv(s) for s in S]
    g = ExploredGraph(root=G.identity, radius=math.inf, degree=2 * len(S))
    for e in elems:
        g._add(e, 0)
    for a, e in enumerate(elems):
        adj = []
        for i, (s, si) in enumerate(zip(S, inv), start=1):
            adj.append(((i, 1), idx[G.mul(e, s)]))
            adj.append(((i, -1), idx[G.mul(e, si)]))
        g.adj[a] = adj
    _fill_depths(g)
    g.meta = {"group": G.spec, "cayley": [G.format(s) for s in S]}
    return g
