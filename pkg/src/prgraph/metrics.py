"""Amenability measurements on explored graphs.

Exact quantities (Cheeger constants, return probabilities) are computed with
integers and ``Fraction``; floats appear only in eigenvalue estimates and in
k-th roots.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceededError, GraphError
from .graph import ExploredGraph, ProductReplacementGraph

log = logging.getLogger(__name__)

CHEEGER_MAX_VERTICES = 24


def _as_indices(graph: ExploredGraph, X: Iterable) -> set[int]:
    out = set()
    for x in X:
        x = tuple(x) if isinstance(x, list) else x
        if x in graph.index:
            out.add(graph.index[x])
        elif isinstance(x, int) and 0 <= x < len(graph):
            out.add(x)
        else:
            raise GraphError(f"{x!r} is not a vertex of the explored graph")
    return out


def boundary(graph: ExploredGraph, X: Iterable) -> list[tuple[int, object, int]]:
    """Half-edges leaving X, with multiplicity; loops never count.

    ``X`` holds vertex indices or vertex values, all of which must be complete.
    """
    idx = _as_indices(graph, X)
    if any(not graph.is_complete(i) for i in idx):
        raise GraphError("boundary not fully known: X touches incomplete vertices")
    return [(i, label, j) for i in sorted(idx) for label, j in graph.adj[i] if j not in idx]


@dataclass
class CheegerResult:
    value: Fraction | None
    witness: list
    value_half: Fraction | None
    witness_half: list
    n_vertices: int


def cheeger_exact(graph: ExploredGraph, max_vertices: int = CHEEGER_MAX_VERTICES) -> CheegerResult:
    """Exhaustive Cheeger constant min |dX|/|X| of a fully explored graph.

    Two conventions are returned: ``value`` over all non-empty X (the plain
    infimum, 0 on any finite graph with a component) and ``value_half`` over
    ``0 < |X| <= |V|/2``.  Ties resolve to the smallest bitmask.
    """
    n = len(graph)
    if not graph.fully_explored:
        raise GraphError("cheeger_exact needs a fully explored graph")
    if n > max_vertices:
        raise GraphError(f"{n} vertices exceeds the exhaustive limit {max_vertices}")
    weights = graph.edge_weights()
    us = np.array([u for u, _ in weights], dtype=np.int64)
    vs = np.array([v for _, v in weights], dtype=np.int64)
    ws = np.array(list(weights.values()), dtype=np.int64)

    best = [None, 0]       # (Fraction, mask) unrestricted
    best_half = [None, 0]
    chunk = 1 << 20
    total = 1 << n
    for start in range(1, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        sizes = np.bitwise_count(masks).astype(np.int64)
        bnd = np.zeros(len(masks), dtype=np.int64)
        for u, v, w in zip(us, vs, ws):
            bnd += w * (((masks >> u) ^ (masks >> v)) & 1)
        ratio = bnd / sizes
        for slot, sel in ((best, None), (best_half, sizes <= n // 2)):
            r = ratio if sel is None else np.where(sel, ratio, np.inf)
            k = int(np.argmin(r))
            if not np.isfinite(r[k]):
                continue
            cand = Fraction(int(bnd[k]), int(sizes[k]))
            if slot[0] is None or cand < slot[0]:
                slot[0], slot[1] = cand, int(masks[k])

    def members(mask):
        return [graph.vertices[i] for i in range(n) if mask >> i & 1]

    return CheegerResult(best[0], members(best[1]), best_half[0],
                         members(best_half[1]) if best_half[0] is not None else [], n)


def transition_matrix(graph: ExploredGraph) -> np.ndarray:
    """Dense P = A/d with multiplicities; loop half-edges on the diagonal."""
    if not graph.fully_explored:
        raise GraphError("transition matrix needs a fully explored graph")
    n, d = len(graph), graph.degree
    A = np.zeros((n, n))
    for i, adj in graph.adj.items():
        if len(adj) != d:
            raise GraphError(f"vertex {i} has degree {len(adj)}, expected {d}")
        for _, j in adj:
            A[i, j] += 1
    return A / d


def is_connected(graph: ExploredGraph) -> bool:
    seen, stack = {0}, [0]
    while stack:
        i = stack.pop()
        for _, j in graph.adj.get(i, ()):
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == len(graph)


def spectral_gap(graph: ExploredGraph, tol: float = 1e-9, max_iter: int = 1_000_000,
                 seed: int = 0) -> float:
    """1 - lambda_2 of the walk P = A/d by power iteration with deflation.

    Iterates the lazy operator (I + P)/2 on the complement of the constant
    vector.  A single vertex is degenerate and returns 0.0.
    """
    if len(graph) == 1:
        log.warning("spectral gap of a single-vertex graph is degenerate; returning 0")
        return 0.0
    P = transition_matrix(graph)
    if not is_connected(graph):
        raise GraphError("spectral gap needs a connected graph")
    if not np.allclose(P, P.T):
        raise GraphError("transition matrix is not symmetric")
    n = len(graph)
    M = 0.5 * (np.eye(n) + P)
    x = np.random.default_rng(seed).standard_normal(n)
    mu_prev = math.inf
    for it in range(max_iter):
        x -= x.mean()
        x /= np.linalg.norm(x)
        y = M @ x
        mu = float(x @ y)
        x = y
        # Rayleigh quotient error is quadratic in the vector error
        if abs(mu - mu_prev) < tol * tol:
            break
        mu_prev = mu
    else:
        log.warning("power iteration hit max_iter=%d", max_iter)
    lam2 = 2.0 * mu - 1.0
    return 1.0 - lam2


@dataclass
class GrowthResult:
    ratio: Fraction
    neighborhood_size: int
    boundary_bound: Fraction | None
    boundary_size: int


def neighborhood_growth(graph: ExploredGraph, X: Iterable, r: int) -> GrowthResult:
    """|X^(r)| / |X| and the implied lower bound (alpha - 1) |X| / (r^2 d^(r-1)) on |dX|."""
    idx = _as_indices(graph, X)
    if not idx:
        raise GraphError("X must be non-empty")
    seen = set(idx)
    layer = set(idx)
    for _ in range(r):
        nxt = set()
        for i in layer:
            if not graph.is_complete(i):
                raise GraphError("r-neighborhood exits the explored region")
            for _, j in graph.adj[i]:
                if j not in seen:
                    nxt.add(j)
        seen |= nxt
        layer = nxt
    alpha = Fraction(len(seen), len(idx))
    bound = None
    if r >= 1:
        bound = (alpha - 1) * len(idx) / (r * r * Fraction(graph.degree) ** (r - 1))
    bsize = len(boundary(graph, idx)) if all(graph.is_complete(i) for i in idx) else -1
    return GrowthResult(alpha, len(seen), bound, bsize)


# --------------------------------------------------------------------------
# walks
# --------------------------------------------------------------------------

def walk_counts(graph: ExploredGraph, start: int, t: int) -> dict[int, int]:
    """Number of length-t walks from ``start`` ending at each vertex."""
    counts = {start: 1}
    for _ in range(t):
        nxt: dict[int, int] = {}
        for i, c in counts.items():
            adj = graph.adj.get(i)
            if adj is None:
                raise GraphError("walk reached an incomplete vertex; explored ball too small")
            for _, j in adj:
                nxt[j] = nxt.get(j, 0) + c
        counts = nxt
    return counts


def closed_walk_count(graph: ExploredGraph, k: int, start: int = 0) -> int:
    """Closed k-walks at ``start`` via half-walks: N_m . N_m (even) or N_m A N_m (odd).

    Needs every vertex within distance ceil(k/2) - 1 of start complete.
    """
    half = walk_counts(graph, start, k // 2)
    if k % 2 == 0:
        return sum(c * c for c in half.values())
    total = 0
    for i, c in half.items():
        adj = graph.adj.get(i)
        if adj is None:
            raise GraphError("odd closed walk needs the half-walk support to be complete")
        total += c * sum(half.get(j, 0) for _, j in adj)
    return total


def return_probabilities(pr: ProductReplacementGraph, root: Sequence, ks: Iterable[int],
                         cap: int = 2_000_000) -> dict[int, Fraction]:
    """Exact p^(k)(root, root) for each k, sharing one BFS ball."""
    ks = sorted(set(ks))
    if not ks:
        return {}
    if ks[0] < 0:
        raise ValueError("k must be >= 0")
    radius = (ks[-1] + 1) // 2
    ball = pr.explore_ball(root, radius, cap=cap)
    if ball.truncated:
        raise CapExceededError(f"ball of radius {radius} exceeds cap {cap}")
    d = pr.degree
    return {k: Fraction(closed_walk_count(ball, k), d ** k) for k in ks}


def return_probability(pr: ProductReplacementGraph, root: Sequence, k: int,
                       cap: int = 2_000_000) -> Fraction:
    """Exact probability that the nearest-neighbour walk is back at ``root`` at time k."""
    if k == 0:
        return Fraction(1)
    if pr.degree == 0:
        raise GraphError("walks on an edgeless graph are undefined")
    return return_probabilities(pr, root, [k], cap)[k]


def rho_estimate(pr: ProductReplacementGraph, root: Sequence, k_max: int,
                 cap: int = 2_000_000) -> list[tuple[int, float]]:
    """Finite-k estimates p^(k)^(1/k) at even k = 2..k_max (no limit is claimed)."""
    ks = list(range(2, k_max + 1, 2))
    probs = return_probabilities(pr, root, ks, cap)
    return [(k, float(probs[k]) ** (1.0 / k)) for k in ks]


# --------------------------------------------------------------------------
# report
# --------------------------------------------------------------------------

@dataclass
class MetricsReport:
    group: str
    n: int
    root: str
    truncation: dict = field(default_factory=dict)
    cheeger: str | None = None
    cheeger_half: str | None = None
    witness_set: list | None = None
    witness_set_half: list | None = None
    spectral_gap: float | None = None
    return_probs: list = field(default_factory=list)
    rho_estimates: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, manifest: dict | None = None) -> str:
        d = self.to_dict()
        if manifest is not None:
            d = {"manifest": manifest, **d}
        return json.dumps(d, indent=1, sort_keys=True) + "\n"


def return_probability_rows(probs: dict[int, Fraction]) -> list[list]:
    """CSV rows ``k, numerator, denominator, float``."""
    return [[k, p.numerator, p.denominator, repr(float(p))] for k, p in sorted(probs.items())]


def compute_metrics(pr: ProductReplacementGraph, root: Sequence, which: Iterable[str],
                    radius: int = 64, cap: int = 200_000, k_max: int = 12) -> MetricsReport:
    """Run the requested metrics, recording per-metric failures instead of raising.

    ``which`` may contain ``cheeger``, ``gap``, ``return``, ``rho``.
    """
    which = set(which)
    unknown = which - {"cheeger", "gap", "return", "rho"}
    rep = MetricsReport(pr.group.spec, pr.n, pr.format_vertex(root),
                        truncation={"radius": radius, "cap": cap, "k_max": k_max})
    for name in sorted(unknown):
        rep.errors[name] = "unknown metric"
    graph = None
    if which & {"cheeger", "gap"}:
        graph = pr.explore_ball(root, radius, cap=cap)
        rep.truncation["explored_vertices"] = len(graph)
        if len(graph) == 1:
            rep.flags.append("degenerate: single vertex")
    if "cheeger" in which:
        try:
            res = cheeger_exact(graph)
            rep.cheeger = str(res.value)
            rep.cheeger_half = None if res.value_half is None else str(res.value_half)
            rep.witness_set = [pr.format_vertex(v) for v in res.witness]
            rep.witness_set_half = [pr.format_vertex(v) for v in res.witness_half]
        except GraphError as exc:
            rep.errors["cheeger"] = str(exc)
    if "gap" in which:
        try:
            rep.spectral_gap = spectral_gap(graph)
        except GraphError as exc:
            rep.errors["gap"] = str(exc)
    if which & {"return", "rho"}:
        try:
            probs = return_probabilities(pr, root, range(0, k_max + 1), cap=cap)
            if "return" in which:
                rep.return_probs = [[k, str(p)] for k, p in sorted(probs.items())]
            if "rho" in which:
                rep.rho_estimates = [[k, float(probs[k]) ** (1.0 / k)]
                                     for k in range(2, k_max + 1, 2)]
        except (CapExceededError, GraphError) as exc:
            for name in which & {"return", "rho"}:
                rep.errors[name] = str(exc)
    return rep
