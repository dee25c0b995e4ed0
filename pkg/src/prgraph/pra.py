"""Product replacement algorithm: seeded walks on Gamma_n(G) and mixing diagnostics.

Randomness comes from numpy's Philox4x64 counter-based generator.  Trial
``t`` of seed ``s`` uses the stream ``SeedSequence(s, spawn_key=(t,))``, so
trials are independent of each other and of how they are split over workers.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

import numpy as np
from scipy import stats

from .errors import CapExceededError, GraphError
from .graph import ProductReplacementGraph
from .groups import Group
from .metrics import walk_counts

EMIT_MODES = ("tuple", "random", "fixed")


@dataclass(frozen=True)
class WalkConfig:
    group: Group
    n: int
    start: tuple
    steps: int
    seed: int = 0
    emit: str = "random"
    emit_index: int = 1  # 1-based, used when emit == "fixed"

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.emit not in EMIT_MODES:
            raise ValueError(f"emit must be one of {EMIT_MODES}")
        if not 1 <= self.emit_index <= self.n:
            raise ValueError("emit_index out of range")

    @property
    def graph(self) -> ProductReplacementGraph:
        return ProductReplacementGraph(self.group, self.n)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed & ((1 << 64) - 1), spawn_key=(trial,))
    return np.random.Generator(np.random.Philox(ss))


def _walk(pr: ProductReplacementGraph, start: tuple, steps: int, rng: np.random.Generator) -> tuple:
    moves = pr.moves
    T = start
    if steps and pr.degree:
        for k in rng.integers(0, pr.degree, size=steps):
            T = pr.apply_move(T, moves[k])
    return T


def pra_walk(cfg: WalkConfig, trial: int = 0) -> tuple:
    """Final tuple after ``cfg.steps`` uniform Nielsen moves."""
    pr = cfg.graph
    return _walk(pr, pr.vertex(cfg.start), cfg.steps, trial_rng(cfg.seed, trial))


def _emit(cfg: WalkConfig, T: tuple, rng: np.random.Generator) -> Hashable:
    if cfg.emit == "tuple":
        return T
    if cfg.emit == "fixed":
        return T[cfg.emit_index - 1]
    return T[int(rng.integers(0, cfg.n))]


def _run_trials(cfg: WalkConfig, lo: int, hi: int) -> Counter:
    pr = cfg.graph
    start = tuple(cfg.start)
    out: Counter = Counter()
    for t in range(lo, hi):
        rng = trial_rng(cfg.seed, t)
        out[_emit(cfg, _walk(pr, start, cfg.steps, rng), rng)] += 1
    return out


def sample_elements(cfg: WalkConfig, trials: int, workers: int = 1) -> Counter:
    """Histogram of emitted values over ``trials`` independent seeded walks."""
    if trials < 0:
        raise ValueError("trials must be >= 0")
    cfg.graph.vertex(cfg.start)
    if workers <= 1 or trials < 2 * workers:
        return _run_trials(cfg, 0, trials)
    bounds = np.linspace(0, trials, workers + 1).astype(int)
    total: Counter = Counter()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_trials, cfg, int(a), int(b)) for a, b in zip(bounds, bounds[1:])]
        for f in futures:
            total.update(f.result())
    return total


def exact_walk_distribution(pr: ProductReplacementGraph, start: Sequence, t: int,
                            cap: int = 50_000) -> dict[tuple, Fraction]:
    """Exact law of the walk after t steps, over the component of ``start``."""
    start = tuple(start)
    comp = pr.explore_ball(start, radius=cap + 1, cap=cap)
    if comp.truncated or not comp.fully_explored:
        raise CapExceededError(f"component of {pr.format_vertex(start)} exceeds cap {cap}")
    counts = walk_counts(comp, 0, t)
    denom = pr.degree ** t
    return {comp.vertices[i]: Fraction(c, denom) for i, c in sorted(counts.items())}


def component_vertices(pr: ProductReplacementGraph, start: Sequence, cap: int = 50_000) -> list[tuple]:
    comp = pr.explore_ball(tuple(start), radius=cap + 1, cap=cap)
    if comp.truncated:
        raise CapExceededError(f"component exceeds cap {cap}")
    return list(comp.vertices)


def element_distribution(dist: Mapping[tuple, Fraction], n: int) -> dict:
    """Law of a uniformly random coordinate of a tuple drawn from ``dist``."""
    out: dict = {}
    for T, p in dist.items():
        for x in T:
            out[x] = out.get(x, 0) + Fraction(p) / n
    return out


def total_variation(p: Mapping, q: Mapping) -> float:
    """1/2 sum |p - q| over the union of supports (values may be Fractions)."""
    keys = set(p) | set(q)
    return 0.5 * float(sum(abs(Fraction(p.get(k, 0)) - Fraction(q.get(k, 0))) for k in keys))


def tv_to_uniform(dist: Mapping, support: Sequence) -> float:
    """Total variation distance from ``dist`` to uniform on ``support``.

    ``dist`` may hold probabilities or raw counts (counts are normalised).
    """
    support = list(support)
    if not support:
        raise ValueError("support must be non-empty")
    total = sum(Fraction(v) for v in dist.values())
    if total == 0:
        raise ValueError("empty distribution")
    p = {k: Fraction(v) / total for k, v in dist.items()}
    u = Fraction(1, len(support))
    return total_variation(p, {k: u for k in support})


@dataclass
class ChiSquareResult:
    statistic: float
    dof: int
    p_value: float
    bins: int


def chi_square_vs_exact(counts: Mapping, exact: Mapping, min_expected: float = 5.0) -> ChiSquareResult:
    """Pearson chi-square of observed counts against an exact law.

    Bins are fixed from the exact law alone: one bin per outcome whose expected
    count is at least ``min_expected``, the remaining outcomes pooled.
    """
    n = sum(counts.values())
    if n == 0:
        raise ValueError("no observations")
    extra = set(counts) - set(exact)
    if extra:
        raise GraphError(f"{len(extra)} observed outcomes have zero exact probability")
    keys = sorted(exact, key=repr)
    obs, exp = [], []
    pooled_o = pooled_e = 0.0
    for k in keys:
        e = float(exact[k]) * n
        if e >= min_expected:
            obs.append(counts.get(k, 0))
            exp.append(e)
        else:
            pooled_o += counts.get(k, 0)
            pooled_e += e
    if pooled_e > 0:
        obs.append(pooled_o)
        exp.append(pooled_e)
    obs, exp = np.array(obs, float), np.array(exp, float)
    stat = float(((obs - exp) ** 2 / exp).sum())
    dof = len(obs) - 1
    return ChiSquareResult(stat, dof, float(stats.chi2.sf(stat, dof)) if dof > 0 else 1.0, len(obs))


def mixing_report(cfg: WalkConfig, trials: int, workers: int = 1, cap: int = 50_000) -> dict:
    """Empirical vs exact laws after ``cfg.steps`` steps, for vertices and emitted elements.

    Vertex-level figures compare against the stationary law (uniform on the
    walk's component); element-level figures compare against uniform on G.
    """
    pr = cfg.graph
    start = pr.vertex(cfg.start)
    exact = exact_walk_distribution(pr, start, cfg.steps, cap=cap)
    verts = component_vertices(pr, start, cap=cap)
    tuple_cfg = WalkConfig(cfg.group, cfg.n, start, cfg.steps, cfg.seed, "tuple")
    hist = sample_elements(tuple_cfg, trials, workers)
    chi = chi_square_vs_exact(hist, exact)
    report = {
        "t": cfg.steps,
        "trials": trials,
        "seed": cfg.seed,
        "component_size": len(verts),
        "vertex_tv_exact_to_uniform": tv_to_uniform(exact, verts),
        "vertex_tv_empirical_to_exact": total_variation({k: Fraction(v, trials) for k, v in hist.items()}, exact),
        "chi_square": {"statistic": chi.statistic, "dof": chi.dof, "p_value": chi.p_value, "bins": chi.bins},
    }
    if cfg.group.is_finite:
        elem_exact = element_distribution(exact, cfg.n)
        report["element_tv_exact_to_uniform"] = tv_to_uniform(elem_exact, cfg.group.elements)
    return report
