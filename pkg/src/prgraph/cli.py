"""Command-line front end.

Subcommands: explore, metrics, verify, sample, export.  Every output file
embeds a run manifest (JSON key, or a leading ``#``/``//`` comment line for
CSV/DOT) and contains no timestamps, so identical flags give identical bytes.

Exit codes: 0 success, 1 internal error, 2 user error, 3 verification failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .constructions import (LiftMap, conjugation_fibers, embed_gamma2, quadrant_tree_check,
                            quadrant_tree_sweep, reduce_redundant_tuple, verify_center_quotient_cheeger,
                            verify_conjugation_lipschitz, verify_local_isomorphism,
                            verify_return_domination)
from .errors import PRGraphError
from .graph import ExploredGraph, ProductReplacementGraph
from .groups import (DihedralGroup, FiniteAbelianGroup, FiniteGroup, FreeAbelianGroup, Group,
                     InfiniteDihedralGroup, parse_group_spec, random_generating_tuple)
from .metrics import compute_metrics, return_probability_rows
from .pra import WalkConfig, mixing_report, sample_elements

EXIT_OK, EXIT_INTERNAL, EXIT_USER, EXIT_FAILED = 0, 1, 2, 3
CHECKS = ("lipschitz", "fibers", "local-iso", "domination", "quadrant-tree", "center-cheeger", "reduce", "embed")


class UserError(PRGraphError):
    pass


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, float) and x == float("inf"):
        return "inf"
    return x


def dump_json(obj) -> str:
    return json.dumps(jsonable(obj), indent=1, sort_keys=True, ensure_ascii=False) + "\n"


def manifest(args, command: str, outputs=()) -> dict:
    skip = {"func", "command"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return {"command": command, "params": jsonable(params), "outputs": list(outputs),
            "tool_version": __version__}


def graph_and_root(group_spec: str, n: int, root: str | None) -> tuple[ProductReplacementGraph, tuple]:
    G = parse_group_spec(group_spec)
    pr = ProductReplacementGraph(G, n)
    T = pr.parse_vertex(root) if root else pr.default_root()
    return pr, T


def write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)


def resolve_lift(G: Group, h_spec: str) -> LiftMap:
    """Projection G -> H for ``--H`` given as a spec, ``center`` or ``same``."""
    if h_spec == "same":
        return LiftMap.identity(G)
    if h_spec == "center":
        return LiftMap.from_subgroup(G, G.center())
    H = parse_group_spec(h_spec)
    if H == G:
        return LiftMap.identity(G)
    if isinstance(G, FreeAbelianGroup) and isinstance(H, FiniteAbelianGroup):
        ms = set(H.moduli)
        if len(H.moduli) == G.k and len(ms) == 1:
            return LiftMap.from_subgroup(G, G.scalar_subgroup(ms.pop()))
    if isinstance(G, InfiniteDihedralGroup):
        if isinstance(H, FiniteAbelianGroup) and H.moduli == (2,):
            return LiftMap(G, H, lambda x: (x[1],))
        if isinstance(H, DihedralGroup):
            return LiftMap.from_subgroup(G, G.translation_subgroup(H.m))
    raise UserError(f"no supported projection {G.spec} -> {h_spec}")


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_explore(args) -> int:
    pr, root = graph_and_root(args.group, args.n, args.root)
    g = pr.explore_ball(root, args.radius, cap=args.cap)
    out = Path(args.out)
    names = [f"{args.prefix}.json", f"{args.prefix}.dot", f"{args.prefix}.csv"]
    man = manifest(args, "explore", names)
    write(out / names[0], g.to_json(man))
    write(out / names[1], g.to_dot(man))
    write(out / names[2], g.to_csv(man))
    status = "truncated" if g.truncated else ("complete" if g.fully_explored else "ball")
    print(f"{len(g)} vertices ({status}) -> {out}", file=sys.stderr)
    return EXIT_OK


def cmd_metrics(args) -> int:
    which = [w for w in args.which.split(",") if w] if args.which is not None else []
    pr, root = graph_and_root(args.group, args.n, args.root)
    rep = compute_metrics(pr, root, which, radius=args.radius, cap=args.cap, k_max=args.kmax)
    outputs = []
    if args.out:
        outputs = ["metrics.json"] + (["return_probs.csv"] if rep.return_probs else [])
    man = manifest(args, "metrics", outputs)
    text = rep.to_json(man)
    if args.out:
        out = Path(args.out)
        write(out / "metrics.json", text)
        if rep.return_probs:
            buf = io.StringIO()
            buf.write("# manifest: " + json.dumps(man, sort_keys=True) + "\r\n")
            w = csv.writer(buf, lineterminator="\r\n")
            w.writerow(["k", "numerator", "denominator", "float"])
            w.writerows(return_probability_rows({k: Fraction(p) for k, p in rep.return_probs}))
            write(out / "return_probs.csv", buf.getvalue())
    else:
        sys.stdout.write(text)
    if which and len(rep.errors) >= len(set(which)):
        return EXIT_USER
    return EXIT_OK


def cmd_verify(args) -> int:
    check = args.check
    details: dict
    if check == "quadrant-tree":
        rep = quadrant_tree_sweep(args.N) if args.sweep else quadrant_tree_check(args.N)
        passed = rep.passed
        details = {"vertices": {str(k): v for k, v in rep.vertices.items()},
                   "edges": {str(k): v for k, v in rep.edges.items()},
                   "exceptional": rep.exceptional, "failures": rep.failures[:50]}
    elif check in ("lipschitz", "fibers", "center-cheeger"):
        pr, S = graph_and_root(args.group, args.n, args.root)
        G = pr.group
        if check == "lipschitz":
            rep = verify_conjugation_lipschitz(G, S, args.radius, cap=args.cap)
            passed = rep.passed
            details = {"max_distance": rep.max_distance, "bound": rep.bound,
                       "pairs_checked": rep.pairs_checked, "witness_paths_ok": rep.witness_paths_ok,
                       "composition_ok": rep.composition_ok, "worst_pair": rep.worst_pair}
        elif check == "fibers":
            if not isinstance(G, FiniteGroup):
                raise UserError("fibers needs a finite group")
            rep = conjugation_fibers(G, S)
            passed = rep.passed
            details = {"fibers": [[G.format(g) for g in f] for f in rep.fibers],
                       "center_order": rep.center_order,
                       "fibers_are_center_cosets": rep.fibers_are_center_cosets,
                       "orbits_partition_all": rep.orbits_partition_all, "orbit_count": rep.orbit_count,
                       "component_is_union_of_orbits": rep.component_is_union_of_orbits}
        else:
            if not isinstance(G, FiniteGroup):
                raise UserError("center-cheeger needs a finite group")
            rep = verify_center_quotient_cheeger(G, S)
            passed = rep.passed
            details = {"h_G": rep.h_G, "h_Q": rep.h_Q, "h_G_half": rep.h_G_half, "h_Q_half": rep.h_Q_half,
                       "quotient_order": rep.quotient_order, "degenerate": rep.degenerate,
                       "holds_all": rep.holds_all, "holds_half": rep.holds_half}
    elif check in ("local-iso", "domination"):
        pr, S = graph_and_root(args.G, args.n, args.root)
        L = resolve_lift(pr.group, args.H)
        if check == "domination":
            rep = verify_return_domination(L, S, args.kmax, cap=args.cap)
            passed = rep.passed
            details = {"rows": [[k, pg, ph, pg <= ph] for k, pg, ph in rep.rows], "strict_ks": rep.strict_ks}
        else:
            rng = np.random.default_rng(args.seed)
            T, bad, checked = S, 0, 0
            for _ in range(args.trials):
                checked += 1
                if not verify_local_isomorphism(L, T):
                    bad += 1
                T = pr.apply_move(T, pr.moves[int(rng.integers(0, pr.degree))])
            passed = bad == 0
            details = {"vertices_checked": checked, "failures": bad}
    elif check == "reduce":
        G = parse_group_spec(args.G)
        L = resolve_lift(G, args.H)
        pr = ProductReplacementGraph(G, args.n)
        rng = np.random.default_rng(args.seed)
        tuples = [pr.parse_vertex(args.root)] if args.root else [
            random_generating_tuple(G, args.n, rng) for _ in range(args.trials)]
        rows, passed = [], True
        for T in tuples:
            res = reduce_redundant_tuple(L, T, cap=args.cap)
            ok = res.replay(pr, T) == res.reduced
            passed &= ok
            rows.append({"start": pr.format_vertex(T), "reduced": pr.format_vertex(res.reduced),
                         "path": [str(m) for m in res.path], "replay_ok": ok})
        details = {"results": rows}
    elif check == "embed":
        G = parse_group_spec(args.G)
        T = tuple(G.parse(x) for x in args.root.split(";")) if args.root else (G.parse("0,1"),)
        if not isinstance(G, InfiniteDihedralGroup):
            raise UserError("embed is wired for G=Dinf with K = translations")
        step = args.step

        def inclusion(h):
            return (step * h[0], 0)

        _, rep = embed_gamma2(G, T, FreeAbelianGroup(1), inclusion, radius=args.radius, cap=args.cap)
        passed = rep.passed
        details = vars(rep)
    else:
        raise UserError(f"unknown check {check!r}")
    out = {"manifest": manifest(args, "verify"), "check": check, "passed": bool(passed), "details": details}
    text = dump_json(out)
    if args.out:
        write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_sample(args) -> int:
    pr, root = graph_and_root(args.group, args.n, args.root)
    cfg = WalkConfig(pr.group, args.n, root, args.steps, args.seed, args.emit, args.emit_index)
    hist = sample_elements(cfg, args.trials, workers=args.workers)
    man = manifest(args, "sample", ["histogram.csv", "mixing.json"] if args.out else [])
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(man, sort_keys=True) + "\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["element", "count"])
    fmt = pr.format_vertex if args.emit == "tuple" else pr.group.format
    key = (lambda T: pr.vertex_key(T)) if args.emit == "tuple" else (lambda x: pr.group.encode(x).hex())
    for x in sorted(hist, key=key):
        w.writerow([fmt(x), hist[x]])
    if args.out:
        out = Path(args.out)
        write(out / "histogram.csv", buf.getvalue())
        if pr.group.is_finite and args.trials > 0:
            rep = mixing_report(cfg, args.trials, workers=args.workers)
            write(out / "mixing.json", dump_json({"manifest": man, **rep}))
    else:
        sys.stdout.write(buf.getvalue())
    return EXIT_OK


def cmd_export(args) -> int:
    data = json.loads(Path(args.graph).read_text(encoding="utf-8"))
    pr = ProductReplacementGraph(parse_group_spec(data["group"]), data["n"])
    g = ExploredGraph.from_dict(data, pr)
    man = manifest(args, "export", [args.out] if args.out else [])
    text = {"json": g.to_json, "dot": g.to_dot, "csv": g.to_csv}[args.format](man)
    if args.out:
        write(Path(args.out), text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prgraph", description="Product replacement graph explorer.")
    p.add_argument("--version", action="version", version=f"prgraph {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, group=True):
        if group:
            sp.add_argument("--group", default="Z", help="group spec, e.g. Z^2, Zmod:3, Dinf, D:4, Sym:3")
        sp.add_argument("--n", type=int, default=2)
        sp.add_argument("--root", default=None,
                        help="tuple: elements separated by ';', coordinates by ',' (e.g. '1,0;0,1')")
        sp.add_argument("--cap", type=int, default=200_000)
        sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("explore", help="BFS ball around a root; writes JSON, DOT and CSV")
    common(sp)
    sp.add_argument("--radius", type=int, default=3)
    sp.add_argument("--out", default=".")
    sp.add_argument("--prefix", default="graph")
    sp.set_defaults(func=cmd_explore)

    sp = sub.add_parser("metrics", help="Cheeger constant, spectral gap, return probabilities")
    common(sp)
    sp.add_argument("--radius", type=int, default=64)
    sp.add_argument("--kmax", type=int, default=12)
    sp.add_argument("--which", default="cheeger,gap,return,rho",
                    help="comma-separated subset of cheeger,gap,return,rho ('' for none)")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_metrics)

    sp = sub.add_parser("verify", help="run a named construction check")
    sp.add_argument("check", choices=CHECKS)
    common(sp)
    sp.add_argument("--G", default="Z", help="source group for lift/reduce/embed checks")
    sp.add_argument("--H", default="Zmod:5", help="target: group spec, 'center' or 'same'")
    sp.add_argument("--radius", type=int, default=3)
    sp.add_argument("--kmax", type=int, default=10)
    sp.add_argument("--N", type=int, default=100)
    sp.add_argument("--sweep", action="store_true", help="quadrant-tree: check every N up to --N")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--step", type=int, default=1, help="embed: K = step*Z translations")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sample", help="product replacement algorithm sampling")
    common(sp)
    sp.add_argument("--steps", type=int, default=30)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--emit", choices=("tuple", "random", "fixed"), default="random")
    sp.add_argument("--emit-index", type=int, default=1)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("export", help="re-export a JSON graph snapshot")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--format", choices=("json", "dot", "csv"), default="dot")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PRGraphError, ValueError, OSError) as exc:
        print(f"prgraph: error: {exc}", file=sys.stderr)
        return EXIT_USER
    except Exception as exc:  # noqa: BLE001
        print(f"prgraph: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
