"""``mbt`` command line.

Structured results are JSON on stdout (or ``--out``); progress and timing go
to stderr. Exit codes: 0 ok, 2 usage or unreadable input, 3 refused or
infeasible, 4 a witness or certificate failed validation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import random
import sys
import time
from pathlib import Path

from . import __version__
from .graph import (
    Digraph,
    DirBinaryTree,
    GraphError,
    ParseError,
    UGraph,
    UndirBinaryTree,
    gen_random,
    read_graph,
    tree_from_json,
    validate_dir_tree,
    validate_undir_tree,
    write_graph,
)

EXIT_OK, EXIT_USAGE, EXIT_REFUSED, EXIT_INVALID = 0, 2, 3, 4
DEFAULT_SEED = 0

log = logging.getLogger("mbtkit.cli")


class Refused(Exception):
    pass


class Invalid(Exception):
    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload


class Usage(Exception):
    pass


# ---------------------------------------------------------------------------
# I/O helpers


_consumed: list[bytes] = []  # every input read, for the report digest


def _read_text(path: str | None) -> str:
    if path is None or path == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise Usage(f"cannot read {path}: {e.strerror}") from None
    _consumed.append(text.encode())
    return text


def _load_graph(path: str | None) -> Digraph | UGraph:
    text = _read_text(path)
    first = next((ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("c ")), "")
    if first.startswith("p tw"):
        from .treewidth import read_gr

        return read_gr(text)
    return read_graph(text)


def _load_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise Usage(f"{path} is not JSON: {e}") from None


def _need_undirected(g, what: str) -> UGraph:
    if not isinstance(g, UGraph):
        raise Usage(f"{what} needs an undirected graph")
    return g


def _need_directed(g, what: str) -> Digraph:
    if not isinstance(g, Digraph):
        raise Usage(f"{what} needs a directed graph")
    return g


def _symmetric(g: UGraph) -> Digraph:
    return Digraph(g.n, tuple(a for u, v in g.edges for a in ((u, v), (v, u))))


def _tree_payload(t, root=None) -> dict:
    data = t.to_json() if isinstance(t, DirBinaryTree) else t.to_json(root)
    data["size"] = t.size
    return data


def _check_witness(g, t, root=None) -> None:
    if isinstance(g, Digraph):
        rep = validate_dir_tree(g, t)
        if rep and root is not None and t.root != root:
            raise Invalid(f"witness rooted at {t.root}, expected {root}")
    else:
        rep = validate_undir_tree(g, t, root)
    if not rep:
        raise Invalid(f"witness failed validation: {rep.reason}")


def _undir_from_dir(t: DirBinaryTree) -> UndirBinaryTree:
    return UndirBinaryTree(frozenset({t.root}), t.arcs)


# ---------------------------------------------------------------------------
# subcommands; each returns a JSON-able result or a str for raw text output


def cmd_gen(a) -> str:
    seed = a.seed
    if a.kind in ("undir", "dir", "dag"):
        g = gen_random(a.kind, a.n, a.m, seed)
        if a.format == "gr":
            from .treewidth import write_gr

            return write_gr(_need_undirected(g, "--format gr"))
        return write_graph(g)
    if a.kind == "biperm":
        from .biperm import gen_biperm, random_intervals

        g, _ = gen_biperm(random_intervals(a.n, a.m or a.n, seed))
        return write_graph(g)
    if a.kind == "perm":
        rng = random.Random(seed)
        vals = list(range(1, a.n + 1))
        rng.shuffle(vals)
        return " ".join(map(str, vals)) + "\n"
    if a.kind == "tsp12":
        from .undirected_reductions import Tsp12Instance, write_tsp12

        rng = random.Random(seed)
        order = list(range(a.n))
        rng.shuffle(order)
        light = {tuple(sorted((order[i], order[(i + 1) % a.n]))) for i in range(a.n)} if a.n > 1 else set()
        pairs = [(u, v) for u in range(a.n) for v in range(u + 1, a.n) if (u, v) not in light]
        light |= set(rng.sample(pairs, min(a.m, len(pairs))))
        heavy = frozenset((u, v) for u in range(a.n) for v in range(u + 1, a.n) if (u, v) not in light)
        return write_tsp12(Tsp12Instance(a.n, heavy))
    raise Usage(f"unknown kind {a.kind}")


def _fpt_solve(g: Digraph, a) -> dict:
    from .fpt.detect import decide_k_binary_tree, search_k_binary_tree

    if a.k is not None:
        tree = search_k_binary_tree(g, a.k, a.delta, a.seed, a.field_bits)
        if tree is None:
            return {"k": a.k, "answer": False}
        _check_witness(g, tree)
        return {"k": a.k, "answer": True, "tree": _tree_payload(tree)}
    lo, hi = 1, g.n
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if decide_k_binary_tree(g, mid, a.delta, a.seed, a.field_bits):
            lo = mid
        else:
            hi = mid - 1
    tree = search_k_binary_tree(g, lo, a.delta, a.seed, a.field_bits) or DirBinaryTree(0)
    _check_witness(g, tree)
    return {"k": lo, "answer": True, "tree": _tree_payload(tree)}


def cmd_solve(a) -> dict:
    g = _load_graph(a.inp)
    algo = a.algo
    if algo == "brute":
        from . import oracle

        if isinstance(g, UGraph):
            cap = a.cap or oracle.DEFAULT_UNDIR_CAP
            res = oracle.brute_mbt_undirected(g, cap=cap) if a.root is None else oracle.brute_mbt_rooted_undirected(g, a.root, cap)
        elif a.root is None:
            res = oracle.brute_mbt_directed_any_root(g, a.cap)
        elif g.is_acyclic():
            res = oracle.brute_mbt_dag(g, a.root, a.cap or oracle.DEFAULT_DAG_CAP)
        else:
            res = oracle.brute_mbt_directed(g, a.root, a.cap or oracle.DEFAULT_DIR_CAP)
        _check_witness(g, res.tree, a.root)
        return {"algo": algo, **_tree_payload(res.tree, a.root)}
    if algo == "fpt":
        if a.root is not None:
            raise Usage("--algo fpt searches over all roots; drop --root")
        if isinstance(g, UGraph):
            # an undirected binary tree hangs from any of its leaves
            out = _fpt_solve(_symmetric(g), a)
            if out.get("tree"):
                t = tree_from_json(out["tree"], directed=True)
                ut = _undir_from_dir(t)
                _check_witness(g, ut)
                out["tree"] = _tree_payload(ut)
            return {"algo": algo, **out}
        return {"algo": algo, **_fpt_solve(g, a)}
    if algo == "biperm":
        from .biperm import solve_biperm

        g = _need_undirected(g, "biperm")
        try:
            res = solve_biperm(g)
        except GraphError as e:
            raise Refused(str(e)) from None
        _check_witness(g, res.tree)
        out = {"algo": algo, **_tree_payload(res.tree)}
        out["ordering"] = res.ordering.to_json() if res.ordering else None
        return out
    if algo == "treewidth":
        from .treewidth import heuristic_td, read_td, solve_rooted_tw, solve_unrooted_tw, validate_td

        g = _need_undirected(g, "treewidth")
        td = read_td(_read_text(a.td)) if a.td else heuristic_td(g)
        rep = validate_td(g, td)
        if not rep:
            raise Invalid(f"decomposition rejected: {rep.reason}")
        res = solve_rooted_tw(g, a.root, td) if a.root is not None else solve_unrooted_tw(g, td)
        _check_witness(g, res.tree, a.root)
        return {"algo": algo, "width": td.width, **_tree_payload(res.tree, a.root)}
    raise Usage(f"unknown algo {algo}")


def cmd_verify_tree(a) -> dict:
    g = _load_graph(a.inp)
    t = tree_from_json(_load_json(a.tree), directed=isinstance(g, Digraph))
    if isinstance(g, Digraph):
        rep = validate_dir_tree(g, t)
        if rep and a.root is not None and t.root != a.root:
            rep = type(rep)(False, f"rooted at {t.root}, expected {a.root}")
    else:
        rep = validate_undir_tree(g, t, a.root)
    out = {"valid": rep.ok, "reason": rep.reason, "size": t.size}
    if not rep:
        raise Invalid(rep.reason, out)
    return out


def _dir_root(g: Digraph, root) -> int:
    if root is None:
        raise Usage("directed graphs need --root")
    return root


def cmd_square(a) -> str:
    g = _load_graph(a.inp)
    if isinstance(g, Digraph):
        from .dag_reductions import dir_square

        sq = dir_square(g, _dir_root(g, a.root))
        log.info("squared: %d vertices, root %d", sq.squared.n, sq.root)
        return write_graph(sq.squared)
    from .undirected_reductions import undir_square

    sq = undir_square(g)
    log.info("squared: %d vertices", sq.squared.n)
    return write_graph(sq.squared)


def cmd_extract(a) -> dict:
    g = _load_graph(a.inp)
    if isinstance(g, Digraph):
        from .dag_reductions import dir_extract, dir_square

        sq = dir_square(g, _dir_root(g, a.root))
        t2 = tree_from_json(_load_json(a.tree), directed=True)
        _check_witness(sq.squared, t2)
        res = dir_extract(sq, t2)
        _check_witness(g, res.tree)
        return {"source": res.source, **_tree_payload(res.tree)}
    from .undirected_reductions import undir_extract, undir_square

    sq = undir_square(g)
    t2 = tree_from_json(_load_json(a.tree), directed=False)
    _check_witness(sq.squared, t2)
    res = undir_extract(sq, t2)
    _check_witness(g, res.tree)
    return {"source": res.source, **_tree_payload(res.tree)}


def _brute_dir(cap):
    from .oracle import DEFAULT_DAG_CAP, brute_mbt_dag, brute_mbt_directed

    def solve(h: Digraph, r: int) -> DirBinaryTree:
        if h.is_acyclic():
            return brute_mbt_dag(h, r, cap or DEFAULT_DAG_CAP).tree
        return brute_mbt_directed(h, r, cap or 12).tree

    return solve


def _undir_solver(algo: str, cap):
    if algo == "treewidth":
        from .treewidth import solve_unrooted_tw

        return lambda h: solve_unrooted_tw(h).tree
    from .oracle import DEFAULT_UNDIR_CAP, brute_mbt_undirected

    return lambda h: brute_mbt_undirected(h, cap=cap or DEFAULT_UNDIR_CAP).tree


def cmd_boost(a) -> dict:
    g = _load_graph(a.inp)
    if isinstance(g, Digraph):
        from .dag_reductions import dir_boost_solve, dir_boost_tree, dir_square

        r = _dir_root(g, a.root)
        if a.tree:
            sq = dir_square(g, r)
            t1 = tree_from_json(_load_json(a.tree), directed=True)
            _check_witness(g, t1, r)
            t2 = dir_boost_tree(sq, t1)
            _check_witness(sq.squared, t2)
            return _tree_payload(t2)
        res = dir_boost_solve(g, r, _brute_dir(a.cap), a.eps, a.alpha)
        _check_witness(g, res.tree)
        return {"rounds": res.k_formula, "rounds_used": res.k_used, "sizes": list(res.sizes), **_tree_payload(res.tree)}
    from .undirected_reductions import undir_boost_solve, undir_boost_tree, undir_square

    if a.tree:
        sq = undir_square(g)
        t1 = tree_from_json(_load_json(a.tree), directed=False)
        _check_witness(g, t1)
        b = undir_boost_tree(sq, t1)
        _check_witness(sq.squared, b.tree)
        return {"degraded": b.degraded, **_tree_payload(b.tree)}
    res = undir_boost_solve(g, _undir_solver(a.algo, a.cap), a.eps, a.alpha)
    _check_witness(g, res.tree)
    return {"rounds": res.k_formula, "rounds_used": res.k_used, "sizes": list(res.sizes), **_tree_payload(res.tree)}


def _load_coloring(path: str) -> dict[int, str]:
    data = _load_json(path)
    if isinstance(data, list):
        return {i: c for i, c in enumerate(data)}
    return {int(k): v for k, v in data.items()}


def cmd_gadget(a) -> str | dict:
    from .dag_reductions import build_color_gadget, coloring_to_tree

    g = _need_undirected(_load_graph(a.inp), "gadget-3col")
    gad = build_color_gadget(g, a.eps)
    log.info("gadget: t=%d, %d vertices, root %d", gad.t, gad.dag.n, gad.root)
    if a.coloring:
        t = coloring_to_tree(gad, _load_coloring(a.coloring))
        _check_witness(gad.dag, t, gad.root)
        return {"t": gad.t, "N": gad.dag.n, **_tree_payload(t)}
    return write_graph(gad.dag)


def cmd_color_extract(a) -> dict:
    from .dag_reductions import build_color_gadget, tree_to_coloring

    g = _need_undirected(_load_graph(a.inp), "color-extract")
    gad = build_color_gadget(g, a.eps)
    t = tree_from_json(_load_json(a.tree), directed=True)
    _check_witness(gad.dag, t, gad.root)
    res = tree_to_coloring(gad, t)
    return {
        "coloring": {str(v): c for v, c in sorted(res.coloring.items())},
        "violated": res.violated,
        "fallback": list(res.fallback),
    }


def cmd_tsp(a) -> dict:
    from .undirected_reductions import read_tsp12, tsp12_tour

    inst = read_tsp12(_read_text(a.inp))
    solve = _undir_solver(a.algo, a.cap or 20)
    res = tsp12_tour(inst, lambda h, eps: solve(h), a.eps)
    return {"tour": res.tour, "weight": res.weight, "tree_size": res.tree_size, "path_size": res.path_size}


def cmd_lp_emit(a) -> str:
    from .lp import LP_CAP, emit_lp

    g = _need_directed(_load_graph(a.inp), "lp-emit")
    return emit_lp(g, _dir_root(g, a.root), integer=not a.relax, cap=a.cap or LP_CAP)


def cmd_lp_verify(a) -> dict:
    from .lp import read_solution, verify_fractional

    g = _need_directed(_load_graph(a.inp), "lp-verify")
    rep = verify_fractional(g, _dir_root(g, a.root), read_solution(_read_text(a.sol)))
    if not rep:
        raise Invalid(rep.violations[0].describe(), rep.to_json())
    return rep.to_json()


def cmd_heapable(a) -> dict:
    from .heapable import is_heapable, longest_heapable, parse_sequence

    seq = parse_sequence(_read_text(a.inp))
    res = longest_heapable(seq, a.algo if a.algo in ("brute", "fpt") else "brute", a.cap, a.seed, a.delta)
    trace = is_heapable(seq)
    return {**res.to_json(), "heapable": trace.ok, "n": len(seq)}


def cmd_td_check(a) -> dict | str:
    from .treewidth import heuristic_td, read_td, validate_td, write_td

    g = _need_undirected(_load_graph(a.inp), "td-check")
    if a.td:
        td = read_td(_read_text(a.td))
        rep = validate_td(g, td)
        out = {"valid": rep.ok, "reason": rep.reason, "width": td.width, "bags": len(td.bags)}
        if not rep:
            raise Invalid(rep.reason, out)
        return out
    return write_td(heuristic_td(g), g.n)


# ---------------------------------------------------------------------------


COMMANDS = {
    "gen": cmd_gen,
    "solve": cmd_solve,
    "verify-tree": cmd_verify_tree,
    "square": cmd_square,
    "extract": cmd_extract,
    "boost": cmd_boost,
    "gadget-3col": cmd_gadget,
    "color-extract": cmd_color_extract,
    "tsp12-tour": cmd_tsp,
    "lp-emit": cmd_lp_emit,
    "lp-verify": cmd_lp_verify,
    "heapable": cmd_heapable,
    "td-check": cmd_td_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="inp", default=None, help="input file (default stdin)")
    common.add_argument("--out", default=None, help="write the result here instead of stdout")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--root", type=int, default=None)
    common.add_argument("--cap", type=int, default=None, help="override a brute-force or emission cap")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="mbt", description="maximum binary tree workbench")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", parents=[common], help="random instance")
    s.add_argument("--kind", choices=["undir", "dir", "dag", "biperm", "perm", "tsp12"], default="undir")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--format", choices=["mbt", "gr"], default="mbt")

    s = sub.add_parser("solve", parents=[common], help="maximum binary tree")
    s.add_argument("--algo", choices=["brute", "fpt", "biperm", "treewidth"], default="brute")
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--delta", type=float, default=1e-3)
    s.add_argument("--field-bits", type=int, default=64, choices=[8, 16, 32, 64])
    s.add_argument("--td", default=None, help="PACE .td decomposition")

    s = sub.add_parser("verify-tree", parents=[common], help="check a tree certificate")
    s.add_argument("--tree", required=True)

    sub.add_parser("square", parents=[common], help="squared instance")

    s = sub.add_parser("extract", parents=[common], help="tree of G from a tree of its square")
    s.add_argument("--tree", required=True)

    s = sub.add_parser("boost", parents=[common], help="boost a tree, or run the boosting loop")
    s.add_argument("--tree", default=None)
    s.add_argument("--eps", type=float, default=0.5)
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--algo", choices=["brute", "treewidth"], default="brute")

    s = sub.add_parser("gadget-3col", parents=[common], help="coloring gadget DAG")
    s.add_argument("--eps", type=float, default=1.0)
    s.add_argument("--coloring", default=None, help="JSON coloring to turn into a tree")

    s = sub.add_parser("color-extract", parents=[common], help="coloring from a gadget tree")
    s.add_argument("--eps", type=float, default=1.0)
    s.add_argument("--tree", required=True)

    s = sub.add_parser("tsp12-tour", parents=[common], help="TSP(1,2) tour via binary trees")
    s.add_argument("--eps", type=float, default=0.5)
    s.add_argument("--algo", choices=["brute", "treewidth"], default="brute")

    s = sub.add_parser("lp-emit", parents=[common], help="cut-constraint model in LP format")
    s.add_argument("--relax", action="store_true", help="omit the integrality section")

    s = sub.add_parser("lp-verify", parents=[common], help="exact check of a fractional point")
    s.add_argument("--sol", required=True)

    s = sub.add_parser("heapable", parents=[common], help="longest heapable subsequence")
    s.add_argument("--algo", choices=["brute", "fpt"], default="brute")
    s.add_argument("--delta", type=float, default=1e-3)

    s = sub.add_parser("td-check", parents=[common], help="validate or build a tree decomposition")
    s.add_argument("--td", default=None)
    return p


def _digest() -> str:
    h = hashlib.sha256()
    for blob in _consumed:
        h.update(hashlib.sha256(blob).digest())
    return h.hexdigest()[:16]


def _emit(a, payload) -> None:
    if isinstance(payload, str):
        text = payload
    else:
        report = {"command": a.command, "seed": a.seed, "inputs": _digest(), "result": payload}
        text = json.dumps(report, sort_keys=True) + "\n"
    if a.out:
        Path(a.out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    _consumed.clear()
    from .biperm import NoStrongOrdering
    from .fpt.detect import SearchFailed
    from .lp import LPRefused
    from .oracle import CapExceeded

    t0 = time.perf_counter()
    try:
        payload = COMMANDS[a.command](a)
    except Usage as e:
        print(f"mbt: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as e:
        print(f"mbt: bad input: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (CapExceeded, LPRefused, NoStrongOrdering, SearchFailed, Refused) as e:
        print(f"mbt: refused: {e}", file=sys.stderr)
        return EXIT_REFUSED
    except Invalid as e:
        print(f"mbt: validation failed: {e}", file=sys.stderr)
        if e.payload is not None:
            _emit(a, e.payload)
        return EXIT_INVALID
    except AssertionError as e:
        print(f"mbt: internal check failed: {e}", file=sys.stderr)
        return EXIT_INVALID
    except GraphError as e:
        print(f"mbt: {e}", file=sys.stderr)
        return EXIT_USAGE
    _emit(a, payload)
    log.info("%s finished in %.3f s", a.command, time.perf_counter() - t0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
