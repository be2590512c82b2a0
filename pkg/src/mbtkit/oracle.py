"""Exhaustive MBT solvers used as ground truth at desk scale.

All three solvers enumerate vertex subsets by decreasing size in
lexicographic order and stop at the first subset that supports a spanning
binary tree, so the returned witness has the lexicographically smallest
vertex set among the optima.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

from .graph import Digraph, DirBinaryTree, GraphError, UGraph, UndirBinaryTree

DEFAULT_UNDIR_CAP = 16
DEFAULT_DAG_CAP = 20
DEFAULT_DIR_CAP = 12


class CapExceeded(GraphError):
    def __init__(self, n: int, cap: int):
        self.n, self.cap = n, cap
        super().__init__(f"instance has {n} vertices; brute force is capped at {cap}")


@dataclass(frozen=True)
class OptResult:
    size: int
    tree: DirBinaryTree | UndirBinaryTree

    @property
    def edges(self) -> int:
        return self.size - 1


def _grow_spanning(
    verts: Sequence[int],
    start: int,
    start_cap: int,
    child_cap: int,
    parents_of: Callable[[int], Sequence[int]],
) -> list[tuple[int, int]] | None:
    """Search for a tree on ``verts`` grown from ``start``.

    ``parents_of(v)`` lists the vertices v may hang from; each tree vertex
    accepts a bounded number of children (``start_cap`` for the start vertex,
    ``child_cap`` for the others). Branching: the most constrained frontier
    vertex either hangs from one of its current options or is postponed, in
    which case it may only hang from vertices added later.
    """
    vset = set(verts)
    if start not in vset:
        return None
    if len(vset) == 1:
        return []
    cand = {v: [w for w in parents_of(v) if w in vset] for v in vset}
    rank: dict[int, int] = {start: 0}  # insertion index of tree vertices
    cap: dict[int, int] = {start: start_cap}
    postponed = {v: 0 for v in vset}
    links: list[tuple[int, int]] = []
    rest = set(vset) - {start}

    def options(v: int) -> list[int]:
        lo = postponed[v]
        return [w for w in cand[v] if w in rank and rank[w] >= lo and cap[w] > 0]

    def dead(v: int) -> bool:
        # v can never hang anywhere: no current option and no non-tree parent.
        if options(v):
            return False
        return not any(w in rest for w in cand[v])

    def search() -> bool:
        if not rest:
            return True
        best_v, best_opts = None, None
        for v in sorted(rest):
            opts = options(v)
            if not opts:
                if dead(v):
                    return False
                continue
            if best_opts is None or len(opts) < len(best_opts):
                best_v, best_opts = v, opts
                if len(opts) == 1:
                    break
        if best_v is None:
            return False
        v = best_v
        rest.discard(v)
        rank[v] = len(rank)
        cap[v] = child_cap
        for w in best_opts:
            cap[w] -= 1
            links.append((v, w))
            if search():
                return True
            links.pop()
            cap[w] += 1
        del rank[v]
        del cap[v]
        rest.add(v)
        old = postponed[v]
        postponed[v] = len(rank)
        if not dead(v) and search():
            return True
        postponed[v] = old
        return False

    return list(links) if search() else None


def undirected_spanning_tree(g: UGraph, verts: Sequence[int], degree_bound: int = 3) -> list[tuple[int, int]] | None:
    verts = sorted(verts)
    if not verts:
        return None
    return _grow_spanning(verts, verts[0], degree_bound, degree_bound - 1, lambda v: g.adj[v])


def brute_mbt_undirected(g: UGraph, degree_bound: int = 3, cap: int = DEFAULT_UNDIR_CAP) -> OptResult:
    if g.n > cap:
        raise CapExceeded(g.n, cap)
    if g.n == 0:
        raise GraphError("empty graph has no binary tree")
    if degree_bound < 1:
        raise GraphError("degree bound must be at least 1")
    comps = g.components()
    comp_of = {v: i for i, c in enumerate(comps) for v in c}
    largest = max(len(c) for c in comps)
    for size in range(largest, 0, -1):
        for subset in itertools.combinations(range(g.n), size):
            if len({comp_of[v] for v in subset}) > 1:
                continue
            links = undirected_spanning_tree(g, subset, degree_bound)
            if links is not None:
                return OptResult(size, UndirBinaryTree(frozenset(subset), frozenset(links)))
    raise AssertionError("unreachable: a single vertex is always a tree")


def brute_mbt_rooted_undirected(g: UGraph, s: int, cap: int = DEFAULT_UNDIR_CAP) -> OptResult:
    """Largest binary tree containing ``s`` in which ``s`` has at most two neighbours."""
    if g.n > cap:
        raise CapExceeded(g.n, cap)
    if not 0 <= s < g.n:
        raise GraphError(f"root {s} outside [0,{g.n})")
    comp = next(c for c in g.components() if s in c)
    others = [v for v in comp if v != s]
    for size in range(len(comp), 0, -1):
        for rest in itertools.combinations(others, size - 1):
            subset = sorted((s,) + rest)
            links = _grow_spanning(subset, s, 2, 2, lambda v: g.adj[v])
            if links is not None:
                return OptResult(size, UndirBinaryTree(frozenset(subset), frozenset(links)))
    raise AssertionError("unreachable: the root alone is a tree")


def _require_dag(g: Digraph) -> None:
    if not g.is_acyclic():
        raise GraphError("graph has a directed cycle")


def dag_subset_feasible(g: Digraph, s: Sequence[int] | set[int], r: int) -> tuple[bool, DirBinaryTree | None]:
    """Does an r-rooted binary tree span exactly ``s``?

    Each non-root vertex picks one out-neighbour inside ``s`` and each target
    takes at most two children: a bipartite b-matching solved by augmenting
    paths. On a DAG every complete assignment is an r-rooted tree.
    """
    s = set(s)
    if r not in s:
        raise GraphError(f"root {r} not in the subset")
    _require_dag(g)
    load: dict[int, list[int]] = {w: [] for w in s}
    parent: dict[int, int] = {}

    def augment(v: int, seen: set[int]) -> bool:
        for w in g.out_adj[v]:
            if w not in s or w in seen:
                continue
            seen.add(w)
            if len(load[w]) < 2:
                load[w].append(v)
                parent[v] = w
                return True
            for other in list(load[w]):
                if augment(other, seen):
                    load[w].remove(other)
                    load[w].append(v)
                    parent[v] = w
                    return True
        return False

    for v in sorted(s - {r}):
        if not augment(v, set()):
            return False, None
    return True, DirBinaryTree(r, frozenset(parent.items()))


def brute_mbt_dag(g: Digraph, r: int, cap: int = DEFAULT_DAG_CAP) -> OptResult:
    if g.n > cap:
        raise CapExceeded(g.n, cap)
    _require_dag(g)
    pool = sorted(g.reaching(r) - {r})
    for extra in range(len(pool), -1, -1):
        for chosen in itertools.combinations(pool, extra):
            subset = set(chosen) | {r}
            ok, tree = dag_subset_feasible(g, subset, r)
            if ok:
                return OptResult(len(subset), tree)
    raise AssertionError("unreachable: the root alone is a tree")


def directed_spanning_tree(g: Digraph, verts: Sequence[int], r: int) -> list[tuple[int, int]] | None:
    return _grow_spanning(sorted(verts), r, 2, 2, lambda v: g.out_adj[v])


def brute_mbt_directed(g: Digraph, r: int, cap: int = DEFAULT_DIR_CAP) -> OptResult:
    if g.n > cap:
        raise CapExceeded(g.n, cap)
    if not 0 <= r < g.n:
        raise GraphError(f"root {r} outside [0,{g.n})")
    pool = sorted(g.reaching(r) - {r})
    for extra in range(len(pool), -1, -1):
        for chosen in itertools.combinations(pool, extra):
            subset = sorted(set(chosen) | {r})
            links = directed_spanning_tree(g, subset, r)
            if links is not None:
                return OptResult(len(subset), DirBinaryTree(r, frozenset(links)))
    raise AssertionError("unreachable: the root alone is a tree")


def brute_mbt_directed_any_root(g: Digraph, cap: int | None = None) -> OptResult:
    """Unrooted directed optimum: best over all roots, smallest root on ties."""
    if g.n == 0:
        raise GraphError("empty graph has no binary tree")
    acyclic = g.is_acyclic()
    if cap is None:
        cap = DEFAULT_DAG_CAP if acyclic else DEFAULT_DIR_CAP
    best = None
    for r in range(g.n):
        res = brute_mbt_dag(g, r, cap) if acyclic else brute_mbt_directed(g, r, cap)
        if best is None or res.size > best.size:
            best = res
    return best
