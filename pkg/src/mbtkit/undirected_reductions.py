"""Undirected box-squaring with booster/projection/extraction, and TSP(1,2).

Squared graph layout: original vertices keep ids 0..n-1. Copy c of G
(edge copies first, in edge order, then the two pendant copies of each
vertex) occupies ids n + c*n .. n + c*n + n - 1.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable

from .dag_reductions import MAX_BOOST_VERTICES, boost_rounds
from .graph import GraphError, UGraph, UndirBinaryTree, degree_census, validate_undir_tree

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class UndirSquareMap:
    base: UGraph
    squared: UGraph

    @property
    def num_copies(self) -> int:
        return self.base.m + 2 * self.base.n

    def edge_copy(self, e: int) -> int:
        return e

    def pendant_copy(self, v: int, which: int) -> int:
        """``which`` is 1 or 2."""
        return self.base.m + 2 * v + (which - 1)

    def flat(self, copy: int, inner: int) -> int:
        n = self.base.n
        return n + copy * n + inner

    def split(self, vid: int) -> tuple[int | None, int]:
        """(copy, inner id), with copy None for original vertices."""
        n = self.base.n
        if vid < n:
            return None, vid
        return divmod(vid - n, n)

    def edge_index(self, u: int, v: int) -> int:
        return self._edge_pos[(min(u, v), max(u, v))]

    @property
    def _edge_pos(self) -> dict[tuple[int, int], int]:
        cached = self.__dict__.get("_ep")
        if cached is None:
            cached = {e: i for i, e in enumerate(self.base.edges)}
            object.__setattr__(self, "_ep", cached)
        return cached


def undir_square_size(n: int, m: int) -> tuple[int, int]:
    """(vertices, edges) of the squared graph."""
    copies = m + 2 * n
    return n + copies * n, copies * m + 2 * n * m + 2 * n * n


def undir_square(g: UGraph) -> UndirSquareMap:
    n, m = g.n, g.m
    sq = UndirSquareMap(g, UGraph(0, ()))
    edges = []
    for c in range(m + 2 * n):
        base = sq.flat(c, 0)
        edges.extend((base + a, base + b) for a, b in g.edges)
    for e, (u, v) in enumerate(g.edges):
        for w in range(n):
            edges.append((u, sq.flat(e, w)))
            edges.append((v, sq.flat(e, w)))
    for v in range(n):
        for which in (1, 2):
            c = sq.pendant_copy(v, which)
            edges.extend((v, sq.flat(c, w)) for w in range(n))
    return UndirSquareMap(g, UGraph(n + (m + 2 * n) * n, tuple(edges)))


@dataclass(frozen=True)
class UndirBoost:
    tree: UndirBinaryTree
    degraded: bool


def undir_boost_tree(sq: UndirSquareMap, t1: UndirBinaryTree) -> UndirBoost:
    """Plant t1 in the copies; size 2s^2 + 2s for s >= 2, 2s + 1 for s = 1."""
    rep = validate_undir_tree(sq.base, t1)
    if not rep:
        raise GraphError(f"input tree invalid: {rep.reason}")
    deg = t1.degrees()
    s = t1.size
    if s == 1:
        (v,) = t1.vertices
        verts = {v, sq.flat(sq.pendant_copy(v, 1), v), sq.flat(sq.pendant_copy(v, 2), v)}
        edges = [(v, x) for x in verts if x != v]
        log.warning("single-vertex input: degraded boost of size 3")
        return UndirBoost(UndirBinaryTree(frozenset(verts), frozenset(edges)), True)
    leaf = min(v for v, d in deg.items() if d == 1)
    edges = []

    def plant(copy: int) -> int:
        edges.extend((sq.flat(copy, a), sq.flat(copy, b)) for a, b in t1.edges)
        return sq.flat(copy, leaf)

    for u, v in sorted(t1.edges):
        hook = plant(sq.edge_index(u, v))
        edges.append((u, hook))
        edges.append((v, hook))
    for v in sorted(t1.vertices):
        count = {1: 2, 2: 1}.get(deg[v], 0)
        for which in range(1, count + 1):
            edges.append((v, plant(sq.pendant_copy(v, which))))
    return UndirBoost(UndirBinaryTree(frozenset(), frozenset(edges)), False)


def _copy_components(sq: UndirSquareMap, t2: UndirBinaryTree) -> dict[int, int]:
    """Component label for every copy vertex of t2, via union-find on copy-internal edges."""
    parent = {v: v for v in t2.vertices if v >= sq.base.n}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in t2.edges:
        if a in parent and b in parent:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    return {v: find(v) for v in parent}


def undir_project(sq: UndirSquareMap, t2: UndirBinaryTree) -> UndirBinaryTree | None:
    """Tree on V(t2) ∩ V(G); None when t2 has no original vertex."""
    n = sq.base.n
    rep = validate_undir_tree(sq.squared, t2)
    if not rep:
        raise GraphError(f"tree invalid: {rep.reason}")
    originals = {v for v in t2.vertices if v < n}
    if not originals:
        return None
    comp = _copy_components(sq, t2)
    touch: dict[int, set[tuple[int, int]]] = {v: set() for v in originals}  # v -> {(copy, comp)}
    for a, b in t2.edges:
        if a > b:
            a, b = b, a
        if a < n <= b:
            touch[a].add((sq.split(b)[0], comp[b]))
    edges = []
    for e, (u, v) in enumerate(sq.base.edges):
        if u in touch and v in touch:
            if any(c == e for c, _ in touch[u] & touch[v]):
                edges.append((u, v))
    return UndirBinaryTree(frozenset(originals), frozenset(edges))


@dataclass(frozen=True)
class UndirExtraction:
    tree: UndirBinaryTree
    source: str  # "projection" or "copy"
    projection_size: int
    forest_count: int


def undir_extract(sq: UndirSquareMap, t2: UndirBinaryTree) -> UndirExtraction:
    proj = undir_project(sq, t2)
    comp = _copy_components(sq, t2)
    groups: dict[int, list[int]] = {}
    for v, root in comp.items():
        groups.setdefault(root, []).append(v)
    best_copy = None
    for root in sorted(groups):
        members = set(groups[root])
        if best_copy is None or len(members) > len(best_copy):
            best_copy = members
    proj_size = proj.size if proj is not None else 0
    if proj is not None and (best_copy is None or proj_size >= len(best_copy)):
        return UndirExtraction(proj, "projection", proj_size, len(groups))
    inner_edges = [(sq.split(a)[1], sq.split(b)[1]) for a, b in t2.edges if a in best_copy and b in best_copy]
    inner_verts = frozenset(sq.split(v)[1] for v in best_copy)
    return UndirExtraction(UndirBinaryTree(inner_verts, frozenset(inner_edges)), "copy", proj_size, len(groups))


@dataclass(frozen=True)
class UndirBoostResult:
    tree: UndirBinaryTree
    k_formula: int
    k_used: int
    sizes: tuple[int, ...]


def undir_boost_solve(
    g: UGraph,
    solver: Callable[[UGraph], UndirBinaryTree],
    epsilon: float,
    alpha: float = 1.0,
    limit: int = MAX_BOOST_VERTICES,
) -> UndirBoostResult:
    k = boost_rounds(alpha, epsilon)
    sizes = [(g.n, g.m)]
    while len(sizes) - 1 < k:
        nxt = undir_square_size(*sizes[-1])
        if nxt[0] > limit:
            log.warning("size guard: boosting %d of %d rounds", len(sizes) - 1, k)
            break
        sizes.append(nxt)
    used = len(sizes) - 1
    maps = []
    cur = g
    for _ in range(used):
        sq = undir_square(cur)
        maps.append(sq)
        cur = sq.squared
    t = solver(cur)
    for sq in reversed(maps):
        t = undir_extract(sq, t).tree
    return UndirBoostResult(t, k, used, tuple(n for n, _ in sizes))


# ---------------------------------------------------------------------------
# TSP(1,2)


@dataclass(frozen=True)
class PendantGraph:
    graph: UGraph
    base_n: int

    def pendant(self, v: int) -> int:
        return self.base_n + v

    def restrict(self, t: UndirBinaryTree) -> UndirBinaryTree | None:
        """Drop pendants; None if nothing of the base graph remains."""
        n = self.base_n
        verts = frozenset(v for v in t.vertices if v < n)
        if not verts:
            return None
        return UndirBinaryTree(verts, frozenset(e for e in t.edges if e[1] < n))


def pendant_augment(g: UGraph) -> PendantGraph:
    n = g.n
    return PendantGraph(UGraph(2 * n, tuple(g.edges) + tuple((v, n + v) for v in range(n))), n)


@dataclass(frozen=True)
class Tsp12Instance:
    n: int
    heavy: frozenset[tuple[int, int]]  # weight-2 pairs; all others weigh 1

    def __post_init__(self):
        norm = frozenset((min(u, v), max(u, v)) for u, v in self.heavy)
        for u, v in norm:
            if u == v or not 0 <= u < self.n or v >= self.n:
                raise GraphError(f"bad pair ({u},{v})")
        object.__setattr__(self, "heavy", norm)

    def weight(self, u: int, v: int) -> int:
        if u == v:
            raise GraphError("no self pairs")
        return 2 if (min(u, v), max(u, v)) in self.heavy else 1

    def s1(self) -> UGraph:
        return UGraph(self.n, tuple((u, v) for u in range(self.n) for v in range(u + 1, self.n) if (u, v) not in self.heavy))

    def path_weight(self, seq: list[int]) -> int:
        return sum(self.weight(a, b) for a, b in zip(seq, seq[1:]))

    def tour_weight(self, tour: list[int]) -> int:
        if len(tour) < 2:
            return 0
        return self.path_weight(tour) + self.weight(tour[-1], tour[0])


def read_tsp12(text: str) -> Tsp12Instance:
    from .graph import ParseError

    lines = [(i, ln.split("#")[0].strip()) for i, ln in enumerate(text.splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise ParseError("empty input")
    i, head = lines[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "tsp12" or not parts[1].isdigit():
        raise ParseError("expected header 'tsp12 <n>'", i)
    n = int(parts[1])
    heavy = set()
    for i, ln in lines[1:]:
        f = ln.split()
        try:
            u, v, w = (int(x) for x in f)
        except ValueError:
            raise ParseError(f"expected 'u v w', got {ln!r}", i) from None
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise ParseError(f"bad pair ({u},{v})", i)
        if w not in (1, 2):
            raise ParseError(f"weight must be 1 or 2, got {w}", i)
        key = (min(u, v), max(u, v))
        if w == 2:
            heavy.add(key)
        else:
            heavy.discard(key)
    return Tsp12Instance(n, frozenset(heavy))


def write_tsp12(inst: Tsp12Instance) -> str:
    return "".join([f"tsp12 {inst.n}\n"] + [f"{u} {v} 2\n" for u, v in sorted(inst.heavy)])


def tree_to_path(t: UndirBinaryTree) -> list[int]:
    """Vertex order of a path on V(t) costing at most one extra unit per degree-3 vertex.

    Rooted at the smallest vertex of degree <= 2; each subtree becomes the
    path (v, path(child1), path(child2)), and the root's two sides are joined
    through the root.
    """
    adj = t.adjacency()
    deg = {v: len(a) for v, a in adj.items()}
    cands = [v for v in sorted(t.vertices) if deg[v] <= 2]
    assert cands, "binary tree without a vertex of degree <= 2"
    root = cands[0]

    def walk(v: int, parent: int | None) -> list[int]:
        out = []
        stack = [(v, parent)]
        while stack:
            x, p = stack.pop()
            out.append(x)
            kids = sorted(c for c in adj[x] if c != p)
            stack.extend((c, x) for c in reversed(kids))
        return out

    kids = sorted(adj[root])
    if len(kids) < 2:
        return [root] + (walk(kids[0], root) if kids else [])
    return walk(kids[0], root)[::-1] + [root] + walk(kids[1], root)


def tree_weight(inst: Tsp12Instance, t: UndirBinaryTree) -> int:
    return sum(inst.weight(u, v) for u, v in t.edges)


@dataclass(frozen=True)
class TourResult:
    tour: list[int]
    weight: int
    tree_size: int
    path_size: int


def tsp12_tour(
    inst: Tsp12Instance,
    solver: Callable[[UGraph, float], UndirBinaryTree],
    epsilon: float,
) -> TourResult:
    """Tour through the pendant-augmented weight-1 graph; ``solver(g, eps)`` finds a binary tree."""
    aug = pendant_augment(inst.s1())
    big = solver(aug.graph, epsilon / 4)
    rep = validate_undir_tree(aug.graph, big)
    if not rep:
        raise GraphError(f"solver returned an invalid tree: {rep.reason}")
    t = aug.restrict(big)
    path = tree_to_path(t) if t is not None else []
    seen = set(path)
    tour = path + [v for v in range(inst.n) if v not in seen]
    if sorted(tour) != list(range(inst.n)):
        raise AssertionError("tour does not visit every vertex once")
    return TourResult(tour, inst.tour_weight(tour), big.size, len(path))


def census_ok(trees: Iterable[UndirBinaryTree]) -> bool:
    return all(degree_census(t).identity_holds() for t in trees)
