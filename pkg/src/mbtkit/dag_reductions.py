"""Directed squaring with its booster/extractor, and the 3-coloring gadget.

Squared graph layout: vertex copy u of G' occupies flat ids
u*(N+1) .. u*(N+1)+N, where inner id N is the copy's source vertex.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

from .graph import Digraph, DirBinaryTree, GraphError, UGraph, validate_dir_tree

log = logging.getLogger(__name__)

MAX_BOOST_VERTICES = 5_000_000


# ---------------------------------------------------------------------------
# squaring


@dataclass(frozen=True)
class DirSquareMap:
    base: Digraph
    base_root: int
    squared: Digraph
    root: int

    @property
    def stride(self) -> int:
        return self.base.n + 1

    def flat(self, copy: int, inner: int) -> int:
        return copy * self.stride + inner

    def split(self, vid: int) -> tuple[int, int]:
        return divmod(vid, self.stride)

    def source(self, copy: int) -> int:
        return self.flat(copy, self.base.n)

    def copy_root(self, copy: int) -> int:
        return self.flat(copy, self.base_root)

    def is_source(self, vid: int) -> bool:
        return vid % self.stride == self.base.n


def squared_size(n: int) -> int:
    return n * (n + 1)


def dir_square(g: Digraph, r: int) -> DirSquareMap:
    if not 0 <= r < g.n:
        raise GraphError(f"root {r} outside [0,{g.n})")
    n = g.n
    stride = n + 1
    inner = list(g.arcs) + [(n, v) for v in range(n)]  # G' with source n
    arcs = []
    for u in range(n):
        base = u * stride
        arcs.extend((base + a, base + b) for a, b in inner)
    for u, v in g.arcs:
        arcs.append((u * stride + r, v * stride + n))
    sq = Digraph(n * stride, tuple(arcs))
    return DirSquareMap(g, r, sq, r * stride + r)


def _smallest_leaf(t: DirBinaryTree) -> int:
    has_child = {v for _, v in t.arcs}
    return min(v for v in t.vertices if v not in has_child)


def dir_boost_tree(sq: DirSquareMap, t1: DirBinaryTree) -> DirBinaryTree:
    """Tree of size |t1|(|t1|+1) in the squared graph."""
    rep = validate_dir_tree(sq.base, t1)
    if not rep:
        raise GraphError(f"input tree invalid: {rep.reason}")
    if t1.root != sq.base_root:
        raise GraphError(f"input tree must be rooted at {sq.base_root}")
    leaf = _smallest_leaf(t1)
    arcs = []
    for v in sorted(t1.vertices):
        arcs.extend((sq.flat(v, a), sq.flat(v, b)) for a, b in t1.arcs)
        arcs.append((sq.source(v), sq.flat(v, leaf)))
    for u, v in t1.arcs:
        arcs.append((sq.copy_root(u), sq.source(v)))
    return DirBinaryTree(sq.root, frozenset(arcs))


@dataclass(frozen=True)
class ExtractResult:
    tree: DirBinaryTree
    source: str  # "projection" or "copy"
    copy: int | None = None


def dir_extract(sq: DirSquareMap, t2: DirBinaryTree) -> ExtractResult:
    """Tree in the base graph of size at least sqrt-factor of ``t2``."""
    if t2.root != sq.root:
        raise GraphError(f"tree must be rooted at {sq.root}")
    rep = validate_dir_tree(sq.squared, t2)
    if not rep:
        raise GraphError(f"tree invalid: {rep.reason}")
    r = sq.base_root
    proj_arcs = set()
    per_copy: dict[int, set] = {}
    for x, y in t2.arcs:
        cx, ix = sq.split(x)
        cy, iy = sq.split(y)
        if cx == cy:
            per_copy.setdefault(cx, set()).add((ix, iy))
        else:
            proj_arcs.add((cx, cy))  # r_cx -> s_cy
    best = ExtractResult(DirBinaryTree(r, frozenset(proj_arcs)), "projection")
    src = sq.base.n
    for v in sorted({sq.split(x)[0] for x in t2.vertices}):
        arcs = frozenset(a for a in per_copy.get(v, ()) if a[0] != src)
        cand = DirBinaryTree(r, arcs)
        if cand.size > best.tree.size:
            best = ExtractResult(cand, "copy", v)
    return best


@dataclass(frozen=True)
class BoostResult:
    tree: DirBinaryTree
    k_formula: int
    k_used: int
    sizes: tuple[int, ...]


def boost_rounds(alpha: float, epsilon: float) -> int:
    """k = 1 + ceil(log2(log2 alpha / log2(1 - eps))); 0 when alpha = 1."""
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if alpha == 1:
        return 0
    ratio = math.log2(alpha) / math.log2(1 - epsilon)
    return max(0, 1 + math.ceil(math.log2(ratio) - 1e-12))


def affordable_rounds(n: int, k: int, limit: int = MAX_BOOST_VERTICES, grow=squared_size) -> tuple[int, list[int]]:
    sizes = [n]
    for _ in range(k):
        nxt = grow(sizes[-1])
        if nxt > limit:
            break
        sizes.append(nxt)
    return len(sizes) - 1, sizes


def dir_boost_solve(
    g: Digraph,
    r: int,
    solver: Callable[[Digraph, int], DirBinaryTree],
    epsilon: float,
    alpha: float = 1.0,
    limit: int = MAX_BOOST_VERTICES,
) -> BoostResult:
    k = boost_rounds(alpha, epsilon)
    used, sizes = affordable_rounds(g.n, k, limit)
    if used < k:
        log.warning("size guard: boosting %d of %d rounds", used, k)
    maps = []
    cur, root = g, r
    for _ in range(used):
        sq = dir_square(cur, root)
        maps.append(sq)
        cur, root = sq.squared, sq.root
    t = solver(cur, root)
    for sq in reversed(maps):
        t = dir_extract(sq, t).tree
    return BoostResult(t, k, used, tuple(sizes))


# ---------------------------------------------------------------------------
# 3-coloring gadget

COLORS = ("R", "G", "B")


def gadget_t(n: int, m: int, epsilon: float) -> int:
    from fractions import Fraction

    eps = Fraction(epsilon).limit_denominator(10**9) if isinstance(epsilon, float) else Fraction(epsilon)
    return math.ceil((2 * eps * n * (n + 1) + 4 * n * n) / (eps * m))


@dataclass(frozen=True)
class ColorGadget:
    graph: UGraph
    epsilon: float
    t: int
    dag: Digraph
    root: int = 0
    slot_of: dict = field(default_factory=dict, repr=False)  # (edge idx, endpoint, color) -> path position

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    @property
    def N(self) -> int:
        return self.dag.n

    def b_node(self, j: int) -> int:
        return 1 + j

    @property
    def c(self) -> int:
        return self.b_node(0)

    def v(self, i: int) -> int:
        return self.b_node(self.n - 1 + i)

    def path_node(self, i: int, color: int, p: int) -> int:
        """p-th node (1-based) of the path of ``color`` feeding v_i."""
        n = self.n
        return 2 * n + (3 * i + color) * n + (p - 1)

    def gadget_node(self, e: int, color: int, j: int = 0) -> int:
        """Heap index ``j`` of T_e^color; j = 0 is the gadget root a_e^color."""
        return 2 * self.n + 3 * self.n * self.n + (3 * e + color) * self.t + j

    def gadget_roots(self) -> list[int]:
        return [self.gadget_node(e, c) for e in range(self.m) for c in range(3)]


def build_color_gadget(g: UGraph, epsilon: float) -> ColorGadget:
    if epsilon <= 0:
        raise GraphError("epsilon must be positive")
    if g.m < 1:
        raise GraphError("gadget needs at least one edge")
    n, m = g.n, g.m
    t = gadget_t(n, m, epsilon)
    gad = ColorGadget(g, epsilon, t, Digraph(0, ()))
    arcs = [(gad.c, 0)]
    for j in range(1, 2 * n - 1):  # heap layout, arcs child -> parent
        arcs.append((gad.b_node(j), gad.b_node((j - 1) // 2)))
    for i in range(n):
        for col in range(3):
            arcs.append((gad.path_node(i, col, 1), gad.v(i)))
            for p in range(1, n):
                arcs.append((gad.path_node(i, col, p + 1), gad.path_node(i, col, p)))
    rank = [0] * n
    slot_of = {}
    for e, (i, j) in enumerate(g.edges):
        for end in (i, j):
            pos = rank[end] + 1
            rank[end] += 1
            for col in range(3):
                slot_of[(e, end, col)] = pos
                arcs.append((gad.gadget_node(e, col), gad.path_node(end, col, pos)))
        for col in range(3):
            for h in range(1, t):
                arcs.append((gad.gadget_node(e, col, h), gad.gadget_node(e, col, (h - 1) // 2)))
    total = 3 * m * t + 3 * n * n + 2 * n
    dag = Digraph(total, tuple(arcs))
    return ColorGadget(g, epsilon, t, dag, 0, slot_of)


Coloring = dict  # vertex -> "R" | "G" | "B"


def _color_index(c) -> int:
    if isinstance(c, int):
        if c not in (0, 1, 2):
            raise GraphError(f"bad color {c}")
        return c
    key = str(c).strip().upper()[:1]
    if key not in COLORS:
        raise GraphError(f"bad color {c!r}")
    return COLORS.index(key)


def monochromatic_edges(g: UGraph, sigma: Coloring) -> list[tuple[int, int]]:
    return [(u, v) for u, v in g.edges if _color_index(sigma[u]) == _color_index(sigma[v])]


def coloring_to_tree(gad: ColorGadget, sigma: Coloring) -> DirBinaryTree:
    g = gad.graph
    for v in range(g.n):
        if v not in sigma:
            raise GraphError(f"coloring misses vertex {v}")
    bad = monochromatic_edges(g, sigma)
    if bad:
        raise GraphError(f"coloring is not proper on edge {bad[0]}")
    col = [_color_index(sigma[v]) for v in range(g.n)]
    n = g.n
    arcs = [(gad.c, 0)]
    for j in range(1, 2 * n - 1):
        arcs.append((gad.b_node(j), gad.b_node((j - 1) // 2)))
    for i in range(n):
        for c in range(3):
            if c == col[i]:
                continue
            arcs.append((gad.path_node(i, c, 1), gad.v(i)))
            for p in range(1, n):
                arcs.append((gad.path_node(i, c, p + 1), gad.path_node(i, c, p)))
    for e, (i, j) in enumerate(g.edges):
        for c in range(3):
            end = i if col[i] != c else j
            arcs.append((gad.gadget_node(e, c), gad.path_node(end, c, gad.slot_of[(e, end, c)])))
            for h in range(1, gad.t):
                arcs.append((gad.gadget_node(e, c, h), gad.gadget_node(e, c, (h - 1) // 2)))
    return DirBinaryTree(gad.root, frozenset(arcs))


def maximalize(g: Digraph, t: DirBinaryTree) -> DirBinaryTree:
    """Greedily attach vertices (arc order) until no arc enters a free slot."""
    verts = set(t.vertices)
    indeg: dict[int, int] = {}
    for _, v in t.arcs:
        indeg[v] = indeg.get(v, 0) + 1
    arcs = set(t.arcs)
    changed = True
    while changed:
        changed = False
        for u, v in g.arcs:
            if u not in verts and v in verts and indeg.get(v, 0) < 2:
                arcs.add((u, v))
                verts.add(u)
                indeg[v] = indeg.get(v, 0) + 1
                changed = True
    return DirBinaryTree(t.root, frozenset(arcs))


@dataclass(frozen=True)
class ColorExtraction:
    coloring: dict[int, str]
    violated: int
    fallback: tuple[int, ...]  # vertices colored by the fallback rule
    tree: DirBinaryTree  # the maximalized tree


def tree_to_coloring(gad: ColorGadget, t: DirBinaryTree) -> ColorExtraction:
    if t.root != gad.root:
        raise GraphError("tree must be rooted at the gadget root")
    rep = validate_dir_tree(gad.dag, t)
    if not rep:
        raise GraphError(f"tree invalid: {rep.reason}")
    full = maximalize(gad.dag, t)
    verts = full.vertices
    sigma, fallback = {}, []
    for i in range(gad.n):
        missing = [c for c in range(3) if gad.path_node(i, c, 1) not in verts]
        if len(missing) != 1:
            fallback.append(i)
            log.warning("vertex %d: %d first path nodes missing", i, len(missing))
        sigma[i] = COLORS[missing[0] if missing else 0]
    violated = len(monochromatic_edges(gad.graph, sigma))
    return ColorExtraction(sigma, violated, tuple(fallback), full)
