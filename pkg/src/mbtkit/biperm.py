"""Strong orderings and the cubic DP for MBT on bipartite permutation graphs."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .graph import GraphError, UGraph, UndirBinaryTree, validate_undir_tree

EXHAUSTIVE_CAP = 12


class NoStrongOrdering(GraphError):
    pass


@dataclass(frozen=True)
class StrongOrdering:
    s_order: tuple[int, ...]
    t_order: tuple[int, ...]

    def to_json(self) -> dict:
        return {"S": list(self.s_order), "T": list(self.t_order)}


@dataclass(frozen=True)
class OrderingReport:
    ok: bool
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def bipartition(g: UGraph, vertices: Sequence[int] | None = None) -> tuple[list[int], list[int]]:
    """Two-colouring of the given vertices (default: all); the side holding the smallest vertex comes first."""
    verts = sorted(range(g.n) if vertices is None else vertices)
    side: dict[int, int] = {}
    for start in verts:
        if start in side:
            continue
        side[start] = 0
        stack = [start]
        while stack:
            u = stack.pop()
            for w in g.adj[u]:
                if w not in side:
                    side[w] = 1 - side[u]
                    stack.append(w)
                elif side[w] == side[u]:
                    raise GraphError(f"graph is not bipartite (edge {u}-{w})")
    return [v for v in verts if side[v] == 0], [v for v in verts if side[v] == 1]


def validate_strong_ordering(g: UGraph, ord_: StrongOrdering, check_intervals: bool = True) -> OrderingReport:
    s, t = list(ord_.s_order), list(ord_.t_order)
    ss, ts = set(s), set(t)
    if len(ss) != len(s) or len(ts) != len(t) or ss & ts:
        raise GraphError("orderings must be disjoint permutations")
    for u, v in g.edges:
        if u in ss or v in ss:
            if not ((u in ss and v in ts) or (v in ss and u in ts)):
                raise GraphError(f"edge {{{u},{v}}} does not cross the sides")
    E = g.has_edge
    for i, a in enumerate(s):
        for b in s[i + 1:]:
            for j, x in enumerate(t):
                for y in t[j + 1:]:
                    if E(a, y) and E(b, x) and not (E(a, x) and E(b, y)):
                        return OrderingReport(False, f"cross edges {{{a},{y}}},{{{b},{x}}} without parallel edges")
    if check_intervals and len(g.components()) == 1 and s and t:
        pos = {v: k for k, v in enumerate(t)}
        prev = (-1, -1)
        for a in s:
            idx = sorted(pos[w] for w in g.adj[a] if w in pos)
            if not idx:
                continue
            if idx[-1] - idx[0] + 1 != len(idx):
                return OrderingReport(False, f"neighbourhood of {a} is not an interval")
            if idx[0] < prev[0] or idx[-1] < prev[1]:
                return OrderingReport(False, f"interval endpoints decrease at {a}")
            prev = (idx[0], idx[-1])
    return OrderingReport(True)


def _sort_by_intervals(g: UGraph, side: list[int], other_order: list[int]) -> list[int]:
    pos = {v: k for k, v in enumerate(other_order)}

    def key(v: int):
        idx = [pos[w] for w in g.adj[v] if w in pos]
        if not idx:
            return (float("inf"), float("inf"), v)
        return (min(idx), max(idx), sum(idx) / len(idx), v)

    return sorted(side, key=key)


def _bfs_dist(g: UGraph, start: int) -> dict[int, int]:
    dist = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def _refine(g: UGraph, S: list[int], T: list[int], start: int, rounds: int) -> StrongOrdering | None:
    dist = _bfs_dist(g, start)
    s_ord = sorted(S, key=lambda v: (dist.get(v, 0), v))
    seen = set()
    for _ in range(rounds):
        t_ord = _sort_by_intervals(g, T, s_ord)
        s_new = _sort_by_intervals(g, S, t_ord)
        cand = StrongOrdering(tuple(s_new), tuple(t_ord))
        if validate_strong_ordering(g, cand):
            return cand
        key = (cand.s_order, cand.t_order)
        if key in seen:
            return None
        seen.add(key)
        s_ord = s_new
    return None


def _heuristic(g: UGraph, S: list[int], T: list[int], rounds: int = 30) -> StrongOrdering | None:
    """Alternate interval sorts of both sides, seeded by BFS layers.

    Start vertices are tried by decreasing eccentricity, since an end of
    the ordering is usually a peripheral vertex.
    """
    ecc = {v: max(_bfs_dist(g, v).values()) for v in S + T}
    for start in sorted(ecc, key=lambda v: (-ecc[v], v)):
        found = _refine(g, S, T, start, rounds)
        if found is not None:
            return found
    return None


def _exhaustive(g: UGraph, S: list[int], T: list[int]) -> StrongOrdering | None:
    """Backtrack over T orders keeping every S-neighbourhood consecutive."""
    s_nb = {s: set(g.adj[s]) for s in S}
    order: list[int] = []
    used: set[int] = set()
    # per s: 0 = not started, 1 = open, 2 = closed
    state = {s: 0 for s in S}

    def place(t: int) -> list[tuple[int, int]] | None:
        changes = []
        for s in S:
            st = state[s]
            if t in s_nb[s]:
                if st == 2:
                    for s2, old in changes:
                        state[s2] = old
                    return None
                if st == 0:
                    changes.append((s, st))
                    state[s] = 1
            elif st == 1:
                changes.append((s, st))
                state[s] = 2
        return changes

    def rec() -> StrongOrdering | None:
        if len(order) == len(T):
            s_ord = _sort_by_intervals(g, S, order)
            cand = StrongOrdering(tuple(s_ord), tuple(order))
            return cand if validate_strong_ordering(g, cand) else None
        for t in T:
            if t in used:
                continue
            changes = place(t)
            if changes is None:
                continue
            order.append(t)
            used.add(t)
            res = rec()
            if res is not None:
                return res
            order.pop()
            used.discard(t)
            for s, old in changes:
                state[s] = old
        return None

    return rec()


def find_strong_ordering(g: UGraph, vertices: Sequence[int] | None = None, exhaustive_cap: int = EXHAUSTIVE_CAP) -> StrongOrdering:
    """Strong ordering of a connected bipartite graph (or of the given connected vertex set)."""
    S, T = bipartition(g, vertices)
    if not T:
        return StrongOrdering(tuple(S), ())
    if vertices is not None:
        h, labels = g.induced(vertices)
        back = {i: v for i, v in enumerate(labels)}
        sub = find_strong_ordering(h, None, exhaustive_cap)
        return StrongOrdering(tuple(back[v] for v in sub.s_order), tuple(back[v] for v in sub.t_order))
    if len(g.components()) != 1:
        raise GraphError("graph must be connected")
    found = _heuristic(g, S, T)
    if found is None and len(S) + len(T) <= exhaustive_cap:
        found = _exhaustive(g, S, T)
    if found is None:
        raise NoStrongOrdering("no strong ordering found")
    return found


def gen_biperm(intervals: Sequence[tuple[int, int]]) -> tuple[UGraph, StrongOrdering]:
    """s_i = i, t_j = p + j; s_i is joined to t_a..t_b (0-based, inclusive)."""
    p = len(intervals)
    if p == 0:
        raise GraphError("need at least one interval")
    prev = (-1, -1)
    for a, b in intervals:
        if a > b or a < 0:
            raise GraphError(f"malformed interval ({a},{b})")
        if a < prev[0] or b < prev[1]:
            raise GraphError("interval endpoints must be nondecreasing")
        prev = (a, b)
    q = max(b for _, b in intervals) + 1
    covered = set()
    for a, b in intervals:
        covered.update(range(a, b + 1))
    if len(covered) != q:
        raise GraphError("intervals must cover every T vertex")
    edges = [(i, p + j) for i, (a, b) in enumerate(intervals) for j in range(a, b + 1)]
    g = UGraph(p + q, tuple(edges))
    return g, StrongOrdering(tuple(range(p)), tuple(range(p, p + q)))


def random_intervals(p: int, q: int, seed: int, connected: bool = True, max_tries: int = 1000) -> list[tuple[int, int]]:
    """Monotone intervals over q T-vertices covering all of them.

    Connected samples are built directly (consecutive intervals share a
    T-vertex); otherwise raw samples are rejected until they cover T.
    """
    if p < 1 or q < 1:
        raise GraphError("need p, q >= 1")
    rng = random.Random(seed)
    if connected:
        a = [0] + sorted(rng.randrange(q) for _ in range(p - 1))
        iv = []
        hi = 0
        for i in range(p):
            lo_b = max(a[i], hi, a[i + 1] if i + 1 < p else q - 1)
            b = q - 1 if i == p - 1 else rng.randint(lo_b, max(lo_b, min(q - 1, lo_b + rng.randrange(3))))
            iv.append((a[i], b))
            hi = b
        return iv
    for _ in range(max_tries):
        a = sorted(rng.randrange(q) for _ in range(p))
        b = sorted(rng.randrange(q) for _ in range(p))
        iv = [(x, max(x, y)) for x, y in zip(a, b)]
        for i in range(1, p):
            if iv[i][1] < iv[i - 1][1]:
                iv[i] = (iv[i][0], iv[i - 1][1])
        cover = set()
        for x, y in iv:
            cover.update(range(x, y + 1))
        if len(cover) == q:
            return iv
    raise GraphError("could not sample covering intervals")


# ---------------------------------------------------------------------------
# dynamic program


def crossing_pairs(edges, ord_: StrongOrdering) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    sp = {v: i for i, v in enumerate(ord_.s_order)}
    tp = {v: i for i, v in enumerate(ord_.t_order)}
    norm = []
    for u, v in edges:
        if u in sp:
            norm.append((u, v))
        else:
            norm.append((v, u))
    out = []
    for i, (s1, t1) in enumerate(norm):
        for s2, t2 in norm[i + 1:]:
            if (sp[s1] - sp[s2]) * (tp[t1] - tp[t2]) < 0:
                out.append(((s1, t1), (s2, t2)))
    return out


@dataclass(frozen=True)
class BipermResult:
    edges: int
    tree: UndirBinaryTree
    orderings: tuple[StrongOrdering, ...]  # one per component
    ordering: StrongOrdering | None  # the component holding the tree

    @property
    def size(self) -> int:
        return self.tree.size


@dataclass
class BipermTable:
    mbt_s: list[list[int]]
    mbt_t: list[list[int]]
    choice_s: list[list[int]]  # chosen k, 0 for base cases
    choice_t: list[list[int]]


def _solve_component(g: UGraph, ord_: StrongOrdering) -> tuple[int, list[tuple[int, int]], BipermTable]:
    S, T = list(ord_.s_order), list(ord_.t_order)
    p, q = len(S), len(T)
    E = g.has_edge
    MS = [[0] * (q + 2) for _ in range(p + 2)]
    MT = [[0] * (q + 2) for _ in range(p + 2)]
    KS = [[0] * (q + 2) for _ in range(p + 2)]
    KT = [[0] * (q + 2) for _ in range(p + 2)]
    # degree of t_j toward S_i and of s_i toward T_j (neighbourhoods are intervals)
    for i in range(p, 0, -1):
        for j in range(q, 0, -1):
            s, t = S[i - 1], T[j - 1]
            if E(s, t):
                d = sum(1 for x in range(i, p + 1) if E(S[x - 1], t))
                if d == 1:
                    MS[i][j] = 1
                else:
                    best, bk = MT[i + 1][j] + 1, 1
                    for k in range(2, d):
                        val = MT[i + k][j] + 2
                        if val > best:
                            best, bk = val, k
                    MS[i][j], KS[i][j] = best, bk
                d = sum(1 for y in range(j, q + 1) if E(s, T[y - 1]))
                if d == 1:
                    MT[i][j] = 1
                else:
                    best, bk = MS[i][j + 1] + 1, 1
                    for k in range(2, d):
                        val = MS[i][j + k] + 2
                        if val > best:
                            best, bk = val, k
                    MT[i][j], KT[i][j] = best, bk
    table = BipermTable(MS, MT, KS, KT)
    best, arg = 0, None
    for i in range(1, p + 1):
        for j in range(1, q + 1):
            for kind, val in (("S", MS[i][j]), ("T", MT[i][j])):
                if val > best:
                    best, arg = val, (kind, i, j)
    edges: list[tuple[int, int]] = []
    while arg is not None:
        kind, i, j = arg
        s, t = S[i - 1], T[j - 1]
        edges.append((s, t))
        if kind == "S":
            k = KS[i][j]
            if k == 0:
                break
            if k >= 2:
                edges.append((S[i], t))
            arg = ("T", i + k, j)
        else:
            k = KT[i][j]
            if k == 0:
                break
            if k >= 2:
                edges.append((s, T[j]))
            arg = ("S", i, j + k)
    return best, edges, table


def solve_biperm(g: UGraph, orderings: dict[int, StrongOrdering] | None = None) -> BipermResult:
    """Maximum binary tree (by edges) of a bipartite permutation graph.

    ``orderings`` optionally maps the smallest vertex of a component to a
    known strong ordering of it; otherwise one is searched for.
    """
    if g.n == 0:
        raise GraphError("empty graph has no binary tree")
    orderings = orderings or {}
    best_edges, best_tree, best_ord = -1, None, None
    used = []
    for comp in g.components():
        if len(comp) == 1:
            if best_edges < 0:
                best_edges, best_tree, best_ord = 0, UndirBinaryTree(frozenset(comp)), None
            continue
        ord_ = orderings.get(min(comp))
        if ord_ is None:
            try:
                ord_ = find_strong_ordering(g, comp)
            except NoStrongOrdering:
                raise NoStrongOrdering(f"no strong ordering for the component containing vertex {min(comp)}") from None
        elif not validate_strong_ordering(g, ord_, check_intervals=False):
            raise GraphError(f"supplied ordering for component {min(comp)} is not strong")
        used.append(ord_)
        h, labels = g.induced(comp)
        idx = {v: i for i, v in enumerate(labels)}
        local = StrongOrdering(tuple(idx[v] for v in ord_.s_order), tuple(idx[v] for v in ord_.t_order))
        val, edges, _ = _solve_component(h, local)
        if val > best_edges:
            tree = UndirBinaryTree(frozenset(), frozenset((labels[a], labels[b]) for a, b in edges))
            best_edges, best_tree, best_ord = val, tree, ord_
    rep = validate_undir_tree(g, best_tree)
    if not rep or len(best_tree.edges) != best_edges:
        raise AssertionError(f"reconstructed tree invalid: {rep.reason}")
    return BipermResult(best_edges, best_tree, tuple(used), best_ord)


def first_edge_holds(tree: UndirBinaryTree, ord_: StrongOrdering) -> bool:
    """Minimum S and T vertices of the tree are adjacent and one of them is a leaf."""
    sp = {v: i for i, v in enumerate(ord_.s_order)}
    tp = {v: i for i, v in enumerate(ord_.t_order)}
    ss = [v for v in tree.vertices if v in sp]
    ts = [v for v in tree.vertices if v in tp]
    if not ss or not ts:
        return len(tree.vertices) == 1
    s1 = min(ss, key=sp.__getitem__)
    t1 = min(ts, key=tp.__getitem__)
    deg = tree.degrees()
    return (min(s1, t1), max(s1, t1)) in tree.edges and (deg[s1] == 1 or deg[t1] == 1)
