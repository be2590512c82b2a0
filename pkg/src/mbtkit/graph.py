"""Graph and binary-tree certificate types shared by every solver.

Vertices are dense 0-based integers. Trees are always stored as subsets of a
host graph's arcs or edges; validators check them against that host.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Structural problem with an input (bad vertex id, duplicate edge, ...)."""


class ParseError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Digraph:
    n: int
    arcs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        arcs = tuple((int(u), int(v)) for u, v in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        if self.n < 0:
            raise GraphError("negative vertex count")
        seen = set()
        for u, v in arcs:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"arc ({u},{v}) references a vertex outside [0,{self.n})")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if (u, v) in seen:
                raise GraphError(f"duplicate arc ({u},{v})")
            seen.add((u, v))

    @property
    def m(self) -> int:
        return len(self.arcs)

    @cached_property
    def arc_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.arcs)

    @cached_property
    def out_adj(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.arcs:
            out[u].append(v)
        return tuple(tuple(sorted(x)) for x in out)

    @cached_property
    def in_adj(self) -> tuple[tuple[int, ...], ...]:
        inn: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.arcs:
            inn[v].append(u)
        return tuple(tuple(sorted(x)) for x in inn)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arc_set

    def without_arc(self, arc: tuple[int, int]) -> Digraph:
        return Digraph(self.n, tuple(a for a in self.arcs if a != arc))

    def topological_order(self) -> list[int] | None:
        """Kahn order, or None when the digraph has a cycle."""
        indeg = [0] * self.n
        for _, v in self.arcs:
            indeg[v] += 1
        queue = deque(v for v in range(self.n) if indeg[v] == 0)
        order = []
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in self.out_adj[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        return order if len(order) == self.n else None

    def is_acyclic(self) -> bool:
        return self.topological_order() is not None

    def reaching(self, r: int) -> set[int]:
        """Vertices with a directed path to ``r`` (including ``r``)."""
        seen = {r}
        stack = [r]
        while stack:
            v = stack.pop()
            for u in self.in_adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return seen


@dataclass(frozen=True)
class UGraph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("negative vertex count")
        norm = []
        seen = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge {{{u},{v}}} references a vertex outside [0,{self.n})")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            key = _edge_key(u, v)
            if key in seen:
                raise GraphError(f"duplicate edge {{{u},{v}}}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    @cached_property
    def adj(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(x)) for x in nbrs)

    def has_edge(self, u: int, v: int) -> bool:
        return _edge_key(u, v) in self.edge_set

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp = [s]
            stack = [s]
            while stack:
                u = stack.pop()
                for w in self.adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def induced(self, vertices: Iterable[int]) -> tuple[UGraph, list[int]]:
        """Induced subgraph relabelled to 0..k-1, plus the new-to-old id map."""
        labels = sorted(set(vertices))
        index = {v: i for i, v in enumerate(labels)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return UGraph(len(labels), tuple(edges)), labels


@dataclass(frozen=True)
class DirBinaryTree:
    """``root`` plus a set of child-to-parent arcs of the host digraph."""

    root: int
    arcs: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "arcs", frozenset((int(u), int(v)) for u, v in self.arcs))

    @cached_property
    def vertices(self) -> frozenset[int]:
        vs = {self.root}
        for u, v in self.arcs:
            vs.add(u)
            vs.add(v)
        return frozenset(vs)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def parent_map(self) -> dict[int, int]:
        return {u: v for u, v in self.arcs}

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "edges": [list(a) for a in sorted(self.arcs)],
            "vertices": sorted(self.vertices),
        }


@dataclass(frozen=True)
class UndirBinaryTree:
    """Edge subset of a host graph; ``vertices`` also covers the edgeless case."""

    vertices: frozenset[int]
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        edges = frozenset(_edge_key(int(u), int(v)) for u, v in self.edges)
        vs = set(int(v) for v in self.vertices)
        for u, v in edges:
            vs.add(u)
            vs.add(v)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "vertices", frozenset(vs))

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], vertex: int | None = None) -> UndirBinaryTree:
        return cls(frozenset() if vertex is None else frozenset({vertex}), frozenset(edges))

    @property
    def size(self) -> int:
        return len(self.vertices)

    def degrees(self) -> dict[int, int]:
        deg = {v: 0 for v in self.vertices}
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for u, v in sorted(self.edges):
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def to_json(self, root: int | None = None) -> dict:
        return {
            "root": root,
            "edges": [list(e) for e in sorted(self.edges)],
            "vertices": sorted(self.vertices),
        }


_TREE_KEYS = {"root", "vertices", "edges", "size"}


def tree_from_json(data: dict, directed: bool) -> DirBinaryTree | UndirBinaryTree:
    if not isinstance(data, dict):
        raise GraphError("tree JSON must be an object")
    extra = set(data) - _TREE_KEYS
    if extra:
        raise GraphError(f"unexpected tree keys {sorted(extra)}; use root, vertices, edges")
    try:
        edges = [(int(u), int(v)) for u, v in data.get("edges", [])]
    except (TypeError, ValueError):
        raise GraphError("tree edges must be pairs of integers") from None
    if directed:
        if data.get("root") is None:
            raise GraphError("directed tree needs a root")
        return DirBinaryTree(int(data["root"]), frozenset(edges))
    verts = set(data.get("vertices", []))
    if data.get("root") is not None:
        verts.add(int(data["root"]))
    return UndirBinaryTree(frozenset(verts), frozenset(edges))


@dataclass(frozen=True)
class TreeReport:
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def _check_ids(n: int, ids: Iterable[int]) -> None:
    for v in ids:
        if not 0 <= v < n:
            raise GraphError(f"vertex {v} outside [0,{n})")


def validate_dir_tree(g: Digraph, t: DirBinaryTree) -> TreeReport:
    _check_ids(g.n, t.vertices)
    out_deg: dict[int, int] = {}
    in_deg: dict[int, int] = {}
    for u, v in t.arcs:
        if not g.has_arc(u, v):
            return TreeReport(False, f"arc ({u},{v}) not in host graph")
        out_deg[u] = out_deg.get(u, 0) + 1
        in_deg[v] = in_deg.get(v, 0) + 1
    if out_deg.get(t.root, 0):
        return TreeReport(False, f"root {t.root} has an outgoing arc")
    for v in sorted(t.vertices):
        if v != t.root and out_deg.get(v, 0) != 1:
            return TreeReport(False, f"vertex {v} has out-degree {out_deg.get(v, 0)}, expected 1")
        if in_deg.get(v, 0) > 2:
            return TreeReport(False, f"vertex {v} has in-degree {in_deg[v]}")
    parent = t.parent_map()
    for v in sorted(t.vertices):
        steps = 0
        while v != t.root:
            v = parent[v]
            steps += 1
            if steps > len(t.vertices):
                return TreeReport(False, f"vertex {v} does not reach the root")
    return TreeReport(True)


def validate_undir_tree(g: UGraph, t: UndirBinaryTree, root: int | None = None) -> TreeReport:
    _check_ids(g.n, t.vertices)
    if root is not None:
        _check_ids(g.n, [root])
    if not t.vertices:
        return TreeReport(False, "empty tree")
    for u, v in t.edges:
        if not g.has_edge(u, v):
            return TreeReport(False, f"edge {{{u},{v}}} not in host graph")
    if len(t.edges) != len(t.vertices) - 1:
        return TreeReport(False, f"{len(t.edges)} edges on {len(t.vertices)} vertices: cycle or disconnected")
    adj = t.adjacency()
    start = min(t.vertices)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != len(t.vertices):
        return TreeReport(False, "tree is disconnected (so it has a cycle)")
    for v, nb in sorted(adj.items()):
        if len(nb) > 3:
            return TreeReport(False, f"vertex {v} has degree {len(nb)}")
    if root is not None:
        if root not in t.vertices:
            return TreeReport(False, f"root {root} not in tree")
        if len(adj[root]) > 2:
            return TreeReport(False, f"root {root} has degree {len(adj[root])}")
    return TreeReport(True)


@dataclass(frozen=True)
class DegreeCensus:
    i0: int
    i1: int
    i2: int
    i3: int

    @property
    def total(self) -> int:
        return self.i0 + self.i1 + self.i2 + self.i3

    def identity_holds(self) -> bool:
        return 3 * self.i0 + 2 * self.i1 + self.i2 == self.total + 2


def degree_census(t: UndirBinaryTree) -> DegreeCensus:
    if not t.vertices or len(t.edges) != len(t.vertices) - 1:
        raise GraphError("degree census needs a valid nonempty tree")
    counts = [0, 0, 0, 0]
    for d in t.degrees().values():
        if d > 3:
            raise GraphError(f"degree {d} exceeds 3")
        counts[d] += 1
    return DegreeCensus(*counts)


def permutation_dag(sigma: Sequence) -> Digraph:
    """Arc (i, j) whenever i > j and sigma[i] >= sigma[j] (0-based positions)."""
    if len(set(sigma)) != len(sigma):
        raise GraphError("sequence values must be distinct")
    arcs = [(i, j) for i in range(len(sigma)) for j in range(i) if sigma[i] >= sigma[j]]
    return Digraph(len(sigma), tuple(arcs))


@dataclass(frozen=True)
class RootedInstance:
    graph: Digraph
    root: int
    labels: tuple[int, ...]  # new id -> original id

    def lift(self, t: DirBinaryTree) -> DirBinaryTree:
        lab = self.labels
        return DirBinaryTree(lab[t.root], frozenset((lab[u], lab[v]) for u, v in t.arcs))


def rooted_from_unrooted_dag(g: Digraph, r: int) -> RootedInstance:
    """Sub-DAG of vertices reaching ``r`` with r's outgoing arcs removed."""
    if not g.is_acyclic():
        raise GraphError("graph has a directed cycle")
    _check_ids(g.n, [r])
    keep = sorted(g.reaching(r))
    index = {v: i for i, v in enumerate(keep)}
    arcs = [(index[u], index[v]) for u, v in g.arcs if u in index and v in index and u != r]
    return RootedInstance(Digraph(len(keep), tuple(arcs)), index[r], tuple(keep))


def extend_to_root(g: Digraph, t: DirBinaryTree, r: int) -> DirBinaryTree:
    """Extend a tree rooted at r' by some r' -> r path (g must be a DAG)."""
    if t.root == r:
        return t
    # BFS over out-arcs from t.root; acyclicity keeps the path off the tree.
    prev = {t.root: None}
    queue = deque([t.root])
    while queue:
        u = queue.popleft()
        if u == r:
            break
        for v in g.out_adj[u]:
            if v not in prev:
                prev[v] = u
                queue.append(v)
    if r not in prev:
        raise GraphError(f"no path from {t.root} to {r}")
    arcs = set(t.arcs)
    v = r
    while prev[v] is not None:
        arcs.add((prev[v], v))
        v = prev[v]
    return DirBinaryTree(r, frozenset(arcs))


def read_graph(text: str) -> Digraph | UGraph:
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ParseError("empty input", 1)
    lineno, header = lines[0]
    parts = header.split()
    if len(parts) != 4 or parts[0] != "mbt" or parts[1] not in ("dir", "undir"):
        raise ParseError(f"bad header {header!r}; expected 'mbt <dir|undir> <n> <m>'", lineno)
    try:
        n, m = int(parts[2]), int(parts[3])
    except ValueError:
        raise ParseError(f"bad counts in header {header!r}", lineno) from None
    if n < 0 or m < 0:
        raise ParseError("negative counts", lineno)
    body = lines[1:]
    if len(body) != m:
        raise ParseError(f"header promises {m} edges, found {len(body)}", body[-1][0] if body else lineno)
    directed = parts[1] == "dir"
    seen = set()
    pairs = []
    for lineno, ln in body:
        tok = ln.split()
        if len(tok) != 2:
            raise ParseError(f"expected 'u v', got {ln!r}", lineno)
        try:
            u, v = int(tok[0]), int(tok[1])
        except ValueError:
            raise ParseError(f"non-integer vertex in {ln!r}", lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"vertex out of range in {ln!r} (n={n})", lineno)
        if u == v:
            raise ParseError(f"self-loop {ln!r}", lineno)
        key = (u, v) if directed else _edge_key(u, v)
        if key in seen:
            raise ParseError(f"duplicate edge {ln!r}", lineno)
        seen.add(key)
        pairs.append((u, v))
    return Digraph(n, tuple(pairs)) if directed else UGraph(n, tuple(pairs))


def write_graph(g: Digraph | UGraph) -> str:
    if isinstance(g, Digraph):
        kind, pairs = "dir", sorted(g.arcs)
    else:
        kind, pairs = "undir", sorted(g.edges)
    out = [f"mbt {kind} {g.n} {len(pairs)}"]
    out.extend(f"{u} {v}" for u, v in pairs)
    return "\n".join(out) + "\n"


def gen_random(kind: str, n: int, m: int, seed: int) -> Digraph | UGraph:
    """Uniform simple graph with exactly ``m`` edges, deterministic in ``seed``."""
    rng = random.Random(seed)
    if kind == "dir":
        pool = [(u, v) for u in range(n) for v in range(n) if u != v]
    elif kind in ("dag", "undir"):
        pool = list(itertools.combinations(range(n), 2))
    else:
        raise GraphError(f"unknown graph kind {kind!r}")
    if not 0 <= m <= len(pool):
        raise GraphError(f"m={m} infeasible for {kind} graph on {n} vertices (max {len(pool)})")
    chosen = rng.sample(pool, m)
    if kind == "undir":
        return UGraph(n, tuple(sorted(chosen)))
    if kind == "dag":
        order = list(range(n))
        rng.shuffle(order)
        # position i precedes position j in the random topological order
        chosen = [(order[i], order[j]) for i, j in chosen]
    return Digraph(n, tuple(sorted(chosen)))


def tree_json_dumps(t: DirBinaryTree | UndirBinaryTree, root: int | None = None) -> str:
    data = t.to_json() if isinstance(t, DirBinaryTree) else t.to_json(root)
    return json.dumps(data, sort_keys=True)
