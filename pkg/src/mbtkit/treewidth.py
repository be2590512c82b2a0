"""Tree decompositions and the bounded-treewidth DP for maximum binary trees.

The rooted problem asks for a largest binary tree containing ``s`` with
deg(s) <= 2. A pendant vertex s' is hung on s; the DP then looks for a
binary tree through s' in which s' has degree exactly one. Every bag of the
normalized decomposition contains s', so every DP state does too.

A state is a tuple of ``(vertex, block, degree)`` triples sorted by vertex,
with block labels renumbered in order of first appearance. That single
tuple encodes the vertex subset X, the partition of X into future tree
components, and the degree map D.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable

import networkx as nx
from networkx.algorithms.approximation import treewidth_min_fill_in

from .graph import GraphError, ParseError, TreeReport, UGraph, UndirBinaryTree, validate_undir_tree
from .oracle import OptResult

LEAF, INTRODUCE, DROP, JOIN, EDGE = "leaf", "introduce", "drop", "join", "edge"


class DecompositionError(GraphError):
    pass


# ---------------------------------------------------------------------------
# plain tree decompositions


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple[frozenset[int], ...]
    tree_edges: tuple[tuple[int, int], ...] = ()

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def neighbours(self) -> list[list[int]]:
        nb: list[list[int]] = [[] for _ in self.bags]
        for i, j in self.tree_edges:
            nb[i].append(j)
            nb[j].append(i)
        return nb

    def validate(self, g: UGraph) -> TreeReport:
        return validate_td(g, self)


def _is_tree(nodes: int, edges: Iterable[tuple[int, int]]) -> bool:
    edges = list(edges)
    if nodes == 0:
        return not edges
    if len(edges) != nodes - 1:
        return False
    parent = list(range(nodes))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        if not (0 <= i < nodes and 0 <= j < nodes):
            return False
        ri, rj = find(i), find(j)
        if ri == rj:
            return False
        parent[ri] = rj
    return True


def validate_td(g: UGraph, td: TreeDecomposition) -> TreeReport:
    """Checks (T1) cover, (T2) edge containment, (T3) connectivity."""
    if not td.bags:
        return TreeReport(g.n == 0, None if g.n == 0 else "no bags")
    if not _is_tree(len(td.bags), td.tree_edges):
        return TreeReport(False, "decomposition tree is not a tree")
    for i, bag in enumerate(td.bags):
        for v in bag:
            if not 0 <= v < g.n:
                return TreeReport(False, f"bag {i} holds unknown vertex {v}")
    covered = set().union(*td.bags)
    missing = set(range(g.n)) - covered
    if missing:
        return TreeReport(False, f"(T1) vertex {min(missing)} in no bag")
    for u, v in g.edges:
        if not any(u in b and v in b for b in td.bags):
            return TreeReport(False, f"(T2) edge {{{u},{v}}} in no bag")
    # a vertex's bags form a subtree iff #bags - #internal tree edges == 1
    count = defaultdict(int)
    for bag in td.bags:
        for v in bag:
            count[v] += 1
    for i, j in td.tree_edges:
        for v in td.bags[i] & td.bags[j]:
            count[v] -= 1
    for v in sorted(count):
        if count[v] != 1:
            return TreeReport(False, f"(T3) bags holding vertex {v} are not connected")
    return TreeReport(True)


def heuristic_td(g: UGraph) -> TreeDecomposition:
    """Min-fill elimination decomposition; valid but not necessarily optimal."""
    if g.n == 0:
        return TreeDecomposition((frozenset(),))
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    _, tree = treewidth_min_fill_in(h)
    bags = sorted(tree.nodes(), key=lambda b: (len(b), sorted(b)))
    index = {b: i for i, b in enumerate(bags)}
    edges = tuple(sorted(tuple(sorted((index[a], index[b]))) for a, b in tree.edges()))
    td = TreeDecomposition(tuple(bags), edges)
    report = validate_td(g, td)
    if not report:
        raise DecompositionError(f"heuristic decomposition invalid: {report.reason}")
    return td


# ---------------------------------------------------------------------------
# PACE formats


def _pace_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        yield lineno, line.split()


def read_gr(text: str) -> UGraph:
    n = None
    edges = []
    for lineno, tok in _pace_lines(text):
        try:
            if tok[0] == "p":
                if n is not None or len(tok) != 4 or tok[1] != "tw":
                    raise ParseError("bad 'p tw n m' header", lineno)
                n, m = int(tok[2]), int(tok[3])
            else:
                if n is None:
                    raise ParseError("edge before header", lineno)
                u, v = int(tok[0]), int(tok[1])
                edges.append((u - 1, v - 1))
        except ValueError as e:
            raise ParseError(f"not an integer: {e}", lineno) from None
    if n is None:
        raise ParseError("missing 'p tw' header")
    if len(edges) != m:
        raise ParseError(f"header promises {m} edges, found {len(edges)}")
    return UGraph(n, tuple(edges))


def write_gr(g: UGraph) -> str:
    lines = [f"p tw {g.n} {g.m}"]
    lines += [f"{u + 1} {v + 1}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def read_td(text: str) -> TreeDecomposition:
    header = None
    bags: dict[int, frozenset[int]] = {}
    edges = []
    for lineno, tok in _pace_lines(text):
        try:
            if tok[0] == "s":
                if header is not None or len(tok) != 5 or tok[1] != "td":
                    raise ParseError("bad 's td <bags> <width+1> <n>' header", lineno)
                header = (int(tok[2]), int(tok[3]), int(tok[4]))
            elif tok[0] == "b":
                i = int(tok[1])
                if header is None or not 1 <= i <= header[0] or i in bags:
                    raise ParseError(f"bad bag id {i}", lineno)
                bags[i] = frozenset(int(v) - 1 for v in tok[2:])
            else:
                if header is None:
                    raise ParseError("tree edge before header", lineno)
                edges.append((int(tok[0]) - 1, int(tok[1]) - 1))
        except ValueError as e:
            raise ParseError(f"not an integer: {e}", lineno) from None
    if header is None:
        raise ParseError("missing 's td' header")
    nb, wp1, _ = header
    if sorted(bags) != list(range(1, nb + 1)):
        raise ParseError(f"expected bags 1..{nb}")
    td = TreeDecomposition(tuple(bags[i] for i in range(1, nb + 1)), tuple(edges))
    if td.width + 1 != wp1 and nb:
        raise ParseError(f"header width+1 {wp1} but largest bag has {td.width + 1}")
    return td


def write_td(td: TreeDecomposition, n: int) -> str:
    lines = [f"s td {len(td.bags)} {td.width + 1} {n}"]
    for i, bag in enumerate(td.bags, 1):
        lines.append(" ".join(["b", str(i)] + [str(v + 1) for v in sorted(bag)]))
    lines += [f"{i + 1} {j + 1}" for i, j in td.tree_edges]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# nice and s'-special decompositions


@dataclass
class NiceTD:
    """Rooted normalized decomposition; children always have smaller ids.

    ``base`` is the set kept in every bag (empty, or {s'}). ``vertex`` is the
    introduced/dropped vertex, ``edge`` the introduced edge.
    """

    kinds: list[str]
    bags: list[frozenset[int]]
    children: list[tuple[int, ...]]
    vertex: list[int | None]
    edge: list[tuple[int, int] | None]
    root: int
    base: frozenset[int] = frozenset()

    def __len__(self) -> int:
        return len(self.kinds)

    @property
    def width(self) -> int:
        return max(len(b) for b in self.bags) - 1

    def as_td(self) -> TreeDecomposition:
        edges = tuple((c, i) for i, ch in enumerate(self.children) for c in ch)
        return TreeDecomposition(tuple(self.bags), edges)


@dataclass
class SpecialTD:
    nice: NiceTD
    host: UGraph  # G^s: the input graph plus s' = n
    s: int
    s_prime: int
    input_width: int


class _NiceBuilder:
    def __init__(self):
        self.kinds: list[str] = []
        self.bags: list[frozenset[int]] = []
        self.children: list[tuple[int, ...]] = []
        self.vertex: list[int | None] = []
        self.edge: list[tuple[int, int] | None] = []

    def node(self, kind, bag, children=(), vertex=None, edge=None) -> int:
        self.kinds.append(kind)
        self.bags.append(frozenset(bag))
        self.children.append(tuple(children))
        self.vertex.append(vertex)
        self.edge.append(edge)
        return len(self.kinds) - 1

    def morph(self, top: int, target: frozenset[int]) -> int:
        """Drop then introduce vertices until the bag equals ``target``."""
        bag = self.bags[top]
        for v in sorted(bag - target):
            bag = bag - {v}
            top = self.node(DROP, bag, (top,), vertex=v)
        for v in sorted(target - bag):
            bag = bag | {v}
            top = self.node(INTRODUCE, bag, (top,), vertex=v)
        return top


def _nice_skeleton(td: TreeDecomposition) -> _NiceBuilder:
    """Leaf/introduce/drop/join tree with empty leaf and root bags (no edges yet)."""
    nb = td.neighbours()
    order, parent = [0], {0: -1}
    for i in order:
        for j in nb[i]:
            if j not in parent:
                parent[j] = i
                order.append(j)
    b = _NiceBuilder()
    top_of: dict[int, int] = {}
    for i in reversed(order):
        target = td.bags[i]
        tops = [b.morph(top_of[j], target) for j in nb[i] if parent.get(j) == i]
        if not tops:
            tops = [b.morph(b.node(LEAF, ()), target)]
        while len(tops) > 1:
            x, y = tops.pop(), tops.pop()
            tops.append(b.node(JOIN, target, (y, x)))
        top_of[i] = tops[0]
    b.morph(top_of[0], frozenset())
    return b


def _renumber(b: _NiceBuilder, root: int, base: frozenset[int]) -> NiceTD:
    order, stack = [], [(root, False)]
    while stack:
        i, done = stack.pop()
        if done:
            order.append(i)
            continue
        stack.append((i, True))
        for c in reversed(b.children[i]):
            stack.append((c, False))
    new = {old: k for k, old in enumerate(order)}
    return NiceTD(
        kinds=[b.kinds[i] for i in order],
        bags=[b.bags[i] | base for i in order],
        children=[tuple(new[c] for c in b.children[i]) for i in order],
        vertex=[b.vertex[i] for i in order],
        edge=[b.edge[i] for i in order],
        root=new[root],
        base=base,
    )


def _place_edges(b: _NiceBuilder, edges: Iterable[tuple[int, int]], pinned: frozenset[int]) -> int:
    """Insert introduce-edge chains directly below drop nodes; returns the root.

    Each edge goes below the drop node of the endpoint dropped first (the
    other endpoint is then still in the child bag). Vertices in ``pinned``
    are never dropped.
    """
    drop_of = {b.vertex[i]: i for i, k in enumerate(b.kinds) if k == DROP}
    parent = {c: i for i, ch in enumerate(b.children) for c in ch}
    root = next(i for i in range(len(b.kinds)) if i not in parent)
    depth = {}
    stack = [(root, 0)]
    while stack:
        i, d = stack.pop()
        depth[i] = d
        stack.extend((c, d + 1) for c in b.children[i])

    chains: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for u, v in sorted(edges):
        options = []
        for x, y in ((u, v), (v, u)):
            if x in pinned or x not in drop_of:
                continue
            j = drop_of[x]
            if y in b.bags[b.children[j][0]] or y in pinned:
                options.append((depth[j], j))
        if not options:
            raise DecompositionError(f"edge {{{u},{v}}} fits below no drop node")
        chains[max(options)[1]].append((u, v))

    for j in sorted(chains):
        child = b.children[j][0]
        bag = b.bags[child]
        for e in chains[j]:
            child = b.node(EDGE, bag, (child,), edge=e)
        b.children[j] = (child,)
    return root


def to_nice(td: TreeDecomposition, g: UGraph) -> NiceTD:
    report = validate_td(g, td)
    if not report:
        raise DecompositionError(f"invalid decomposition: {report.reason}")
    b = _nice_skeleton(td)
    root = _place_edges(b, g.edges, frozenset())
    return _renumber(b, root, frozenset())


def pendant_graph(g: UGraph, s: int) -> UGraph:
    """G^s: g plus a new vertex s' = g.n joined only to s."""
    return UGraph(g.n + 1, g.edges + ((s, g.n),))


def to_special(td: TreeDecomposition, g: UGraph, s: int) -> SpecialTD:
    """Nice form of ``td`` with s' added to every bag and {s, s'} below drop(s)."""
    if not 0 <= s < g.n:
        raise GraphError(f"root {s} outside [0,{g.n})")
    report = validate_td(g, td)
    if not report:
        raise DecompositionError(f"invalid decomposition: {report.reason}")
    sp = g.n
    host = pendant_graph(g, s)
    b = _nice_skeleton(td)
    root = _place_edges(b, host.edges, frozenset({sp}))
    nice = _renumber(b, root, frozenset({sp}))
    return SpecialTD(nice, host, s, sp, td.width)


def validate_nice(host: UGraph, nice: NiceTD) -> TreeReport:
    """Structure of every node kind, edge placement, and (T1)-(T3) on ``host``."""
    report = validate_td(host, nice.as_td())
    if not report:
        return report
    base = nice.base
    parent = {}
    for i, ch in enumerate(nice.children):
        for c in ch:
            if c >= i:
                return TreeReport(False, f"node {i} has child {c} not numbered before it")
            parent[c] = i
    if nice.bags[nice.root] != base:
        return TreeReport(False, "root bag is not the base set")
    seen_edges = []
    for i, kind in enumerate(nice.kinds):
        bag, ch = nice.bags[i], nice.children[i]
        kids = [nice.bags[c] for c in ch]
        v = nice.vertex[i]
        if kind == LEAF:
            ok = not ch and bag == base
        elif kind == INTRODUCE:
            ok = len(ch) == 1 and v not in kids[0] and bag == kids[0] | {v}
        elif kind == DROP:
            ok = len(ch) == 1 and v in kids[0] and v not in base and bag == kids[0] - {v}
        elif kind == JOIN:
            ok = len(ch) == 2 and kids[0] == bag == kids[1]
        elif kind == EDGE:
            e = nice.edge[i]
            ok = len(ch) == 1 and kids[0] == bag and e is not None and set(e) <= bag
            if ok:
                seen_edges.append(tuple(sorted(e)))
                # walk up the chain to the drop node of an endpoint
                j = parent.get(i)
                while j is not None and nice.kinds[j] == EDGE:
                    j = parent.get(j)
                ok = j is not None and nice.kinds[j] == DROP and nice.vertex[j] in e
        else:
            ok = False
        if not ok:
            return TreeReport(False, f"node {i} ({kind}) is malformed")
    if sorted(seen_edges) != sorted(host.edges):
        return TreeReport(False, "edges are not each introduced exactly once")
    return TreeReport(True)


def validate_special(sp: SpecialTD) -> TreeReport:
    report = validate_nice(sp.host, sp.nice)
    if not report:
        return report
    if sp.nice.base != frozenset({sp.s_prime}):
        return TreeReport(False, "s' is not pinned to every bag")
    if sp.nice.width > sp.input_width + 1:
        return TreeReport(False, f"width {sp.nice.width} exceeds input width + 1")
    return TreeReport(True)


def check_join_disjointness(nice: NiceTD) -> TreeReport:
    """At each join, the two sides share no forgotten vertex and no edge."""
    below_v: list[frozenset[int]] = []
    below_e: list[frozenset[tuple[int, int]]] = []
    for i, kind in enumerate(nice.kinds):
        vs = set(nice.bags[i])
        es = set()
        for c in nice.children[i]:
            vs |= below_v[c]
            es |= below_e[c]
        if kind == EDGE:
            es.add(nice.edge[i])
        if kind == JOIN:
            j, k = nice.children[i]
            x = nice.bags[i]
            if (below_v[j] - x) & (below_v[k] - x):
                return TreeReport(False, f"join {i}: forgotten vertices shared")
            if below_e[j] & below_e[k]:
                return TreeReport(False, f"join {i}: edges shared")
        below_v.append(frozenset(vs))
        below_e.append(frozenset(es))
    return TreeReport(True)


# ---------------------------------------------------------------------------
# the DP

State = tuple[tuple[int, int, int], ...]


def _canon(items) -> State:
    relabel: dict[int, int] = {}
    out = []
    for v, lab, d in items:
        if lab not in relabel:
            relabel[lab] = len(relabel)
        out.append((v, relabel[lab], d))
    return tuple(out)


def _introduce(st: State, v: int) -> State:
    items = list(st) + [(v, -1, 0)]
    items.sort()
    return _canon(items)


def _add_edge(st: State, u: int, v: int) -> State | None:
    eu = ev = None
    for t in st:
        if t[0] == u:
            eu = t
        elif t[0] == v:
            ev = t
    if eu is None or ev is None or eu[1] == ev[1] or eu[2] == 3 or ev[2] == 3:
        return None
    lu, lv = eu[1], ev[1]
    items = []
    for w, lab, d in st:
        if w == u or w == v:
            d += 1
        items.append((w, lu if lab == lv else lab, d))
    return _canon(items)


def _drop(st: State, v: int) -> State | None:
    ent = next((t for t in st if t[0] == v), None)
    if ent is None:
        return st
    if ent[2] == 0 or not any(t[1] == ent[1] and t[0] != v for t in st):
        return None  # its component would leave every bag
    return _canon(t for t in st if t[0] != v)


def _join(a: State, b: State) -> State | None:
    n = len(a)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    first: dict[int, int] = {}
    degs = []
    for i in range(n):
        d = a[i][2] + b[i][2]
        if d > 3:
            return None
        degs.append(d)
        lab = a[i][1]
        if lab in first:
            parent[i] = first[lab]
        else:
            first[lab] = i
    anchor: dict[int, int] = {}
    for i in range(n):
        lab = b[i][1]
        if lab not in anchor:
            anchor[lab] = i
            continue
        ri, rj = find(i), find(anchor[lab])
        if ri == rj:
            return None  # the merged auxiliary graph has a cycle
        parent[ri] = rj
    return _canon((a[i][0], find(i), degs[i]) for i in range(n))


def _dead(st: State, sp: int) -> bool:
    """A block without s' whose vertices are all saturated can never join it."""
    full: dict[int, bool] = {}
    home = None
    for v, lab, d in st:
        if v == sp:
            home = lab
        full[lab] = full.get(lab, True) and d == 3
    return any(f and lab != home for lab, f in full.items())


def state_bound(width: int) -> int:
    return (8 * width + 16) ** (width + 2)


@dataclass
class DPRun:
    value: int  # edges of the best tree in G^s (includes {s, s'}); -1 if none
    edges: list[tuple[int, int]]
    max_states: int
    bound: int
    nodes: int


def run_special_dp(sp: SpecialTD, check_bound: bool = True) -> DPRun:
    nice, s_prime = sp.nice, sp.s_prime
    tables: list[dict[State, int] | None] = [None] * len(nice)
    backs: list[dict[State, tuple]] = [dict() for _ in range(len(nice))]
    bound = state_bound(max(sp.input_width, 0))
    max_states = 0

    def offer(tab, back, st, val, how):
        if st is None or _dead(st, s_prime):
            return
        if tab.get(st, -1) < val:
            tab[st] = val
            back[st] = how

    for i, kind in enumerate(nice.kinds):
        tab: dict[State, int] = {}
        back = backs[i]
        ch = nice.children[i]
        if kind == LEAF:
            tab[((s_prime, 0, 0),)] = 0
            back[((s_prime, 0, 0),)] = ()
        elif kind == JOIN:
            left, right = tables[ch[0]], tables[ch[1]]
            by_x: dict[tuple, list] = defaultdict(list)
            for st, val in right.items():
                by_x[tuple(t[0] for t in st)].append((st, val))
            for a, va in left.items():
                for b, vb in by_x.get(tuple(t[0] for t in a), ()):
                    offer(tab, back, _join(a, b), va + vb, (a, b))
        else:
            child = tables[ch[0]]
            v = nice.vertex[i]
            for st, val in child.items():
                if kind == INTRODUCE:
                    offer(tab, back, st, val, (st,))
                    offer(tab, back, _introduce(st, v), val, (st,))
                elif kind == DROP:
                    offer(tab, back, _drop(st, v), val, (st,))
                else:
                    offer(tab, back, st, val, (st, None))
                    offer(tab, back, _add_edge(st, *nice.edge[i]), val + 1, (st, nice.edge[i]))
        if check_bound and len(tab) > bound:
            raise AssertionError(f"node {i}: {len(tab)} states exceed bound {bound}")
        max_states = max(max_states, len(tab))
        tables[i] = tab
        for c in ch:
            tables[c] = None  # children are consumed exactly once

    goal = ((s_prime, 0, 1),)
    root_tab = tables[nice.root]
    if goal not in root_tab:
        return DPRun(-1, [], max_states, bound, len(nice))
    edges = []
    stack = [(nice.root, goal)]
    while stack:
        i, st = stack.pop()
        how = backs[i][st]
        kind = nice.kinds[i]
        if kind == JOIN:
            stack.append((nice.children[i][0], how[0]))
            stack.append((nice.children[i][1], how[1]))
        elif kind == EDGE:
            if how[1] is not None:
                edges.append(how[1])
            stack.append((nice.children[i][0], how[0]))
        elif kind != LEAF:
            stack.append((nice.children[i][0], how[0]))
    return DPRun(root_tab[goal], sorted(edges), max_states, bound, len(nice))


def _single(v: int) -> OptResult:
    return OptResult(1, UndirBinaryTree(frozenset({v})))


def solve_rooted_tw(g: UGraph, s: int, td: TreeDecomposition | None = None) -> OptResult:
    """Largest binary tree of ``g`` containing ``s`` with deg(s) <= 2."""
    td = td if td is not None else heuristic_td(g)
    sp = to_special(td, g, s)
    run = run_special_dp(sp)
    if run.value < 1:
        return _single(s)
    edges = [e for e in run.edges if sp.s_prime not in e]
    tree = UndirBinaryTree(frozenset({s}), frozenset(edges))
    report = validate_undir_tree(g, tree, root=s)
    if not report or tree.size != run.value:
        raise AssertionError(f"DP witness rejected: {report.reason or 'size mismatch'}")
    return OptResult(tree.size, tree)


@dataclass
class Augmented:
    """G' for the unrooted case: g, a hub s adjacent to all of g, and a tree B under s."""

    graph: UGraph
    td: TreeDecomposition
    hub: int
    b_root: int


def augment_for_unrooted(g: UGraph, td: TreeDecomposition) -> Augmented:
    n = g.n
    hub = n
    b_edges = max(g.m, n)
    b0 = n + 1
    nb = b_edges + 1
    edges = list(g.edges) + [(v, hub) for v in range(n)] + [(hub, b0)]
    edges += [(b0 + (i - 1) // 2, b0 + i) for i in range(1, nb)]
    big = UGraph(n + 1 + nb, tuple(edges))

    bags = [bag | {hub} for bag in td.bags]
    tree_edges = list(td.tree_edges)
    hub_bag = len(bags)
    bags.append(frozenset({hub, b0}))
    tree_edges.append((0, hub_bag))
    bag_of = {0: hub_bag}  # B node -> bag holding it with its parent
    for i in range(1, nb):
        bags.append(frozenset({b0 + (i - 1) // 2, b0 + i}))
        tree_edges.append((bag_of[(i - 1) // 2], len(bags) - 1))
        bag_of[i] = len(bags) - 1
    return Augmented(big, TreeDecomposition(tuple(bags), tuple(tree_edges)), hub, b0)


def solve_unrooted_tw(g: UGraph, td: TreeDecomposition | None = None) -> OptResult:
    if g.n == 0:
        raise GraphError("empty graph has no binary tree")
    td = td if td is not None else heuristic_td(g)
    report = validate_td(g, td)
    if not report:
        raise DecompositionError(f"invalid decomposition: {report.reason}")
    aug = augment_for_unrooted(g, td)
    res = solve_rooted_tw(aug.graph, aug.hub, aug.td)
    adj = res.tree.adjacency()
    side = [w for w in adj[aug.hub] if w < g.n]
    if not side:
        return _single(0)
    start = side[0]
    seen, stack = {start}, [start]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w != aug.hub and w not in seen:
                seen.add(w)
                stack.append(w)
    edges = [e for e in res.tree.edges if e[0] in seen and e[1] in seen]
    tree = UndirBinaryTree(frozenset(seen), frozenset(edges))
    report = validate_undir_tree(g, tree)
    if not report:
        raise AssertionError(f"unrooted witness rejected: {report.reason}")
    return OptResult(tree.size, tree)
