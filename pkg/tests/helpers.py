"""Shared generators for the test suite."""

from __future__ import annotations

import heapq
import itertools
import random

from mbtkit.graph import Digraph, UGraph, UndirBinaryTree


def prufer_decode(seq: tuple[int, ...], n: int) -> list[tuple[int, int]]:
    deg = [1] * n
    for v in seq:
        deg[v] += 1
    leaves = [v for v in range(n) if deg[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, v), max(leaf, v)))
        deg[v] -= 1
        if deg[v] == 1:
            heapq.heappush(leaves, v)
    a, b = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((a, b))
    return edges


def labeled_binary_trees(n: int):
    """Every labeled tree on vertices 0..n-1 with maximum degree 3."""
    if n == 1:
        yield UndirBinaryTree(frozenset({0}))
        return
    if n == 2:
        yield UndirBinaryTree(frozenset({0, 1}), frozenset({(0, 1)}))
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        # a vertex's degree is one more than its count in the sequence
        if max(seq.count(v) for v in set(seq)) <= 2:
            yield UndirBinaryTree(frozenset(range(n)), frozenset(prufer_decode(seq, n)))


def complete_ugraph(n: int) -> UGraph:
    return UGraph(n, tuple(itertools.combinations(range(n), 2)))


def path_ugraph(n: int) -> UGraph:
    return UGraph(n, tuple((i, i + 1) for i in range(n - 1)))


def star_ugraph(leaves: int) -> UGraph:
    return UGraph(leaves + 1, tuple((0, i) for i in range(1, leaves + 1)))


def cycle_ugraph(n: int) -> UGraph:
    return UGraph(n, tuple((min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n)))


def relabel(g: UGraph, seed: int) -> UGraph:
    perm = list(range(g.n))
    random.Random(seed).shuffle(perm)
    return UGraph(g.n, tuple((perm[u], perm[v]) for u, v in g.edges))


def binary_in_tree(size: int) -> Digraph:
    """Heap-shaped tree with arcs child -> parent, root 0."""
    return Digraph(size, tuple((i, (i - 1) // 2) for i in range(1, size)))
