"""Longest heapable subsequence through binary trees in permutation DAGs.

A binary tree of the permutation DAG has arcs from later, larger elements to
earlier, smaller ones, so reading its vertices in position order is a valid
min-heap insertion order. The root is simply the earliest chosen position;
no particular root is forced.
"""

from __future__ import annotations

from bisect import bisect_right, insort
from dataclasses import dataclass
from typing import Sequence

from .graph import DirBinaryTree, GraphError, permutation_dag
from .oracle import brute_mbt_directed_any_root

SOLVERS = ("brute", "fpt")


@dataclass(frozen=True)
class HeapTrace:
    ok: bool
    parents: tuple  # parent value per inserted element (None for the root)
    failed_at: int | None = None  # index of the first element that found no slot

    def __bool__(self) -> bool:
        return self.ok


def _check_distinct(seq: Sequence) -> None:
    if len(set(seq)) != len(seq):
        raise GraphError("sequence values must be distinct")


def is_heapable(seq: Sequence) -> HeapTrace:
    """Greedy insertion: each value hangs below the largest placed value with a free slot."""
    _check_distinct(seq)
    if not seq:
        return HeapTrace(True, ())
    slots = {seq[0]: 2}
    open_vals = [seq[0]]  # sorted values that still have a free child slot
    parents: list = [None]
    for i, x in enumerate(seq[1:], 1):
        pos = bisect_right(open_vals, x)
        if pos == 0:
            return HeapTrace(False, tuple(parents), i)
        p = open_vals[pos - 1]
        slots[p] -= 1
        if slots[p] == 0:
            open_vals.pop(pos - 1)
        parents.append(p)
        slots[x] = 2
        insort(open_vals, x)
    return HeapTrace(True, tuple(parents))


def is_heapable_exhaustive(seq: Sequence) -> bool:
    """Tries every attachment choice; for cross-checking the greedy rule."""
    _check_distinct(seq)
    if len(seq) <= 1:
        return True
    slots = {seq[0]: 2}

    def place(i: int) -> bool:
        if i == len(seq):
            return True
        x = seq[i]
        for p in [v for v, s in slots.items() if s > 0 and v < x]:
            slots[p] -= 1
            slots[x] = 2
            if place(i + 1):
                return True
            del slots[x]
            slots[p] += 1
        return False

    return place(1)


@dataclass(frozen=True)
class HeapableResult:
    length: int
    positions: tuple[int, ...]
    values: tuple
    tree: DirBinaryTree

    def to_json(self) -> dict:
        return {"length": self.length, "positions": list(self.positions), "values": list(self.values)}


def _fpt_best(g, seed: int, delta: float) -> DirBinaryTree:
    from .fpt.detect import decide_k_binary_tree, search_k_binary_tree

    lo, hi = 1, g.n  # a k-tree contains a (k-1)-tree, so the answer is monotone
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if decide_k_binary_tree(g, mid, delta, seed):
            lo = mid
        else:
            hi = mid - 1
    tree = search_k_binary_tree(g, lo, delta, seed)
    return tree if tree is not None else DirBinaryTree(0)


def longest_heapable(seq: Sequence, solver: str = "brute", cap: int | None = None, seed: int = 0, delta: float = 1e-3) -> HeapableResult:
    _check_distinct(seq)
    if not seq:
        raise GraphError("empty sequence")
    g = permutation_dag(seq)
    if solver == "brute":
        tree = brute_mbt_directed_any_root(g, cap).tree
    elif solver == "fpt":
        tree = _fpt_best(g, seed, delta)
    else:
        raise GraphError(f"unknown solver {solver!r}; choose from {SOLVERS}")
    positions = tuple(sorted(tree.vertices))
    values = tuple(seq[i] for i in positions)
    if not is_heapable(values):
        raise AssertionError("tree does not map to a heapable subsequence")
    return HeapableResult(len(positions), positions, values, tree)


def parse_sequence(text: str) -> list:
    vals = []
    for tok in text.split():
        try:
            vals.append(int(tok))
        except ValueError:
            try:
                vals.append(float(tok))
            except ValueError:
                raise GraphError(f"not a number: {tok!r}") from None
    return vals
