from __future__ import annotations

import math
import random

import pytest

from helpers import complete_ugraph
from mbtkit.dag_reductions import (
    affordable_rounds,
    boost_rounds,
    build_color_gadget,
    coloring_to_tree,
    dir_boost_solve,
    dir_boost_tree,
    dir_extract,
    dir_square,
    gadget_t,
    maximalize,
    monochromatic_edges,
    tree_to_coloring,
)
from mbtkit.graph import Digraph, DirBinaryTree, GraphError, UGraph, gen_random, validate_dir_tree
from mbtkit.oracle import brute_mbt_dag

K3 = complete_ugraph(3)
P2 = UGraph(2, ((0, 1),))


def random_dag_case(seed: int, max_n: int = 6):
    rng = random.Random(seed)
    n = rng.randint(1, max_n)
    g = gen_random("dag", n, rng.randint(0, n * (n - 1) // 2), seed)
    r = g.topological_order()[-1]
    return g, r


class TestSquare:
    def test_three_cycle(self):
        g = Digraph(3, ((0, 2), (2, 1), (1, 0)))
        sq = dir_square(g, 0)
        assert sq.squared.n == 12 and sq.squared.m == 21
        assert sq.root == sq.flat(0, 0)

    def test_single_vertex(self):
        sq = dir_square(Digraph(1, ()), 0)
        assert sq.squared.n == 2
        assert sq.squared.arcs == ((1, 0),)  # s_r -> r_r

    def test_counts_and_acyclicity(self):
        for seed in range(30):
            g, r = random_dag_case(seed)
            sq = dir_square(g, r)
            n, m = g.n, g.m
            assert sq.squared.n == n * (n + 1)
            # each copy holds G' (m + n arcs), plus one arc per original arc
            assert sq.squared.m == n * (m + n) + m
            assert sq.squared.is_acyclic()

    def test_embedding(self):
        g = Digraph(2, ((0, 1),))
        sq = dir_square(g, 1)
        assert sq.split(sq.source(1)) == (1, 2)
        assert sq.is_source(sq.source(0)) and not sq.is_source(sq.copy_root(0))
        assert sq.squared.has_arc(sq.copy_root(0), sq.source(1))

    def test_bad_root(self):
        with pytest.raises(GraphError):
            dir_square(Digraph(2, ()), 2)


class TestBoostExtract:
    def test_size_two(self):
        g = Digraph(2, ((0, 1),))
        sq = dir_square(g, 1)
        t = dir_boost_tree(sq, DirBinaryTree(1, frozenset(g.arcs)))
        assert t.size == 6 and validate_dir_tree(sq.squared, t)

    def test_size_one(self):
        sq = dir_square(Digraph(2, ((0, 1),)), 1)
        t = dir_boost_tree(sq, DirBinaryTree(1))
        assert t.size == 2

    def test_round_trips(self):
        for seed in range(40):
            g, r = random_dag_case(seed)
            t1 = brute_mbt_dag(g, r).tree
            sq = dir_square(g, r)
            t2 = dir_boost_tree(sq, t1)
            assert t2.size == t1.size ** 2 + t1.size
            assert validate_dir_tree(sq.squared, t2) and t2.root == sq.root
            back = dir_extract(sq, t2)
            assert back.tree.size >= t1.size and back.tree.root == r
            assert validate_dir_tree(g, back.tree)

    def test_extract_root_only(self):
        g = Digraph(3, ((0, 1), (1, 2)))
        sq = dir_square(g, 2)
        out = dir_extract(sq, DirBinaryTree(sq.root))
        assert out.tree == DirBinaryTree(2)

    def test_extract_single_copy(self):
        g = Digraph(3, ((0, 2), (1, 2)))
        sq = dir_square(g, 2)
        # inside copy 2: 0 -> 2 and 1 -> 2, plus its source under 0
        arcs = {(sq.flat(2, 0), sq.root), (sq.flat(2, 1), sq.root), (sq.source(2), sq.flat(2, 0))}
        out = dir_extract(sq, DirBinaryTree(sq.root, frozenset(arcs)))
        assert out.source == "copy" and out.copy == 2
        assert out.tree.arcs == {(0, 2), (1, 2)}

    def test_extract_requires_root(self):
        g = Digraph(2, ((0, 1),))
        sq = dir_square(g, 1)
        with pytest.raises(GraphError):
            dir_extract(sq, DirBinaryTree(0))

    def test_boost_rejects_wrong_root(self):
        g = Digraph(2, ((0, 1),))
        with pytest.raises(GraphError):
            dir_boost_tree(dir_square(g, 1), DirBinaryTree(0))


class TestBoostLoop:
    def test_round_formula(self):
        assert boost_rounds(0.25, 0.75) == 1
        assert boost_rounds(1.0, 0.3) == 0
        a, e = 0.5, 0.1
        assert boost_rounds(a, e) == 1 + math.ceil(math.log2(math.log2(a) / math.log2(1 - e)))

    def test_exact_oracle_degenerates(self):
        g = Digraph(4, ((0, 1), (1, 2), (2, 3)))
        res = dir_boost_solve(g, 3, lambda h, r: brute_mbt_dag(h, r).tree, 0.5)
        assert res.k_used == 0 and res.tree.size == 4

    def test_one_round_recovers_opt(self):
        cases = [Digraph(4, ((0, 3), (1, 3), (2, 3))), Digraph(4, ((0, 1), (1, 2), (2, 3))), Digraph(4, ((0, 2), (1, 2), (2, 3), (0, 3)))]
        for g in cases:
            res = dir_boost_solve(g, 3, lambda h, r: brute_mbt_dag(h, r).tree, 0.75, alpha=0.25)
            assert res.k_used == 1 and res.sizes == (4, 20)
            assert res.tree.size == brute_mbt_dag(g, 3).size
            assert validate_dir_tree(g, res.tree)

    def test_size_guard(self):
        used, sizes = affordable_rounds(10, 5, limit=20_000)
        assert used == 2 and sizes == [10, 110, 12210]
        g = Digraph(3, ((0, 2), (1, 2)))
        res = dir_boost_solve(g, 2, lambda h, r: DirBinaryTree(r), 0.1, alpha=0.5, limit=20)
        assert res.k_formula > res.k_used == 1


class TestGadget:
    def test_k3_parameters(self):
        gad = build_color_gadget(K3, 1)
        assert gad.t == 20 and gad.N == 213
        assert gad.dag.is_acyclic()

    def test_p2_parameters(self):
        gad = build_color_gadget(P2, 1)
        assert gad.t == 28 and gad.N == 100

    def test_t_formula_rational_eps(self):
        assert gadget_t(3, 3, 0.5) == math.ceil((2 * 0.5 * 12 + 36) / 1.5)

    def test_errors(self):
        with pytest.raises(GraphError):
            build_color_gadget(K3, 0)
        with pytest.raises(GraphError):
            build_color_gadget(UGraph(2, ()), 1)

    def test_slots_respect_in_degree(self):
        gad = build_color_gadget(complete_ugraph(4), 1)
        indeg = {}
        for _, v in gad.dag.arcs:
            indeg[v] = indeg.get(v, 0) + 1
        # path nodes take one predecessor plus at most one gadget root
        for i in range(4):
            for c in range(3):
                for p in range(1, 5):
                    assert indeg.get(gad.path_node(i, c, p), 0) <= 2

    def test_k3_round_trip(self):
        gad = build_color_gadget(K3, 1)
        t = coloring_to_tree(gad, {0: "R", 1: "G", 2: "B"})
        assert t.size == 204 and validate_dir_tree(gad.dag, t)
        back = tree_to_coloring(gad, t)
        assert back.violated == 0 and not back.fallback
        assert back.coloring == {0: "R", 1: "G", 2: "B"}

    def test_p2_round_trip(self):
        gad = build_color_gadget(P2, 1)
        t = coloring_to_tree(gad, {0: "R", 1: "G"})
        assert t.size == 96
        assert tree_to_coloring(gad, t).violated == 0

    def test_improper_rejected(self):
        gad = build_color_gadget(K3, 1)
        with pytest.raises(GraphError):
            coloring_to_tree(gad, {0: "R", 1: "R", 2: "B"})

    def test_coloring_tree_is_maximal(self):
        gad = build_color_gadget(K3, 1)
        t = coloring_to_tree(gad, {0: "R", 1: "G", 2: "B"})
        assert maximalize(gad.dag, t) == t

    def test_maximal_tree_fills_v(self):
        gad = build_color_gadget(K3, 1)
        res = tree_to_coloring(gad, DirBinaryTree(gad.root))
        indeg = {}
        for _, v in res.tree.arcs:
            indeg[v] = indeg.get(v, 0) + 1
        assert all(indeg.get(gad.v(i), 0) == 2 for i in range(3))
        assert validate_dir_tree(gad.dag, res.tree)
        assert len(res.coloring) == 3

    @pytest.mark.parametrize("eps", [1.0, 0.5])
    def test_dropping_gadget_roots_shrinks(self, eps):
        """Omitting at least eps*m gadget trees falls below (1 - eps/4)(N - n^2)."""
        gad = build_color_gadget(K3, eps)
        t = coloring_to_tree(gad, {0: "R", 1: "G", 2: "B"})
        q = math.ceil(eps * gad.m)
        drop = set()
        for root in gad.gadget_roots()[:q]:
            drop.update(range(root, root + gad.t))
        arcs = frozenset(a for a in t.arcs if a[0] not in drop and a[1] not in drop)
        smaller = DirBinaryTree(t.root, arcs)
        assert validate_dir_tree(gad.dag, smaller)
        assert smaller.size < (1 - eps / 4) * (gad.N - gad.n ** 2)

    def test_monochromatic_count(self):
        assert monochromatic_edges(K3, {0: "R", 1: "R", 2: "R"}) == list(K3.edges)
