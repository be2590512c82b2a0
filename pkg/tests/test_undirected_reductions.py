from __future__ import annotations

import itertools
import random

import pytest

from helpers import complete_ugraph, cycle_ugraph, labeled_binary_trees, path_ugraph, star_ugraph
from mbtkit.graph import GraphError, ParseError, UGraph, UndirBinaryTree, degree_census, gen_random, validate_undir_tree
from mbtkit.oracle import brute_mbt_undirected
from mbtkit.treewidth import solve_unrooted_tw
from mbtkit.undirected_reductions import (
    Tsp12Instance,
    pendant_augment,
    read_tsp12,
    tree_to_path,
    tree_weight,
    tsp12_tour,
    undir_boost_solve,
    undir_boost_tree,
    undir_extract,
    undir_project,
    undir_square,
    undir_square_size,
    write_tsp12,
)


def whole(g: UGraph) -> UndirBinaryTree:
    return UndirBinaryTree(frozenset(range(g.n)), frozenset(g.edges))


def random_binary_tree(g: UGraph, rng: random.Random, limit: int | None = None) -> UndirBinaryTree:
    """Grow a random binary tree of ``g`` from a random start vertex."""
    start = rng.randrange(g.n)
    verts, edges, deg = {start}, set(), {start: 0}
    while limit is None or len(verts) < limit:
        frontier = [(u, w) for u in verts if deg[u] < 3 for w in g.adj[u] if w not in verts]
        if not frontier:
            break
        u, w = rng.choice(frontier)
        verts.add(w)
        edges.add((u, w))
        deg[u] += 1
        deg[w] = 1
    return UndirBinaryTree(frozenset(verts), frozenset(edges))


def exact_tree(g: UGraph, eps: float = 0.0) -> UndirBinaryTree:
    return brute_mbt_undirected(g, cap=20).tree


class TestSquare:
    def test_star(self):
        assert undir_square(star_ugraph(3)).squared.n == 48

    def test_single_vertex(self):
        assert undir_square(UGraph(1, ())).squared.n == 3

    def test_single_edge(self):
        assert undir_square(UGraph(2, ((0, 1),))).squared.n == 12

    def test_counts(self):
        for seed in range(25):
            rng = random.Random(seed)
            n = rng.randint(1, 6)
            m = rng.randint(0, n * (n - 1) // 2)
            sq = undir_square(gen_random("undir", n, m, seed))
            assert sq.squared.n == n + (m + 2 * n) * n
            assert (sq.squared.n, sq.squared.m) == undir_square_size(n, m)

    def test_attachments(self):
        g = path_ugraph(3)
        sq = undir_square(g)
        h = sq.squared
        for u, v in g.edges:
            c = sq.edge_index(u, v)
            for w in range(g.n):
                x = sq.flat(c, w)
                assert h.has_edge(u, x) and h.has_edge(v, x)
        for v in range(g.n):
            for which in (1, 2):
                for w in range(g.n):
                    assert h.has_edge(v, sq.flat(sq.pendant_copy(v, which), w))
        # copies are disjoint copies of g
        assert sq.split(sq.flat(sq.pendant_copy(2, 2), 1))[1] == 1
        assert sq.split(1) == (None, 1)


class TestBoost:
    def test_pair(self):
        g = UGraph(2, ((0, 1),))
        b = undir_boost_tree(undir_square(g), whole(g))
        assert b.tree.size == 12 and not b.degraded

    def test_path_three(self):
        g = path_ugraph(3)
        sq = undir_square(g)
        b = undir_boost_tree(sq, whole(g))
        assert b.tree.size == 24
        assert validate_undir_tree(sq.squared, b.tree)
        assert degree_census(b.tree).identity_holds()

    def test_single_vertex_degraded(self):
        g = UGraph(1, ())
        b = undir_boost_tree(undir_square(g), whole(g))
        assert b.degraded and b.tree.size == 3

    def test_random_sizes(self):
        for seed in range(30):
            rng = random.Random(seed)
            n = rng.randint(2, 6)
            g = gen_random("undir", n, rng.randint(1, n * (n - 1) // 2), seed)
            t1 = brute_mbt_undirected(g).tree
            sq = undir_square(g)
            s = t1.size
            b = undir_boost_tree(sq, t1)
            assert b.tree.size == 2 * s * s + 2 * s
            assert validate_undir_tree(sq.squared, b.tree)
            assert degree_census(b.tree).identity_holds()

    def test_invalid_input(self):
        g = cycle_ugraph(3)
        with pytest.raises(GraphError):
            undir_boost_tree(undir_square(g), whole(g))


class TestProjectExtract:
    def test_round_trip(self):
        for seed in range(30):
            rng = random.Random(100 + seed)
            n = rng.randint(2, 6)
            g = gen_random("undir", n, rng.randint(1, n * (n - 1) // 2), seed)
            t1 = brute_mbt_undirected(g).tree
            sq = undir_square(g)
            t2 = undir_boost_tree(sq, t1).tree
            p = undir_project(sq, t2)
            assert p.vertices == t1.vertices and validate_undir_tree(g, p)
            ex = undir_extract(sq, t2)
            assert ex.tree.size >= t1.size and validate_undir_tree(g, ex.tree)
            assert degree_census(ex.tree).identity_holds()

    def test_pendant_resident(self):
        g = path_ugraph(3)
        sq = undir_square(g)
        c = sq.pendant_copy(1, 1)
        t2 = UndirBinaryTree(frozenset(), frozenset({(sq.flat(c, 0), sq.flat(c, 1)), (sq.flat(c, 1), sq.flat(c, 2))}))
        assert undir_project(sq, t2) is None
        ex = undir_extract(sq, t2)
        assert ex.source == "copy" and ex.tree == whole(g)

    def test_single_original_vertex(self):
        sq = undir_square(path_ugraph(3))
        p = undir_project(sq, UndirBinaryTree(frozenset({2})))
        assert p == UndirBinaryTree(frozenset({2}))

    def test_edge_needs_its_copy(self):
        g = path_ugraph(3)
        sq = undir_square(g)
        c01 = sq.flat(sq.edge_index(0, 1), 0)
        c12 = sq.flat(sq.edge_index(1, 2), 0)
        # each original edge is realized through its own copy
        t2 = UndirBinaryTree(frozenset(), frozenset({(0, c01), (1, c01), (1, c12), (2, c12)}))
        p = undir_project(sq, t2)
        assert p.edges == {(0, 1), (1, 2)}

    def test_random_trees_forest_bound(self):
        rng = random.Random(7)
        for seed in range(60):
            n = rng.randint(1, 4)
            g = gen_random("undir", n, rng.randint(0, n * (n - 1) // 2), seed)
            sq = undir_square(g)
            t2 = random_binary_tree(sq.squared, rng)
            assert validate_undir_tree(sq.squared, t2)
            p = undir_project(sq, t2)
            if p is not None:
                assert validate_undir_tree(g, p)
                assert p.vertices == t2.vertices & set(range(g.n))
            ex = undir_extract(sq, t2)
            assert validate_undir_tree(g, ex.tree)
            assert ex.forest_count <= 2 * ex.projection_size + 1

    def test_oracle_trees_in_tiny_squares(self):
        for g in (UGraph(1, ()), UGraph(2, ()), UGraph(2, ((0, 1),))):
            sq = undir_square(g)
            t2 = brute_mbt_undirected(sq.squared).tree
            ex = undir_extract(sq, t2)
            assert validate_undir_tree(g, ex.tree)
            assert ex.forest_count <= 2 * ex.projection_size + 1


class TestBoostLoop:
    def test_exact_oracle(self):
        g = star_ugraph(4)
        res = undir_boost_solve(g, lambda h: brute_mbt_undirected(h).tree, 0.5)
        assert res.k_used == 0 and res.tree.size == 4

    def test_one_round(self):
        g = path_ugraph(3)
        res = undir_boost_solve(g, lambda h: solve_unrooted_tw(h).tree, 0.75, alpha=0.25)
        assert res.k_used == 1 and res.sizes == (3, 27)
        assert res.tree.size == 3 and validate_undir_tree(g, res.tree)

    def test_guard(self):
        res = undir_boost_solve(path_ugraph(3), lambda h: UndirBinaryTree(frozenset({0})), 0.1, alpha=0.5, limit=30)
        assert res.k_used == 1 < res.k_formula


class TestPendants:
    def test_counts(self):
        g = gen_random("undir", 5, 6, 1)
        aug = pendant_augment(g)
        assert aug.graph.n == 10 and aug.graph.m == 11
        assert all(aug.graph.has_edge(v, aug.pendant(v)) for v in range(5))

    def test_caterpillar_spans(self):
        n = 6
        g = path_ugraph(n)
        aug = pendant_augment(g)
        cat = UndirBinaryTree(frozenset(), frozenset(set(g.edges) | {(v, aug.pendant(v)) for v in range(n)}))
        assert cat.size == 2 * n and validate_undir_tree(aug.graph, cat)
        assert aug.restrict(cat) == whole(g)

    def test_restrict_drops_only_pendants(self):
        rng = random.Random(3)
        for seed in range(20):
            g = gen_random("undir", 6, 8, seed)
            aug = pendant_augment(g)
            t = random_binary_tree(aug.graph, rng)
            r = aug.restrict(t)
            if r is None:
                assert all(v >= 6 for v in t.vertices)
                continue
            assert r.vertices == {v for v in t.vertices if v < 6}
            assert validate_undir_tree(g, r)


class TestTreeToPath:
    def test_path_is_kept(self):
        g = path_ugraph(5)
        order = tree_to_path(whole(g))
        assert order in ([0, 1, 2, 3, 4], [4, 3, 2, 1, 0])

    def test_claw(self):
        inst = Tsp12Instance(4, frozenset({(1, 2), (1, 3), (2, 3)}))
        t = whole(star_ugraph(3))
        order = tree_to_path(t)
        assert sorted(order) == [0, 1, 2, 3]
        assert inst.path_weight(order) <= tree_weight(inst, t) + 1

    def test_random_bound(self):
        rng = random.Random(5)
        k8 = complete_ugraph(8)
        for _ in range(1000):
            t = random_binary_tree(k8, rng, limit=rng.randint(1, 8))
            heavy = frozenset(e for e in k8.edges if rng.random() < 0.5)
            inst = Tsp12Instance(8, heavy)
            order = tree_to_path(t)
            assert sorted(order) == sorted(t.vertices)
            d3 = sum(1 for d in t.degrees().values() if d == 3)
            assert inst.path_weight(order) <= tree_weight(inst, t) + d3

    @pytest.mark.parametrize("n", range(1, 7))
    def test_every_small_tree(self, n):
        rng = random.Random(n)
        kn = complete_ugraph(n)
        for t in labeled_binary_trees(n):
            inst = Tsp12Instance(n, frozenset(e for e in kn.edges if rng.random() < 0.5))
            order = tree_to_path(t)
            d3 = sum(1 for d in t.degrees().values() if d == 3)
            assert sorted(order) == list(range(n))
            assert inst.path_weight(order) <= tree_weight(inst, t) + d3


class TestTsp:
    def test_four_cycle(self):
        heavy = frozenset({(0, 2), (1, 3)})
        res = tsp12_tour(Tsp12Instance(4, heavy), exact_tree, 0.1)
        assert sorted(res.tour) == [0, 1, 2, 3] and res.weight <= 5

    def test_all_light(self):
        res = tsp12_tour(Tsp12Instance(5, frozenset()), exact_tree, 0.1)
        assert res.weight == 5

    def test_path_only_still_valid(self):
        n = 5
        light = set(path_ugraph(n).edges)
        heavy = frozenset(e for e in itertools.combinations(range(n), 2) if e not in light)
        res = tsp12_tour(Tsp12Instance(n, heavy), exact_tree, 0.1)
        assert sorted(res.tour) == list(range(n))
        assert res.weight == Tsp12Instance(n, heavy).tour_weight(res.tour)

    def test_invalid_solver_output(self):
        with pytest.raises(GraphError):
            tsp12_tour(Tsp12Instance(3, frozenset()), lambda g, e: UndirBinaryTree(frozenset({0, 1})), 0.1)

    def test_format_round_trip(self):
        inst = Tsp12Instance(5, frozenset({(0, 3), (2, 4)}))
        text = write_tsp12(inst)
        assert text.startswith("tsp12 5\n")
        assert read_tsp12(text) == inst

    @pytest.mark.parametrize("text", ["", "tsp 3\n", "tsp12 3\n0 5 2\n", "tsp12 3\n0 1 3\n", "tsp12 3\n0 1\n"])
    def test_format_errors(self, text):
        with pytest.raises(ParseError):
            read_tsp12(text)
