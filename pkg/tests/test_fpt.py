from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

from helpers import binary_in_tree
from mbtkit.fpt.circuit import CircuitBuilder, CircuitError, build_circuit, expand_symbolic, multilinear_terms
from mbtkit.fpt.detect import (
    decide_k_binary_tree,
    detect_multilinear,
    evaluate_cube_sum,
    evaluate_group_algebra,
    search_k_binary_tree,
    trials_for,
)
from mbtkit.fpt.field import DEFAULT_TAILS, GF2Field, is_irreducible
from mbtkit.fpt.group_algebra import GroupAlgebraElement, lift_variable
from mbtkit.graph import Digraph, DirBinaryTree, GraphError, gen_random, validate_dir_tree
from mbtkit.oracle import brute_mbt_directed_any_root

F64 = GF2Field(64)
F16 = GF2Field(16)


def mono(nvars: int, ones) -> tuple[int, ...]:
    return tuple(1 if i in ones else 0 for i in range(nvars))


def count_rooted_trees(g: Digraph, S: frozenset[int], r: int) -> int:
    """Distinct r-rooted binary trees with vertex set exactly S (parent choice per vertex)."""
    others = sorted(S - {r})
    choices = [[w for w in g.out_adj[v] if w in S] for v in others]
    total = 0
    for pick in itertools.product(*choices):
        t = DirBinaryTree(r, frozenset(zip(others, pick)))
        if t.vertices == S and validate_dir_tree(g, t):
            total += 1
    return total


class TestField:
    @pytest.mark.parametrize("bits", sorted(DEFAULT_TAILS))
    def test_default_moduli_irreducible(self, bits):
        assert is_irreducible(GF2Field(bits).modulus)

    def test_reducible_detected(self):
        assert not is_irreducible(0b101)  # x^2 + 1 = (x + 1)^2

    def test_axioms(self):
        rng = random.Random(1)
        for f in (F16, F64):
            for _ in range(200):
                a, b, c = (rng.randrange(f.order) for _ in range(3))
                assert f.add(a, a) == 0
                assert f.mul(a, b) == f.mul(b, a)
                assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
                assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
                assert f.mul(a, 1) == a
                if a:
                    assert f.mul(a, f.inv(a)) == 1

    def test_jit_multiply_matches_reference(self):
        rng = random.Random(2)
        for f in (GF2Field(8), F16, GF2Field(32), F64):
            for _ in range(200):
                a, b = rng.randrange(f.order), rng.randrange(f.order)
                assert f.mul_fast(a, b) == f.mul(a, b)

    def test_multiplicative_group_order(self):
        f = GF2Field(8)
        assert all(f.pow(a, 255) == 1 for a in range(1, 256))

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            GF2Field(12)
        with pytest.raises(ZeroDivisionError):
            F16.inv(0)


class TestGroupAlgebra:
    @pytest.mark.parametrize("dim", range(1, 14))
    def test_square_vanishing(self, dim):
        rng = np.random.default_rng(dim)
        vs = range(1, 1 << dim) if dim <= 6 else rng.integers(1, 1 << dim, size=12)
        for v in vs:
            x = lift_variable(F64, dim, F64.random(rng) | 1, int(v))
            assert (x * x).is_zero()

    def _rand(self, rng, dim):
        return GroupAlgebraElement(F64, dim, F64.random(rng, 1 << dim))

    def test_ring_laws(self):
        rng = np.random.default_rng(3)
        for dim in (1, 3, 5):
            for _ in range(10):
                a, b, c = (self._rand(rng, dim) for _ in range(3))
                assert a * b == b * a
                assert (a * b) * c == a * (b * c)
                assert a * (b + c) == a * b + a * c
                one = GroupAlgebraElement.scalar(F64, dim, 1)
                assert a * one == a

    def test_convolution_definition(self):
        rng = np.random.default_rng(4)
        dim = 3
        a, b = self._rand(rng, dim), self._rand(rng, dim)
        prod = a * b
        for w in range(8):
            acc = 0
            for u in range(8):
                acc ^= F64.mul(int(a.coeffs[u]), int(b.coeffs[u ^ w]))
            assert int(prod.coeffs[w]) == acc

    def test_independent_product_survives(self):
        # independent v's give a nonzero product
        x = [lift_variable(F64, 3, 1, v) for v in (1, 2, 4)]
        assert not (x[0] * x[1] * x[2]).is_zero()
        # a dependent triple (3 = 1 xor 2) cancels
        y = [lift_variable(F64, 3, 1, v) for v in (1, 2, 3)]
        assert (y[0] * y[1] * y[2]).is_zero()


class TestCircuit:
    def test_k1_is_variable(self):
        g = Digraph(2, ((0, 1),))
        poly = expand_symbolic(build_circuit(g, 1, root=1).circuit)
        assert poly == {mono(3, {1, 2}): 1}  # y * x_1

    def test_source_vertex_power_of_y(self):
        g = Digraph(2, ((0, 1),))
        poly = expand_symbolic(build_circuit(g, 3, root=0).circuit)
        # y * x_0 * y^2
        assert poly == {(1, 0, 3): 1}

    def test_single_arc_k2(self):
        g = Digraph(2, ((0, 1),))
        poly = expand_symbolic(build_circuit(g, 2, root=1).circuit)
        assert poly == {mono(3, {0, 1, 2}): 1}

    def test_chain_monomial_coefficient_one(self):
        g = Digraph(2, ((0, 1),))
        poly = expand_symbolic(build_circuit(g, 2).circuit)
        assert poly[mono(3, {0, 1, 2})] == 1

    def test_diamond_counted_once(self):
        g = Digraph(4, ((0, 1), (0, 2), (1, 3), (2, 3)))
        poly = expand_symbolic(build_circuit(g, 3, root=3).circuit)
        assert poly[mono(5, {1, 2, 3, 4})] == 1
        assert poly[mono(5, {0, 1, 3, 4})] == 1

    def test_no_arcs_no_multilinear_pair(self):
        poly = expand_symbolic(build_circuit(Digraph(3, ()), 2).circuit)
        ml = multilinear_terms(poly)
        assert not any(sum(m[:3]) == 2 and m[3] == 1 for m in ml)

    def test_fingerprints_multiply_along_arcs(self):
        g = Digraph(3, ((0, 2), (1, 2)))
        poly = expand_symbolic(build_circuit(g, 3, {(0, 2): 5, (1, 2): 7}, root=2).circuit)
        assert poly[mono(4, {0, 1, 2, 3})] == 35

    def test_bad_k(self):
        with pytest.raises(GraphError):
            build_circuit(Digraph(1, ()), 0)

    def test_size_is_small(self):
        for n, k in ((8, 4), (12, 6)):
            g = gen_random("dir", n, 3 * n, n)
            c = build_circuit(g, k).circuit
            # O(k^2 n) vertex gates plus per-arc terms
            assert len(c) <= 4 * k * k * (n + g.m) + 10

    def test_homogeneous(self):
        rng = random.Random(5)
        for seed in range(20):
            n = rng.randint(1, 5)
            g = gen_random("dir", n, rng.randint(0, n * (n - 1)), seed)
            k = rng.randint(1, 4)
            c = build_circuit(g, k).circuit
            assert c.is_homogeneous and c.degree == k + 1
            for m in expand_symbolic(c):
                assert sum(m) == k + 1 and m[-1] >= 1

    def test_tree_correspondence(self):
        """Coefficient of y * prod_S x equals the number of r-rooted trees on S."""
        rng = random.Random(6)
        for seed in range(25):
            n = rng.randint(1, 5)
            g = gen_random("dir", n, rng.randint(0, min(10, n * (n - 1))), seed)
            for k in range(1, n + 1):
                for r in range(n):
                    poly = expand_symbolic(build_circuit(g, k, root=r).circuit)
                    ml = multilinear_terms(poly)
                    for S in itertools.combinations(range(n), k):
                        if r not in S:
                            continue
                        cnt = count_rooted_trees(g, frozenset(S), r)
                        assert ml.get(mono(n + 1, set(S) | {n}), 0) == cnt


def poly_circuit(monos):
    """Build sum of products; ``monos`` is a list of variable-index tuples."""
    nv = 1 + max(max(t) for t in monos)
    cb = CircuitBuilder(nv)
    terms = [cb.prod([cb.var(i) for i in t]) for t in monos]
    return cb.build(cb.add(terms))


class TestDetect:
    def test_mixed_example(self):
        # x1^2 x2 + x3 + x1 x2 x3
        c = poly_circuit([(0, 0, 1), (2,), (0, 1, 2)])
        assert detect_multilinear(c, 3, method="group").answer

    def test_square_never(self):
        cb = CircuitBuilder(1)
        x = cb.var(0)
        c = cb.build(cb.mul(x, x))
        for seed in range(20):
            assert not detect_multilinear(c, 2, seed=seed, trials=5).answer

    def test_binomial_square_never(self):
        cb = CircuitBuilder(2)
        s = cb.add([cb.var(0), cb.var(1)])
        c = cb.build(cb.mul(s, s))
        for seed in range(20):
            assert not detect_multilinear(c, 2, seed=seed, trials=5).answer

    def test_degree_overflow(self):
        c = poly_circuit([(0, 1, 2)])
        with pytest.raises(CircuitError):
            detect_multilinear(c, 2)

    def test_cube_needs_homogeneous(self):
        c = poly_circuit([(0,), (1, 2)])
        with pytest.raises(CircuitError):
            detect_multilinear(c, 2, method="cube")

    def test_cube_sum_equals_group_algebra(self):
        rng = np.random.default_rng(7)
        for seed in range(15):
            g = gen_random("dir", 5, 8, seed)
            k = 3
            c = build_circuit(g, k).circuit
            r = F64.random(rng, c.num_vars)
            vv = rng.integers(1, 1 << (k + 1), size=c.num_vars, dtype=np.uint64)
            params = F64.random(rng, len(c.params))
            ga = evaluate_group_algebra(c, F64, r, vv, k + 1, params)
            cs = evaluate_cube_sum(c, F64, r, vv, k + 1, params)
            assert (ga == np.uint64(cs)).all()

    def test_soundness_against_expansion(self):
        """Random small circuits: yes only when a multilinear term survives in GF(2^16)."""
        rng = random.Random(8)
        for trial in range(60):
            nv = rng.randint(1, 4)
            monos = [tuple(rng.randrange(nv) for _ in range(3)) for _ in range(rng.randint(1, 4))]
            cb = CircuitBuilder(nv)
            terms = [cb.mul(cb.const(rng.randrange(1, 4)), cb.prod([cb.var(i) for i in t])) for t in monos]
            c = cb.build(cb.add(terms))
            truth = bool(multilinear_terms(expand_symbolic(c, F16)))
            got = detect_multilinear(c, 3, delta=1e-4, seed=trial, field=F16).answer
            if not truth:
                assert not got
            else:
                assert got

    def test_trials_for(self):
        assert trials_for(1e-3) == 28
        with pytest.raises(ValueError):
            trials_for(0)


class TestDecideSearch:
    chain = Digraph(3, ((0, 1), (1, 2)))

    def test_chain(self):
        assert decide_k_binary_tree(self.chain, 3)
        for seed in range(5):
            assert not decide_k_binary_tree(self.chain, 4, seed=seed)

    def test_three_in_star_has_no_four_tree(self):
        g = Digraph(4, ((1, 0), (2, 0), (3, 0)))
        assert decide_k_binary_tree(g, 3)
        for seed in range(10):
            assert not decide_k_binary_tree(g, 4, seed=seed)

    def test_search_chain(self):
        t = search_k_binary_tree(self.chain, 3)
        assert t.root == 2 and t.arcs == frozenset(self.chain.arcs)

    def test_search_planted_tree(self):
        base = binary_in_tree(7)
        rng = random.Random(11)
        noise = set()
        while len(noise) < 5:
            u, v = rng.sample(range(7), 2)
            if (u, v) not in base.arc_set:
                noise.add((u, v))
        g = Digraph(7, base.arcs + tuple(sorted(noise)))
        t = search_k_binary_tree(g, 7, seed=3)
        assert t.size == 7 and validate_dir_tree(g, t)

    def test_search_no_tree(self):
        assert search_k_binary_tree(Digraph(3, ()), 2) is None

    def test_k_one(self):
        assert decide_k_binary_tree(Digraph(1, ()), 1)
        assert search_k_binary_tree(Digraph(2, ()), 1).size == 1

    def test_small_field(self):
        g = binary_in_tree(5)
        assert decide_k_binary_tree(g, 5, field_bits=16, seed=1)

    def test_bad_k(self):
        with pytest.raises(GraphError):
            decide_k_binary_tree(self.chain, 0)

    def test_matches_oracle(self):
        rng = random.Random(12)
        for seed in range(25):
            n = rng.randint(2, 8)
            g = gen_random("dir", n, rng.randint(0, min(2 * n, n * (n - 1))), seed)
            opt = brute_mbt_directed_any_root(g).size
            for k in (opt, opt + 1):
                got = decide_k_binary_tree(g, k, 1e-3, seed)
                assert got == (k <= opt)
