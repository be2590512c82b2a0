from __future__ import annotations

import itertools
import random

import pytest

from mbtkit.graph import GraphError, permutation_dag, validate_dir_tree
from mbtkit.heapable import is_heapable, is_heapable_exhaustive, longest_heapable, parse_sequence
from mbtkit.oracle import brute_mbt_directed_any_root


def longest_by_subsets(seq) -> int:
    n = len(seq)
    for k in range(n, 0, -1):
        for idx in itertools.combinations(range(n), k):
            if is_heapable_exhaustive([seq[i] for i in idx]):
                return k
    return 0


class TestDecision:
    def test_examples(self):
        assert is_heapable((1, 3, 2, 4))
        assert is_heapable(range(8))
        assert not is_heapable((2, 1, 3))
        assert is_heapable(())
        assert is_heapable((5,))

    def test_trace(self):
        tr = is_heapable((1, 3, 2, 4))
        assert tr.parents == (None, 1, 1, 3)
        bad = is_heapable((1, 2, 3, 4, 0))
        assert not bad and bad.failed_at == 4

    def test_slot_exhaustion(self):
        # root 1 must take both 5 and 4, leaving no slot for 2
        assert not is_heapable((1, 5, 4, 2))
        assert is_heapable((1, 5, 2, 4))

    def test_greedy_matches_exhaustive(self):
        for n in range(1, 8):
            for p in itertools.permutations(range(n)):
                assert bool(is_heapable(p)) == is_heapable_exhaustive(p), p

    def test_duplicates_rejected(self):
        with pytest.raises(GraphError):
            is_heapable((1, 2, 1))
        with pytest.raises(GraphError):
            is_heapable_exhaustive((3, 3))


class TestLongest:
    def test_examples(self):
        assert longest_heapable((1, 3, 2, 4)).length == 4
        assert longest_heapable(tuple(range(6))).length == 6
        assert longest_heapable((5, 4, 3, 2, 1)).length == 1

    def test_first_element_may_be_skipped(self):
        res = longest_heapable((2, 0, 1))
        assert res.length == 2 and res.values == (0, 1)

    def test_result_shape(self):
        seq = (4, 1, 7, 3, 8, 2, 9)
        res = longest_heapable(seq)
        assert res.positions == tuple(sorted(res.positions))
        assert res.values == tuple(seq[i] for i in res.positions)
        assert is_heapable(res.values)
        assert validate_dir_tree(permutation_dag(seq), res.tree)
        assert res.to_json()["length"] == res.length

    def test_matches_subset_search(self):
        for n in range(1, 7):
            for p in itertools.permutations(range(n)):
                assert longest_heapable(p).length == longest_by_subsets(p), p

    def test_equals_any_root_mbt(self):
        rng = random.Random(1)
        for _ in range(40):
            p = list(range(9))
            rng.shuffle(p)
            assert longest_heapable(p).length == brute_mbt_directed_any_root(permutation_dag(p)).size

    def test_reals(self):
        assert longest_heapable((0.5, 2.25, -1.0, 1.5)).length == 3

    def test_fpt_solver(self):
        rng = random.Random(2)
        for seed in range(6):
            p = list(range(7))
            rng.shuffle(p)
            assert longest_heapable(p, solver="fpt", seed=seed).length == longest_heapable(p).length

    def test_errors(self):
        with pytest.raises(GraphError):
            longest_heapable(())
        with pytest.raises(GraphError):
            longest_heapable((1, 1))
        with pytest.raises(GraphError):
            longest_heapable((1, 2), solver="dp")


class TestParse:
    def test_mixed(self):
        assert parse_sequence("3 1\n2.5  -4") == [3, 1, 2.5, -4]

    def test_bad_token(self):
        with pytest.raises(GraphError):
            parse_sequence("1 two 3")
