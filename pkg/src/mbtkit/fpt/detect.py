"""Randomized multilinear-term detection and the k-binary-tree decision/search.

Each input variable x_i is replaced by r_i * (e_0 + e_{v_i}) in the group
algebra GF(2^l)[Z_2^d]; squares of such elements vanish, so only multilinear
monomials survive, and those with linearly independent v's survive intact.

For a circuit homogeneous of degree d = dim the group-algebra value is a
constant vector c * (1, ..., 1), and c can be read off with 2^d plain field
evaluations: c = sum over s in Z_2^d of C(x_i = r_i * <s, v_i>). A degree-d
monomial contributes the number of s solving <s, v_i> = 1 for all its
variables, which is odd exactly when its v's are independent (and never for
a repeated variable). Non-homogeneous circuits fall back to explicit
XOR-convolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from ..graph import Digraph, DirBinaryTree, GraphError, validate_dir_tree
from .circuit import Circuit, CircuitError, build_circuit
from .field import GF2Field, gf_mul_u64
from .group_algebra import xor_convolve

PER_TRIAL_SUCCESS = 0.25


def trials_for(delta: float) -> int:
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    return max(1, math.ceil(math.log(1 / delta) / PER_TRIAL_SUCCESS))


@numba.njit(cache=True)
def _eval_sum_over_cube(op, a, b, value, argptr, args, out, params, r, vv, dim, bits, tail):
    ng = op.shape[0]
    nv = r.shape[0]
    vals = np.zeros(ng, dtype=np.uint64)
    xs = np.zeros(nv, dtype=np.uint64)
    total = np.uint64(0)
    for s in range(1 << dim):
        su = np.uint64(s)
        for i in range(nv):
            w = su & vv[i]
            par = 0
            while w:
                par ^= 1
                w &= w - np.uint64(1)
            xs[i] = r[i] if par else np.uint64(0)
        for g in range(ng):
            o = op[g]
            if o == 0:
                vals[g] = xs[a[g]]
            elif o == 1:
                vals[g] = value[g]
            elif o == 2:
                vals[g] = params[a[g]]
            elif o == 3:
                acc = np.uint64(0)
                for j in range(argptr[g], argptr[g + 1]):
                    acc ^= vals[args[j]]
                vals[g] = acc
            else:
                x = vals[a[g]]
                y = vals[b[g]]
                if x == 0 or y == 0:
                    vals[g] = np.uint64(0)
                else:
                    vals[g] = gf_mul_u64(x, y, bits, tail)
        total ^= vals[out]
    return total


@numba.njit(cache=True)
def _eval_group_algebra(op, a, b, value, argptr, args, out, params, r, vv, dim, bits, tail):
    ng = op.shape[0]
    size = 1 << dim
    vals = np.zeros((ng, size), dtype=np.uint64)
    for g in range(ng):
        o = op[g]
        if o == 0:
            vals[g, 0] = r[a[g]]
            vals[g, vv[a[g]]] ^= r[a[g]]
        elif o == 1:
            vals[g, 0] = value[g]
        elif o == 2:
            vals[g, 0] = params[a[g]]
        elif o == 3:
            for j in range(argptr[g], argptr[g + 1]):
                src = args[j]
                for t in range(size):
                    vals[g, t] ^= vals[src, t]
        else:
            vals[g, :] = xor_convolve(vals[a[g]], vals[b[g]], bits, tail)
    return vals[out].copy()


@dataclass(frozen=True)
class DetectResult:
    answer: bool
    trials: int
    method: str


def _draw(field: GF2Field, rng: np.random.Generator, nvars: int, dim: int):
    r = field.random(rng, nvars)
    vv = rng.integers(1, 1 << dim, size=nvars, dtype=np.uint64)
    return r, vv


def evaluate_group_algebra(c: Circuit, field: GF2Field, r, vv, dim: int, params=None) -> np.ndarray:
    """Coefficient vector of the circuit under x_i = r_i (e_0 + e_{v_i})."""
    cc = c.compiled()
    p = np.asarray(c.params if params is None else params, dtype=np.uint64)
    return _eval_group_algebra(
        cc.op, cc.a, cc.b, cc.value, cc.argptr, cc.args, cc.output, p,
        np.asarray(r, dtype=np.uint64), np.asarray(vv, dtype=np.uint64), dim, field.bits, np.uint64(field.tail),
    )


def evaluate_cube_sum(c: Circuit, field: GF2Field, r, vv, dim: int, params=None) -> int:
    """The scalar c with group-algebra value c * all-ones (homogeneous circuits)."""
    cc = c.compiled()
    p = np.asarray(c.params if params is None else params, dtype=np.uint64)
    return int(_eval_sum_over_cube(
        cc.op, cc.a, cc.b, cc.value, cc.argptr, cc.args, cc.output, p,
        np.asarray(r, dtype=np.uint64), np.asarray(vv, dtype=np.uint64), dim, field.bits, np.uint64(field.tail),
    ))


def detect_multilinear(
    c: Circuit,
    dim: int | None = None,
    delta: float = 1e-3,
    seed: int | np.random.Generator | None = 0,
    field: GF2Field | None = None,
    method: str = "auto",
    param_sampler=None,
    trials: int | None = None,
) -> DetectResult:
    """One-sided test for a multilinear monomial with nonzero coefficient.

    ``param_sampler(rng)`` may return fresh parameter values for each trial.
    """
    field = field or GF2Field()
    if dim is None:
        dim = c.degree
    if c.degree > dim:
        raise CircuitError(f"circuit degree {c.degree} exceeds {dim}")
    if dim > 62:
        raise CircuitError("group dimension too large")
    if method == "auto":
        method = "cube" if c.is_homogeneous and c.degree == dim else "group"
    if method == "cube" and not (c.is_homogeneous and c.degree == dim):
        raise CircuitError("cube-sum evaluation needs a circuit homogeneous of degree dim")
    if method not in ("cube", "group"):
        raise ValueError(f"unknown method {method!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    total = trials if trials is not None else trials_for(delta)
    for t in range(1, total + 1):
        params = param_sampler(rng) if param_sampler else None
        r, vv = _draw(field, rng, c.num_vars, dim)
        if method == "cube":
            hit = evaluate_cube_sum(c, field, r, vv, dim, params) != 0
        else:
            hit = bool(evaluate_group_algebra(c, field, r, vv, dim, params).any())
        if hit:
            return DetectResult(True, t, method)
    return DetectResult(False, total, method)


# ---------------------------------------------------------------------------
# k-binary-tree


class _TreeDetector:
    """Circuit for one (graph, k) reused across arc deletions.

    Deleting an arc is the same as pinning its fingerprint to zero.
    """

    def __init__(self, g: Digraph, k: int, field: GF2Field):
        self.g, self.k, self.field = g, k, field
        self.tp = build_circuit(g, k)
        self.slots = np.array([self.tp.arc_param[a] for a in g.arcs], dtype=np.int64)

    def decide(self, alive: np.ndarray, delta: float, rng: np.random.Generator) -> bool:
        slots, field = self.slots, self.field

        def sampler(rg):
            p = np.zeros(len(self.tp.circuit.params), dtype=np.uint64)
            p[slots] = field.random(rg, len(slots)) * alive
            return p

        return detect_multilinear(self.tp.circuit, self.k + 1, delta, rng, field, "cube", sampler).answer


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def decide_k_binary_tree(g: Digraph, k: int, delta: float = 1e-3, seed=0, field_bits: int = 64) -> bool:
    """Yes (w.p. >= 1 - delta) iff some binary tree on k vertices exists; never a false yes."""
    if k < 1:
        raise GraphError("k must be at least 1")
    if k > g.n:
        return False
    det = _TreeDetector(g, k, GF2Field(field_bits))
    return det.decide(np.ones(len(g.arcs), dtype=np.uint64), delta, _rng(seed))


class SearchFailed(RuntimeError):
    pass


def search_k_binary_tree(
    g: Digraph,
    k: int,
    delta: float = 1e-3,
    seed=0,
    field_bits: int = 64,
    attempts: int = 3,
) -> DirBinaryTree | None:
    """A k-vertex binary tree, or None when the decision says no.

    Arcs are tried in order; an arc is deleted whenever a k-tree survives its
    deletion. The arcs left over are then exactly one tree.
    """
    if k < 1:
        raise GraphError("k must be at least 1")
    if k > g.n:
        return None
    rng = _rng(seed)
    det = _TreeDetector(g, k, GF2Field(field_bits))
    m = len(g.arcs)
    if not det.decide(np.ones(m, dtype=np.uint64), delta, rng):
        return None
    if k == 1:
        return DirBinaryTree(0, frozenset())
    sub_delta = delta / max(m, 1)
    for _ in range(attempts):
        alive = np.ones(m, dtype=np.uint64)
        for i in range(m):
            alive[i] = 0
            if not det.decide(alive, sub_delta, rng):
                alive[i] = 1
        arcs = [g.arcs[i] for i in range(m) if alive[i]]
        tree = _as_tree(g, arcs, k)
        if tree is not None:
            return tree
    raise SearchFailed(f"no valid {k}-vertex tree recovered after {attempts} passes")


def _as_tree(g: Digraph, arcs, k: int) -> DirBinaryTree | None:
    if len(arcs) != k - 1:
        return None
    tails = {u for u, _ in arcs}
    roots = {v for _, v in arcs} - tails
    if len(roots) != 1:
        return None
    t = DirBinaryTree(roots.pop(), frozenset(arcs))
    if t.size != k or not validate_dir_tree(g, t):
        return None
    return t
