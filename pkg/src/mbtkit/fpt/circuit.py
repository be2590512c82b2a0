"""Arithmetic circuits over GF(2^l) and the binary-tree polynomial builder."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from ..graph import Digraph, GraphError
from .field import GF2Field

VAR, CONST, PARAM, ADD, MUL = range(5)
OP_NAMES = {VAR: "var", CONST: "const", PARAM: "param", ADD: "add", MUL: "mul"}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    op: int
    args: tuple[int, ...]
    value: int = 0  # variable index, constant, or parameter slot
    mindeg: int = 0
    maxdeg: int = 0


@dataclass
class Circuit:
    """Topologically ordered gates; ``params`` hold overridable scalar defaults.

    Variables are numbered 0..num_vars-1. ``var_names`` is informational.
    """

    gates: list[Gate]
    output: int
    num_vars: int
    params: list[int] = field(default_factory=list)
    var_names: list[str] = field(default_factory=list)
    param_names: list[object] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def degree(self) -> int:
        return self.gates[self.output].maxdeg

    @property
    def is_homogeneous(self) -> bool:
        g = self.gates[self.output]
        return g.mindeg == g.maxdeg

    def compiled(self) -> CompiledCircuit:
        cached = getattr(self, "_compiled", None)
        if cached is None:
            cached = CompiledCircuit.from_circuit(self)
            self._compiled = cached
        return cached

    def evaluate(self, inputs: Sequence, params: Sequence | None, ring: Ring):
        """Generic evaluation; ``ring`` supplies the arithmetic."""
        if params is None:
            params = self.params
        vals: list = [None] * len(self.gates)
        for i, g in enumerate(self.gates):
            if g.op == VAR:
                vals[i] = inputs[g.value]
            elif g.op == CONST:
                vals[i] = ring.const(g.value)
            elif g.op == PARAM:
                vals[i] = ring.const(params[g.value])
            elif g.op == ADD:
                acc = vals[g.args[0]]
                for j in g.args[1:]:
                    acc = ring.add(acc, vals[j])
                vals[i] = acc
            else:
                vals[i] = ring.mul(vals[g.args[0]], vals[g.args[1]])
        return vals[self.output]


@dataclass(frozen=True)
class Ring:
    const: Callable
    add: Callable
    mul: Callable


class CircuitBuilder:
    def __init__(self, num_vars: int, var_names: Sequence[str] | None = None):
        self.num_vars = num_vars
        self.var_names = list(var_names) if var_names else [f"x{i}" for i in range(num_vars)]
        self.gates: list[Gate] = []
        self.params: list[int] = []
        self.param_names: list[object] = []
        self._vars: dict[int, int] = {}
        self._consts: dict[int, int] = {}

    def _push(self, gate: Gate) -> int:
        self.gates.append(gate)
        return len(self.gates) - 1

    def var(self, i: int) -> int:
        if not 0 <= i < self.num_vars:
            raise CircuitError(f"variable {i} out of range")
        if i not in self._vars:
            self._vars[i] = self._push(Gate(VAR, (), i, 1, 1))
        return self._vars[i]

    def const(self, c: int) -> int:
        if c not in self._consts:
            self._consts[c] = self._push(Gate(CONST, (), c))
        return self._consts[c]

    def param(self, default: int, name: object = None) -> int:
        self.params.append(default)
        self.param_names.append(name)
        return self._push(Gate(PARAM, (), len(self.params) - 1))

    def add(self, ids: Sequence[int]) -> int:
        ids = list(ids)
        if not ids:
            raise CircuitError("empty sum; use const(0)")
        if len(ids) == 1:
            return ids[0]
        self._check(ids)
        lo = min(self.gates[i].mindeg for i in ids)
        hi = max(self.gates[i].maxdeg for i in ids)
        return self._push(Gate(ADD, tuple(ids), 0, lo, hi))

    def mul(self, a: int, b: int) -> int:
        self._check((a, b))
        ga, gb = self.gates[a], self.gates[b]
        return self._push(Gate(MUL, (a, b), 0, ga.mindeg + gb.mindeg, ga.maxdeg + gb.maxdeg))

    def prod(self, ids: Sequence[int]) -> int:
        ids = list(ids)
        if not ids:
            return self.const(1)
        acc = ids[0]
        for j in ids[1:]:
            acc = self.mul(acc, j)
        return acc

    def _check(self, ids) -> None:
        for i in ids:
            if not 0 <= i < len(self.gates):
                raise CircuitError(f"gate {i} referenced before definition")

    def build(self, output: int) -> Circuit:
        return Circuit(list(self.gates), output, self.num_vars, list(self.params), self.var_names, list(self.param_names))


@dataclass(frozen=True)
class CompiledCircuit:
    """Flat arrays for the jitted evaluator."""

    op: np.ndarray
    a: np.ndarray
    b: np.ndarray
    value: np.ndarray
    argptr: np.ndarray
    args: np.ndarray
    output: int
    num_vars: int

    @classmethod
    def from_circuit(cls, c: Circuit) -> CompiledCircuit:
        n = len(c.gates)
        op = np.empty(n, dtype=np.int8)
        a = np.zeros(n, dtype=np.int64)
        b = np.zeros(n, dtype=np.int64)
        value = np.zeros(n, dtype=np.uint64)
        argptr = np.zeros(n + 1, dtype=np.int64)
        flat: list[int] = []
        for i, g in enumerate(c.gates):
            op[i] = g.op
            value[i] = g.value
            if g.op == MUL:
                a[i], b[i] = g.args
            elif g.op in (VAR, PARAM):
                a[i] = g.value
            if g.op == ADD:
                flat.extend(g.args)
            argptr[i + 1] = len(flat)
        return cls(op, a, b, value, argptr, np.asarray(flat, dtype=np.int64), c.output, c.num_vars)


# ---------------------------------------------------------------------------
# binary-tree polynomial


@dataclass
class TreePolyCircuit:
    circuit: Circuit
    k: int
    graph: Digraph
    arc_param: dict[tuple[int, int], int]  # arc -> parameter slot
    y_var: int


def build_circuit(
    g: Digraph,
    k: int,
    fingerprints: Mapping[tuple[int, int], int] | None = None,
    root: int | None = None,
) -> TreePolyCircuit:
    """Circuit for y * sum_v P_v^(k) (or y * P_root^(k) when ``root`` is given).

    Children of a vertex are canonicalized so every tree shape appears once:
    child subtree sizes a < b are summed over ordered vertex pairs, equal
    sizes only over pairs u1 < u2. Arc (u,v) carries the scalar parameter
    rho_uv (default from ``fingerprints``, else 1).
    """
    if k < 1:
        raise GraphError("k must be at least 1")
    if root is not None and not 0 <= root < g.n:
        raise GraphError(f"root {root} outside [0,{g.n})")
    fingerprints = fingerprints or {}
    n = g.n
    cb = CircuitBuilder(n + 1, [f"x{v}" for v in range(n)] + ["y"])
    y = cb.var(n)
    arc_param, rho = {}, {}
    for arc in g.arcs:
        arc_param[arc] = len(cb.params)
        rho[arc] = cb.param(int(fingerprints.get(arc, 1)), arc)
    x = [cb.var(v) for v in range(n)]
    ypow = {0: None, 1: y}
    for j in range(2, k):
        ypow[j] = cb.mul(ypow[j - 1], y)

    ins = [sorted(g.in_adj[v]) for v in range(n)]
    P: dict[tuple[int, int], int] = {(v, 1): x[v] for v in range(n)}
    term: dict[tuple[int, int, int], int] = {}  # rho_uv * P_u^(a)
    Q: dict[tuple[int, int], int] = {}

    def t(u: int, v: int, a: int) -> int:
        key = (u, v, a)
        if key not in term:
            term[key] = cb.mul(rho[(u, v)], P[(u, a)])
        return term[key]

    def q(v: int, a: int) -> int:
        if (v, a) not in Q:
            Q[(v, a)] = cb.add([t(u, v, a) for u in ins[v]])
        return Q[(v, a)]

    for s in range(2, k + 1):
        for v in range(n):
            if not ins[v]:
                P[(v, s)] = cb.mul(x[v], ypow[s - 1])
                continue
            parts = [q(v, s - 1)]
            rest = s - 1
            for a in range(1, rest // 2 + 1):
                b = rest - a
                if a < b:
                    parts.append(cb.mul(q(v, a), q(v, b)))
                elif len(ins[v]) >= 2:
                    prefix = t(ins[v][0], v, a)
                    pairs = []
                    for u2 in ins[v][1:]:
                        pairs.append(cb.mul(t(u2, v, a), prefix))
                        prefix = cb.add([prefix, t(u2, v, a)])
                    parts.append(cb.add(pairs))
            P[(v, s)] = cb.mul(x[v], cb.add(parts))

    tops = [P[(root, k)]] if root is not None else [P[(v, k)] for v in range(n)]
    if not tops:
        out = cb.const(0)
    else:
        out = cb.mul(y, cb.add(tops))
    return TreePolyCircuit(cb.build(out), k, g, arc_param, n)


# ---------------------------------------------------------------------------
# symbolic expansion (test oracle)

Monomial = tuple[int, ...]


class ExpansionTooLarge(CircuitError):
    pass


def expand_symbolic(
    c: Circuit,
    field_: GF2Field | None = None,
    params: Sequence[int] | None = None,
    max_terms: int = 50_000,
) -> dict[Monomial, int]:
    """Sum-of-products expansion as {exponent tuple: coefficient}.

    Without ``field_`` coefficients are integers (parameters lifted as
    plain ints); with it they live in GF(2^l).
    """
    nv = c.num_vars
    if field_ is None:
        fadd = lambda p, q: p + q  # noqa: E731
        fmul = lambda p, q: p * q  # noqa: E731
    else:
        fadd, fmul = field_.add, field_.mul

    def clean(d: dict) -> dict:
        out = {m: co for m, co in d.items() if co != 0}
        if len(out) > max_terms:
            raise ExpansionTooLarge(f"expansion exceeds {max_terms} terms")
        return out

    zero_mono = (0,) * nv

    def const(v: int):
        return clean({zero_mono: v})

    def add(p, q):
        out = dict(p)
        for m, co in q.items():
            out[m] = fadd(out.get(m, 0), co)
        return clean(out)

    def mul(p, q):
        out: dict = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                m = tuple(i + j for i, j in zip(m1, m2))
                out[m] = fadd(out.get(m, 0), fmul(c1, c2))
        return clean(out)

    inputs = [clean({tuple(1 if j == i else 0 for j in range(nv)): 1}) for i in range(nv)]
    return c.evaluate(inputs, params, Ring(const, add, mul))


def multilinear_terms(poly: Mapping[Monomial, int]) -> dict[Monomial, int]:
    return {m: co for m, co in poly.items() if all(e <= 1 for e in m)}
