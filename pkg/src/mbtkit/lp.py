"""Cut-constraint IP for rooted binary trees in digraphs.

Arcs point from child to parent, so a chosen vertex u has at most two
incoming arcs (its children) and, unless it is the root, exactly one
outgoing arc. Families:

    in      sum_{in(u)} X <= 2 Y_u             every u
    out     sum_{out(u)} X  = Y_u              every u != r
    cut     sum_{out(S)} X >= Y_u              every S within V - {r}, u in S
    bounds  0 <= Y, X <= 1

Verification uses exact rationals. The cut family is never enumerated by
the verifier: for each u the minimum u->r cut under capacities X is found
with max-flow on integer capacities scaled by the common denominator.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterator

import networkx as nx

from .graph import Digraph, DirBinaryTree, GraphError

LP_CAP = 20


class LPRefused(GraphError):
    pass


def cut_constraint_count(n: int) -> int:
    """Pairs (S, u) with u in S and S a nonempty subset of the n-1 non-root vertices."""
    return (n - 1) * 2 ** (n - 2) if n >= 2 else 0


def _yname(v: int) -> str:
    return f"y_{v}"


def _xname(a: tuple[int, int]) -> str:
    return f"x_{a[0]}_{a[1]}"


def _sum(names: list[str]) -> str:
    return " + ".join(names)


def _lp_lines(g: Digraph, r: int, integer: bool) -> Iterator[str]:
    ins = [[] for _ in range(g.n)]
    outs = [[] for _ in range(g.n)]
    for a in g.arcs:
        outs[a[0]].append(a)
        ins[a[1]].append(a)
    yield "\\ maximum binary tree rooted at vertex %d" % r
    yield "Maximize"
    yield " obj: " + _sum([_yname(v) for v in range(g.n)])
    yield "Subject To"
    for u in range(g.n):
        lhs = [_xname(a) for a in ins[u]]
        yield f" in_{u}: " + _sum(lhs) + (" - " if lhs else "- ") + f"2 {_yname(u)} <= 0"
    for u in range(g.n):
        if u == r:
            continue
        lhs = [_xname(a) for a in outs[u]]
        yield f" out_{u}: " + _sum(lhs) + (" - " if lhs else "- ") + f"{_yname(u)} = 0"
    others = [v for v in range(g.n) if v != r]
    k = 0
    for size in range(1, len(others) + 1):
        for S in combinations(others, size):
            inside = set(S)
            leaving = [_xname(a) for a in g.arcs if a[0] in inside and a[1] not in inside]
            for u in S:
                k += 1
                yield f" cut_{k}: " + _sum(leaving) + (" - " if leaving else "- ") + f"{_yname(u)} >= 0"
    yield "Bounds"
    for v in range(g.n):
        yield f" 0 <= {_yname(v)} <= 1"
    for a in g.arcs:
        yield f" 0 <= {_xname(a)} <= 1"
    if integer:
        yield "Generals"
        yield " " + " ".join([_yname(v) for v in range(g.n)] + [_xname(a) for a in g.arcs])
    yield "End"


def emit_lp(g: Digraph, r: int, integer: bool = True, cap: int = LP_CAP) -> str:
    """The model in LP-file syntax; refuses above ``cap`` vertices."""
    if not 0 <= r < g.n:
        raise GraphError(f"root {r} outside [0,{g.n})")
    if g.n > cap:
        raise LPRefused(
            f"{g.n} vertices would need {cut_constraint_count(g.n)} cut constraints; emission is capped at n={cap}"
        )
    return "\n".join(_lp_lines(g, r, integer)) + "\n"


@dataclass
class FractionalSolution:
    Y: dict[int, Fraction]
    X: dict[tuple[int, int], Fraction]

    @property
    def objective(self) -> Fraction:
        return sum(self.Y.values(), Fraction(0))

    @classmethod
    def from_tree(cls, g: Digraph, t: DirBinaryTree) -> FractionalSolution:
        Y = {v: Fraction(int(v in t.vertices)) for v in range(g.n)}
        X = {a: Fraction(int(a in t.arcs)) for a in g.arcs}
        return cls(Y, X)

    @classmethod
    def uniform(cls, g: Digraph, y, x) -> FractionalSolution:
        return cls({v: Fraction(y) for v in range(g.n)}, {a: Fraction(x) for a in g.arcs})

    def to_json(self) -> dict:
        return {
            "Y": {str(v): str(q) for v, q in sorted(self.Y.items())},
            "X": [[u, v, str(q)] for (u, v), q in sorted(self.X.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> FractionalSolution:
        try:
            Y = {int(v): Fraction(str(q)) for v, q in data["Y"].items()}
            X = {(int(u), int(v)): Fraction(str(q)) for u, v, q in data["X"]}
        except (KeyError, ValueError, TypeError, ZeroDivisionError) as e:
            raise GraphError(f"malformed solution: {e}") from None
        return cls(Y, X)


def read_solution(text: str) -> FractionalSolution:
    try:
        return FractionalSolution.from_json(json.loads(text))
    except json.JSONDecodeError as e:
        raise GraphError(f"solution is not JSON: {e}") from None


@dataclass(frozen=True)
class Violation:
    family: str  # in / out / cut / bounds / unknown
    where: object
    lhs: Fraction
    rhs: Fraction

    def describe(self) -> str:
        return f"{self.family} at {self.where}: lhs {self.lhs} vs rhs {self.rhs}"


@dataclass
class FeasibilityReport:
    violations: list[Violation] = field(default_factory=list)
    objective: Fraction = Fraction(0)

    @property
    def feasible(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.feasible

    def to_json(self) -> dict:
        return {
            "feasible": self.feasible,
            "objective": str(self.objective),
            "violations": [
                {"family": v.family, "where": _jsonable(v.where), "lhs": str(v.lhs), "rhs": str(v.rhs)}
                for v in self.violations
            ],
        }


def _jsonable(x):
    if isinstance(x, (tuple, list, frozenset, set)):
        items = sorted(x) if isinstance(x, (set, frozenset)) else x
        return [_jsonable(i) for i in items]
    return x


def _min_cut(g: Digraph, X: dict, u: int, r: int) -> tuple[Fraction, frozenset[int]]:
    """Minimum X-weight of out(S) over S containing u and not r, with a minimizer."""
    scale = math.lcm(*(q.denominator for q in X.values())) if X else 1
    h = nx.DiGraph()
    h.add_nodes_from(range(g.n))
    for a in g.arcs:
        cap = int(X[a] * scale)
        if cap > 0:
            h.add_edge(a[0], a[1], capacity=cap)
    value, (side, _) = nx.minimum_cut(h, u, r)
    return Fraction(value, scale), frozenset(side)


def verify_fractional(g: Digraph, r: int, sol: FractionalSolution) -> FeasibilityReport:
    if not 0 <= r < g.n:
        raise GraphError(f"root {r} outside [0,{g.n})")
    rep = FeasibilityReport()
    bad = rep.violations
    arcs = set(g.arcs)
    for a in sorted(set(sol.X) - arcs):
        bad.append(Violation("unknown", a, sol.X[a], Fraction(0)))
    for v in sorted(set(sol.Y) - set(range(g.n))):
        bad.append(Violation("unknown", v, sol.Y[v], Fraction(0)))
    Y = {v: Fraction(sol.Y.get(v, 0)) for v in range(g.n)}
    X = {a: Fraction(sol.X.get(a, 0)) for a in g.arcs}
    rep.objective = sum(Y.values(), Fraction(0))
    for key, q in list(Y.items()) + list(X.items()):
        if q < 0:
            bad.append(Violation("bounds", key, q, Fraction(0)))
        elif q > 1:
            bad.append(Violation("bounds", key, q, Fraction(1)))
    in_sum = {v: Fraction(0) for v in range(g.n)}
    out_sum = {v: Fraction(0) for v in range(g.n)}
    for (u, v), q in X.items():
        out_sum[u] += q
        in_sum[v] += q
    for u in range(g.n):
        if in_sum[u] > 2 * Y[u]:
            bad.append(Violation("in", u, in_sum[u], 2 * Y[u]))
    for u in range(g.n):
        if u != r and out_sum[u] != Y[u]:
            bad.append(Violation("out", u, out_sum[u], Y[u]))
    if any(q < 0 for q in X.values()):
        return rep  # flow needs nonnegative capacities; bounds already reported
    for u in range(g.n):
        if u == r or Y[u] <= 0:
            continue
        cut, S = _min_cut(g, X, u, r)
        if cut < Y[u]:
            bad.append(Violation("cut", (u, tuple(sorted(S))), cut, Y[u]))
    return rep


def enumerate_cut_violations(g: Digraph, r: int, sol: FractionalSolution, cap: int = 12) -> list[tuple[frozenset[int], int]]:
    """All (S, u) breaking the cut family, by listing every subset (cross-check)."""
    if g.n > cap:
        raise LPRefused(f"subset enumeration capped at n={cap}")
    others = [v for v in range(g.n) if v != r]
    out = []
    for size in range(1, len(others) + 1):
        for S in combinations(others, size):
            inside = set(S)
            leaving = sum((Fraction(sol.X.get(a, 0)) for a in g.arcs if a[0] in inside and a[1] not in inside), Fraction(0))
            for u in S:
                if leaving < Fraction(sol.Y.get(u, 0)):
                    out.append((frozenset(S), u))
    return out


def integrality_gap_report(g: Digraph, r: int, sol: FractionalSolution, oracle_opt) -> Fraction:
    """(sum Y) / OPT: a lower bound on this instance's integrality gap."""
    rep = verify_fractional(g, r, sol)
    if not rep:
        raise GraphError("solution is infeasible: " + rep.violations[0].describe())
    opt = getattr(oracle_opt, "size", oracle_opt)
    if opt <= 0:
        raise GraphError("oracle optimum must be positive")
    return rep.objective / opt


def ip_opt_reference(k: int) -> Fraction:
    """Arcs in the best integral tree of the k-th gap instance: IP(k) = 4 IP(k-1) + 7, IP(1) = 0."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return Fraction(7, 3) * (4 ** (k - 1) - 1)


def lp_obj_reference(k: int) -> Fraction:
    """Objective of the half-integral point on the k-th gap instance: 8 LP(k-1) + 14, LP(1) = 0."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return 2 * Fraction(8 ** (k - 1) - 1)
