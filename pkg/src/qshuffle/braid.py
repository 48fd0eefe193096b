"""Weighted braid arrangements and the Varchenko form.

Chambers of the arrangement x_i = x_j ({i, j} not removed) are acyclic
orientations of the graph of surviving pairs.  Each chamber is labelled by the
lexicographically smallest permutation inducing it, which is also the normal
form of the corresponding word in the quotient by the commuting pairs.
Edges are set partitions whose blocks are connected in that graph.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, NotAnEdge
from .exactring import ONE, LaurentPoly, VarId, render
from .freealg import QParams
from .quotient import ConstraintSet, trace_normal_form
from .smatrix import SForm, Factorization, det_exact, form_on_basis, multilinear_basis, smatrix_det


def _pair(i: int, j: int) -> tuple:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, order=True)
class Domain:
    """The chamber x_{order[0]} < x_{order[1]} < ...; also the word e_{order}."""
    order: tuple

    @property
    def n(self) -> int:
        return len(self.order)

    def relative_order(self) -> dict:
        pos = {a: k for k, a in enumerate(self.order)}
        return {p: pos[p[0]] < pos[p[1]] for p in itertools.combinations(sorted(self.order), 2)}


@dataclass(frozen=True)
class Edge:
    """An intersection of hyperplanes, given as a set partition of {1..n}."""
    partition: tuple

    def __post_init__(self):
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.partition), key=lambda b: b[0]))
        object.__setattr__(self, "partition", blocks)

    @classmethod
    def block(cls, n: int, block: Iterable[int]) -> "Edge":
        b = tuple(sorted(block))
        return cls((b,) + tuple((i,) for i in range(1, n + 1) if i not in b))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.partition)

    @property
    def nontrivial_blocks(self) -> list:
        return [b for b in self.partition if len(b) > 1]

    @property
    def codimension(self) -> int:
        return self.n - len(self.partition)

    def pairs(self) -> list:
        return [p for b in self.partition for p in itertools.combinations(b, 2)]


@dataclass
class WeightedArrangement:
    n: int
    weights: dict
    removed: frozenset = field(default_factory=frozenset)

    @classmethod
    def symbolic(cls, n: int, removed: Iterable[Sequence[int]] = ()) -> "WeightedArrangement":
        """Weight a_ij on x_i = x_j, stored as the variable VarId(i, j), i < j."""
        gone = frozenset(_pair(*p) for p in removed)
        weights = {p: LaurentPoly.var(*p) for p in itertools.combinations(range(1, n + 1), 2) if p not in gone}
        return cls(n, weights, gone)

    def hyperplanes(self) -> list:
        return [p for p in itertools.combinations(range(1, self.n + 1), 2) if p not in self.removed]

    def weight(self, p) -> object:
        p = _pair(*p)
        return 1 if p in self.removed else self.weights[p]

    def constraints(self) -> ConstraintSet:
        return ConstraintSet.of(self.n, sorted(self.removed))

    def domains(self) -> list:
        """One representative permutation per chamber, in lexicographic order."""
        reps = {trace_normal_form(w, self.removed) for w in multilinear_basis(range(1, self.n + 1))}
        return [Domain(w) for w in sorted(reps)]

    def params(self) -> QParams:
        """q_ij = q_ji = a_ij, and 1 on removed pairs."""
        vals = {}
        for i in range(1, self.n + 1):
            for j in range(1, self.n + 1):
                if i != j:
                    w = self.weight((i, j))
                    vals[(i, j)] = w if isinstance(w, LaurentPoly) else ONE * w
        return QParams(self.n, vals)

    def gauge_params(self) -> QParams:
        """q_ij = a_ij^2 for i < j, q_ji = 1: same sigma_ij as the symmetric weights."""
        vals = {}
        for i in range(1, self.n + 1):
            for j in range(1, self.n + 1):
                if i < j:
                    w = self.weight((i, j))
                    vals[(i, j)] = (w * w) if isinstance(w, LaurentPoly) else ONE * (Fraction(w) ** 2)
                elif i > j:
                    vals[(i, j)] = ONE
        return QParams(self.n, vals)


def separating_set(d1: Domain, d2: Domain) -> set:
    """Pairs {i, j} ordered differently by the two chambers."""
    if sorted(d1.order) != sorted(d2.order):
        raise DimensionMismatch(f"domains over {sorted(d1.order)} and {sorted(d2.order)}")
    o1, o2 = d1.relative_order(), d2.relative_order()
    return {p for p in o1 if o1[p] != o2[p]}


def varchenko_form(arr: WeightedArrangement) -> SForm:
    """B(D, D') = product of the weights of the surviving walls between D and D'."""
    doms = arr.domains()
    rows = []
    for d in doms:
        row = []
        for e in doms:
            x = ONE
            for p in sorted(separating_set(d, e)):
                if p not in arr.removed:
                    x = x * arr.weights[p]
            row.append(x)
        rows.append(row)
    return SForm([d.order for d in doms], rows, arr.params())


# edges and their numbers

def set_partitions(items: Sequence[int]):
    """All set partitions of ``items`` as lists of blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for k in range(len(part)):
            yield part[:k] + [[first] + part[k]] + part[k + 1:]


def _connected(vertices: Sequence[int], edges: set) -> bool:
    vs = set(vertices)
    if not vs:
        return True
    seen, stack = set(), [min(vs)]
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        stack.extend(y for y in vs if y not in seen and _pair(x, y) in edges)
    return seen == vs


def is_edge(arr: WeightedArrangement, L: Edge) -> bool:
    if L.n != arr.n or sorted(i for b in L.partition for i in b) != list(range(1, arr.n + 1)):
        return False
    if not L.nontrivial_blocks:
        return False
    walls = set(arr.hyperplanes())
    return all(_connected(b, walls) for b in L.partition)


def edges(arr: WeightedArrangement) -> list:
    out = []
    for part in set_partitions(range(1, arr.n + 1)):
        L = Edge(tuple(tuple(b) for b in part))
        if is_edge(arr, L):
            out.append(L)
    return sorted(out, key=lambda L: (L.codimension, L.partition))


def edge_weight(arr: WeightedArrangement, L: Edge):
    out = ONE
    for p in L.pairs():
        if p not in arr.removed:
            out = out * arr.weights[p]
    return out


def _orientations(vertices: Sequence[int], walls: Sequence[tuple], orders) -> set:
    return {tuple(pos[a] < pos[b] for a, b in walls)
            for pos in ({v: k for k, v in enumerate(o)} for o in orders)}


def count_acyclic_orientations(vertices: Sequence[int], walls: Sequence[tuple]) -> int:
    """Chambers of the graphic arrangement: distinct orientations induced by total orders."""
    return len(_orientations(vertices, walls, itertools.permutations(vertices)))


def fixed_wall(block: Sequence[int], walls: set) -> tuple:
    """The wall kept out of the closure: (min, max) of the block, else the first surviving pair."""
    b = sorted(block)
    if (b[0], b[-1]) in walls:
        return (b[0], b[-1])
    return min(p for p in itertools.combinations(b, 2) if p in walls)


def bracketing_count(block: Sequence[int], walls: set) -> int:
    """Chambers inside ``block`` whose inequalities force lo < x < hi for every other x.

    (lo, hi) is the fixed wall.  Such a chamber is an acyclic orientation with lo
    as its only source and hi as its only sink; its closure avoids x_lo = x_hi.
    """
    b = sorted(block)
    inner = [p for p in itertools.combinations(b, 2) if p in walls]
    lo, hi = fixed_wall(b, walls)
    middle = [x for x in b if x not in (lo, hi)]
    orders = ((lo, *m, hi) for m in itertools.permutations(middle))
    count = 0
    for orient in _orientations(b, inner, orders):
        has_lower = {b2 if up else a for (a, b2), up in zip(inner, orient)}
        has_upper = {a if up else b2 for (a, b2), up in zip(inner, orient)}
        if set(b) - has_lower == {lo} and set(b) - has_upper == {hi}:
            count += 1
    return count


def edge_numbers(arr: WeightedArrangement, L: Edge) -> tuple:
    """(n(L), p(L)) for an edge of the arrangement."""
    if not is_edge(arr, L):
        raise NotAnEdge(f"{L.partition} is not an intersection of surviving hyperplanes")
    walls = set(arr.hyperplanes())
    blocks = L.partition
    contracted = set()
    for x, y in itertools.combinations(range(len(blocks)), 2):
        if any(_pair(a, b) in walls for a in blocks[x] for b in blocks[y]):
            contracted.add((x, y))
    n_l = count_acyclic_orientations(range(len(blocks)), sorted(contracted))
    nontrivial = L.nontrivial_blocks
    p_l = bracketing_count(nontrivial[0], walls) if len(nontrivial) == 1 else 0
    return n_l, p_l


def varchenko_det_formula(arr: WeightedArrangement) -> Factorization:
    """prod over edges of (1 - a(L)^2)^(n(L) p(L)); keyed by the nontrivial block."""
    factors, bases = [], {}
    for L in edges(arr):
        n_l, p_l = edge_numbers(arr, L)
        if n_l * p_l == 0:
            continue
        a = edge_weight(arr, L)
        s = L.nontrivial_blocks[0]
        factors.append((s, n_l * p_l))
        bases[s] = ONE - a * a
    factors.sort(key=lambda t: (len(t[0]), t[0]))
    return Factorization(factors, ONE, bases)


def diagonal_equivalence(a: Sequence[Sequence], b: Sequence[Sequence]):
    """Scalar c with det a = c * det b, certified by a = X b Y for diagonal monomial X, Y.

    Entries must be nonzero monomials.  Returns None if no such X, Y exist.
    """
    n = len(a)
    ratio = [[a[i][j] / b[i][j] for j in range(n)] for i in range(n)]
    x = [ratio[i][0] for i in range(n)]
    y0 = ratio[0][0]
    y = [ratio[0][j] / y0 for j in range(n)]
    for i in range(n):
        for j in range(n):
            if ratio[i][j] != x[i] * y[j]:
                return None
    c = ONE
    for i in range(n):
        c = c * x[i] * y[i]
    return c


def varchenko_det(arr: WeightedArrangement):
    """det B, computed on a gauge-equivalent form and transported back exactly.

    With q_ij = a_ij^2 (i < j) and q_ji = 1 the pairing matrix equals X B Y for
    diagonal monomial matrices X, Y; the equivalence is checked entrywise.
    """
    b = varchenko_form(arr)
    gq = arr.gauge_params()
    g = form_on_basis(b.basis, gq)
    c = diagonal_equivalence(g, b.entries)
    if c is None:
        raise AssertionError("gauge form is not diagonally equivalent to B")
    if arr.removed:
        d = det_exact(g)
    else:
        d = smatrix_det(tuple(range(1, arr.n + 1)), gq)
    return d / c


def render_weights(p) -> str:
    """Polynomial text with the weights written a12, a13, ..."""
    text = render(p) if isinstance(p, LaurentPoly) else str(p)
    return re.sub(r"q(\d+)_(\d+)", r"a\1\2", text)


def render_formula(f: Factorization, arr: WeightedArrangement) -> str:
    parts = []
    for s, e in f.factors:
        a = render_weights(edge_weight(arr, Edge.block(arr.n, s)))
        parts.append(f"(1-{a}^2)^{e}" if "*" not in a else f"(1-({a})^2)^{e}")
    return " ".join(parts) if parts else "1"
