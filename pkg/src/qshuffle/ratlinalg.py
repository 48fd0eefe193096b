"""Exact linear algebra over the rationals.

Rows are cleared to integers and reduced with fraction-free (Bareiss)
elimination, so every intermediate entry is a minor of the input and no gcds
are taken inside the main loop.  Fractions appear only in back-substitution.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


def _integer_row(row) -> list:
    den = 1
    for x in row:
        if isinstance(x, Fraction) and x.denominator != 1:
            den = lcm(den, x.denominator)
    return [int(x * den) for x in row]


def echelon(rows: Sequence[Sequence], ncols: int, col_order: Sequence[int] | None = None):
    """Fraction-free row echelon form.

    Columns are scanned in ``col_order`` (default left to right).  Returns
    ``(E, pivots)`` where ``E[k]`` is an integer row whose first nonzero entry,
    in scan order, sits in column ``pivots[k]``.
    """
    order = list(range(ncols)) if col_order is None else list(col_order)
    a = [_integer_row(r) for r in rows]
    a = [r for r in a if any(r)]
    m = len(a)
    pivots = []
    prev = 1
    r = 0
    for c in order:
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        top = a[r]
        p = top[c]
        for i in range(r + 1, m):
            row = a[i]
            f = row[c]
            if f:
                a[i] = [(p * x - f * y) // prev for x, y in zip(row, top)]
            elif prev != p:
                a[i] = [(p * x) // prev for x in row]
        prev = p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(rows: Sequence[Sequence], ncols: int) -> int:
    if not rows:
        return 0
    return len(echelon(rows, ncols)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list:
    """Basis of {x : M x = 0}; one vector per free column, with a 1 there."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    e, pivots = echelon(rows, ncols)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for k in range(len(pivots) - 1, -1, -1):
            row = e[k]
            pc = pivots[k]
            s = sum((row[j] * x[j] for j in range(pc + 1, ncols) if row[j] and x[j]), Fraction(0))
            x[pc] = -s / row[pc]
        basis.append(x)
    return basis


def left_nullspace(rows: Sequence[Sequence], ncols: int) -> list:
    return nullspace(transpose(rows, ncols), len(rows))


def transpose(rows: Sequence[Sequence], ncols: int) -> list:
    return [[r[j] for r in rows] for j in range(ncols)]


def mat_vec(rows: Sequence[Sequence], x: Sequence) -> list:
    return [sum((a * b for a, b in zip(r, x) if a and b), Fraction(0)) for r in rows]


class Reducer:
    """Reduced echelon form of a row space, used to reduce vectors modulo it.

    Pivots are chosen by scanning columns in ``col_order``; every stored row is
    monic at its pivot and vanishes at the other pivots.
    """

    def __init__(self, rows: Sequence[Sequence], ncols: int, col_order: Sequence[int] | None = None):
        self.ncols = ncols
        e, pivots = echelon(rows, ncols, col_order) if rows else ([], [])
        red = []
        for row, pc in zip(e, pivots):
            p = row[pc]
            red.append({j: Fraction(v, p) for j, v in enumerate(row) if v})
        # back-eliminate so each pivot column is clean in every other row
        for k in range(len(red) - 1, -1, -1):
            pc = pivots[k]
            for i in range(k):
                f = red[i].get(pc)
                if f:
                    _axpy(red[i], -f, red[k])
        self.pivots = pivots
        self.rows = dict(zip(pivots, red))

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec) -> dict:
        """Return the sparse vector ``vec`` minus its component along the row space pivots."""
        v = {j: Fraction(x) for j, x in (vec.items() if isinstance(vec, dict) else enumerate(vec)) if x}
        for pc, row in self.rows.items():
            f = v.get(pc)
            if f:
                _axpy(v, -f, row)
        return v

    def contains(self, vec) -> bool:
        return not self.reduce(vec)


def _axpy(target: dict, a: Fraction, row: dict):
    for j, x in row.items():
        y = target.get(j, 0) + a * x
        if y:
            target[j] = y
        else:
            target.pop(j, None)


class IncrementalSpan:
    """A growing row space; ``add`` reports whether a vector was independent."""

    def __init__(self):
        self.rows = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec) -> dict:
        v = {j: Fraction(x) for j, x in (vec.items() if isinstance(vec, dict) else enumerate(vec)) if x}
        for pc, row in self.rows.items():
            f = v.get(pc)
            if f:
                _axpy(v, -f, row)
        return v

    def add(self, vec) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        pc = min(v)
        p = v[pc]
        self.rows[pc] = {j: x / p for j, x in v.items()}
        return True

    def copy(self) -> "IncrementalSpan":
        out = IncrementalSpan()
        out.rows = dict(self.rows)
        return out
