"""Free algebra on e_1..e_N with the twisted derivations d_i.

The derivations are fixed by ``d_i(e_j x) = delta_ij x + q_ij e_j d_i(x)``.
Unfolding the recursion over a word gives the closed form used here::

    d_i(w) = sum over positions p with w[p] == i of
             (prod_{r < p} q[i, w[r]]) * (w with position p deleted)
"""
from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import HasConstantTerm, IndexOutOfRange, MissingDiagonalParameter, ZeroAssignment
from .exactring import LaurentPoly, ONE, VarId, rational, render

Word = tuple


def degree(w: Word) -> tuple:
    """The fine degree of a word: its letters as a sorted tuple (a multiset)."""
    return tuple(sorted(w))


def is_multilinear(w: Word) -> bool:
    return len(set(w)) == len(w)


def reversal(w: Word) -> Word:
    return tuple(reversed(w))


def _inverse(x):
    if isinstance(x, LaurentPoly):
        return x.inverse_monomial()
    return 1 / x


def _is_zero(c) -> bool:
    return not c


@dataclass(frozen=True, eq=False)
class QParams:
    """Values of the q_ij for generators 1..n (symbolic or rational).

    ``diag`` holds q_ii when needed; ``diag_sqrt`` optionally holds a chosen square
    root of q_ii for half-integer powers.
    """
    n: int
    values: Mapping[tuple, object]
    diag: Mapping[int, object] = field(default_factory=dict)
    diag_sqrt: Mapping[int, object] = field(default_factory=dict)

    def __post_init__(self):
        for key, v in list(self.values.items()) + [((i, i), v) for i, v in self.diag.items()]:
            if not isinstance(v, LaurentPoly) and rational(v) == 0:
                raise ZeroAssignment(f"q{key[0]}_{key[1]} = 0")
            if isinstance(v, LaurentPoly) and v.is_zero():
                raise ZeroAssignment(f"q{key[0]}_{key[1]} = 0")

    @classmethod
    def symbolic(cls, n: int, diagonal: bool = False) -> "QParams":
        vals = {(i, j): LaurentPoly.var(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j}
        diag = {i: LaurentPoly.var(i, i) for i in range(1, n + 1)} if diagonal else {}
        return cls(n, vals, diag)

    @classmethod
    def symmetric(cls, n: int) -> "QParams":
        """q_ij = q_ji = the variable q_{min,max}."""
        vals = {}
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j:
                    vals[(i, j)] = LaurentPoly.var(min(i, j), max(i, j))
        return cls(n, vals)

    @classmethod
    def from_assignment(cls, n: int, assignment: Mapping[VarId, object]) -> "QParams":
        vals = {(v.i, v.j): rational(c) for v, c in assignment.items() if v.i != v.j}
        diag = {v.i: rational(c) for v, c in assignment.items() if v.i == v.j}
        return cls(n, vals, diag)

    def q(self, i: int, j: int):
        if i == j:
            try:
                return self.diag[i]
            except KeyError:
                raise MissingDiagonalParameter(f"q{i}_{i} not supplied") from None
        return self.values[(i, j)]

    def sigma(self, subset: Iterable[int]):
        s = sorted(set(subset))
        out = 1
        for i in s:
            for j in s:
                if i != j:
                    out = out * self.values[(i, j)]
        return out

    def is_rational(self) -> bool:
        return all(not isinstance(v, LaurentPoly) for v in self.values.values())

    def transpose(self) -> "QParams":
        return QParams(self.n, {(i, j): self.values[(j, i)] for (i, j) in self.values}, self.diag, self.diag_sqrt)

    def restrict(self, letters: Iterable[int]) -> "QParams":
        ls = set(letters)
        return QParams(self.n, {k: v for k, v in self.values.items() if k[0] in ls and k[1] in ls},
                       {i: v for i, v in self.diag.items() if i in ls},
                       {i: v for i, v in self.diag_sqrt.items() if i in ls})


class NcPoly:
    """Noncommutative polynomial: a finite map Word -> nonzero coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, object] | None = None):
        self.terms = {}
        if terms:
            for w, c in terms.items():
                if not _is_zero(c):
                    self.terms[tuple(w)] = c

    @classmethod
    def word(cls, w: Iterable[int], coeff=1) -> "NcPoly":
        return cls({tuple(w): coeff})

    @classmethod
    def one(cls) -> "NcPoly":
        return cls({(): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def coefficient(self, w: Word):
        return self.terms.get(tuple(w), 0)

    def constant_term(self):
        return self.terms.get((), 0)

    def _combine(self, other, sign):
        out = dict(self.terms)
        for w, c in other.terms.items():
            if w in out:
                v = out[w] + c if sign > 0 else out[w] - c
                if _is_zero(v):
                    del out[w]
                else:
                    out[w] = v
            else:
                out[w] = c if sign > 0 else -c
        r = NcPoly()
        r.terms = out
        return r

    def __add__(self, other):
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self._combine(other, 1)

    def __sub__(self, other):
        if not isinstance(other, NcPoly):
            return NotImplemented
        return self._combine(other, -1)

    def __neg__(self):
        return NcPoly({w: -c for w, c in self.terms.items()})

    def scale(self, a) -> "NcPoly":
        return NcPoly({w: a * c for w, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, NcPoly):
            out = NcPoly()
            for u, a in self.terms.items():
                for v, b in other.terms.items():
                    out = out + NcPoly({u + v: a * b})
            return out
        return NcPoly({w: c * other for w, c in self.terms.items()})

    def __rmul__(self, other):
        return NcPoly({w: other * c for w, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, NcPoly):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def homogeneous_component(self, deg: Iterable[int]) -> "NcPoly":
        d = tuple(sorted(deg))
        return NcPoly({w: c for w, c in self.terms.items() if degree(w) == d})

    def degrees(self) -> set:
        return {degree(w) for w in self.terms}

    def map_coefficients(self, f) -> "NcPoly":
        return NcPoly({w: f(c) for w, c in self.terms.items()})

    def __repr__(self):
        return f"NcPoly({render_ncpoly(self)!r})"

    def __str__(self):
        return render_ncpoly(self)


def _word_text(w: Word) -> str:
    return ".".join(f"e{i}" for i in w) if w else "1"


def _coeff_text(c, sigma: bool) -> str:
    s = render(c, sigma) if not isinstance(c, (int, Fraction)) else render(Fraction(c))
    return s


def render_ncpoly(x: NcPoly, sigma: bool = False) -> str:
    """Words as ``e1.e3.e2``; terms sorted by length, then lexicographically."""
    if x.is_zero():
        return "0"
    out = []
    for w in sorted(x.terms, key=lambda w: (len(w), w)):
        c = x.terms[w]
        text = _coeff_text(c, sigma)
        neg = text.startswith("-") and " " not in text
        if neg:
            text = text[1:]
        if text == "1":
            body = _word_text(w)
        elif " " in text or text.startswith("("):
            body = f"({text})*{_word_text(w)}" if w else f"({text})"
        else:
            body = f"{text}*{_word_text(w)}" if w else text
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def _check_index(i: int, q: QParams):
    if not (1 <= i <= q.n):
        raise IndexOutOfRange(f"generator {i} outside 1..{q.n}")


def partial_word(i: int, w: Word, q: QParams) -> dict:
    """d_i applied to the single word ``w``, as ``{word: coefficient}``."""
    out = {}
    if i not in w:
        return out
    last = len(w) - 1 - w[::-1].index(i)
    prefix = 1
    for p in range(last + 1):
        a = w[p]
        if a == i:
            rest = w[:p] + w[p + 1:]
            out[rest] = out[rest] + prefix if rest in out else prefix
        if p < last:
            prefix = prefix * q.q(i, a)
    return out


def apply_partial(i: int, x: NcPoly, q: QParams) -> NcPoly:
    _check_index(i, q)
    acc = {}
    for w, c in x.terms.items():
        for v, a in partial_word(i, w, q).items():
            t = c * a
            acc[v] = acc[v] + t if v in acc else t
    return NcPoly(acc)


def apply_partial_word(js: Word, x: NcPoly, q: QParams) -> NcPoly:
    """Apply d_{js[0]} first, then d_{js[1]}, and so on."""
    for j in js:
        x = apply_partial(j, x, q)
        if x.is_zero():
            break
    return x


def pairing(u: Word, w: Word, q: QParams):
    """Constant term of the operator word ``u`` applied to e_w."""
    return apply_partial_word(u, NcPoly.word(w), q).constant_term()


def is_constant(x: NcPoly, q: QParams) -> bool:
    if not _is_zero(x.constant_term()):
        raise HasConstantTerm("constants have no term of order 0")
    return all(apply_partial(i, x, q).is_zero() for i in range(1, q.n + 1))


class QBinomialConvention(enum.Enum):
    """How the q-binomial of the Serre sum is read (t = q_ii in both cases).

    ONE_SIDED: the Gaussian binomial prod (1 - t^(n-k+r)) / (1 - t^r).
    SYMMETRIC: the balanced binomial built from [r] = (t^r - t^-r) / (t - t^-1).
    """
    ONE_SIDED = "one-sided"
    SYMMETRIC = "symmetric"


DEFAULT_CONVENTION = QBinomialConvention.ONE_SIDED


def q_binomial(m: int, k: int, t, convention: QBinomialConvention):
    """Gaussian binomial coefficient via the q-Pascal rule (ring-generic, no division)."""
    if k < 0 or k > m:
        return 0
    tinv = _inverse(t)
    row = [1]
    for r in range(1, m + 1):
        new = [1] * (r + 1)
        for j in range(1, r):
            if convention is QBinomialConvention.ONE_SIDED:
                new[j] = row[j - 1] + _power(t, j) * row[j]
            else:
                new[j] = _power(t, j) * row[j] + _power(tinv, r - j) * row[j - 1]
        row = new
    return row[k]


def _power(x, e: int):
    if e >= 0:
        out = 1
        for _ in range(e):
            out = out * x
        return out
    return _power(_inverse(x), -e)


def serre_element(i: int, j: int, q: QParams, cartan_entry: int,
                  convention: QBinomialConvention = DEFAULT_CONVENTION) -> NcPoly:
    """sum_k (-1)^k binom(m, k)_t t^(-k(m-k)/2) e_i^k e_j e_i^(m-k) with m = 1 - a_ij, t = q_ii."""
    _check_index(i, q)
    _check_index(j, q)
    if i not in q.diag:
        raise MissingDiagonalParameter(f"serre element needs q{i}_{i}")
    t = q.diag[i]
    m = 1 - cartan_entry
    terms = {}
    for k in range(m + 1):
        half = k * (m - k)
        if half % 2 == 0:
            scale = _power(t, -(half // 2))
        else:
            if i not in q.diag_sqrt:
                raise MissingDiagonalParameter(f"half-integer power of q{i}_{i} needs its square root")
            r = q.diag_sqrt[i]
            if r * r != t:
                raise ValueError(f"supplied square root of q{i}_{i} is wrong")
            scale = _power(r, -half)
        c = q_binomial(m, k, t, convention) * scale
        if k % 2:
            c = -c
        terms[(i,) * k + (j,) + (i,) * (m - k)] = c
    return NcPoly(terms)


def cartan_params(cartan, base=None) -> QParams:
    """Parameters realizing a rank-2 Cartan matrix: q_ii = s^(2 d_i), q_ij = q_ji = s^(d_i a_ij).

    ``base`` is s; by default the symbolic variable q1_1 plays that role.
    """
    (a11, a12), (a21, a22) = cartan
    if a12 == 0 and a21 == 0:
        d = (1, 1)
    elif a12 == 0 or a21 == 0:
        raise ValueError("not a Cartan matrix: a12 and a21 must vanish together")
    else:
        d = (-a21, -a12)
        g = math.gcd(*d)
        d = (d[0] // g, d[1] // g)
    if d[0] * a12 != d[1] * a21:
        raise ValueError("Cartan matrix is not symmetrizable")
    s = LaurentPoly.var(1, 1) if base is None else base
    off = _power(s, d[0] * a12)
    return QParams(2, {(1, 2): off, (2, 1): off},
                   {1: _power(s, 2 * d[0]), 2: _power(s, 2 * d[1])},
                   {1: _power(s, d[0]), 2: _power(s, d[1])})


CARTAN_RANK2 = {
    "A1xA1": ((2, 0), (0, 2)),
    "A2": ((2, -1), (-1, 2)),
    "B2": ((2, -2), (-1, 2)),
    "G2": ((2, -3), (-1, 2)),
}
