"""The pairing matrix S_G on multilinear words, its determinant and the t-matrix.

Entry convention: ``S[a][b]`` is the constant term of the operator word
``basis[a]`` (first letter applied first) acting on ``e_{basis[b]}``.  For
G = {1,2} this gives [[1, q12], [q21, 1]].

Large determinants go through the factorization ``S_G = D_G * E_G``: here ``E_G``
stacks the maps d_a (one block row per letter a), and ``D_G`` is block diagonal
with blocks ``S_{G - a}``.  Rows of ``E_G`` are ordered by (a, word), which is the
lexicographic order of ``a + word``, so det S_G = det E_G * prod_a det S_{G-a}.
``E_G`` is sparse (n nonzeros per column), which keeps Bareiss elimination cheap.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import NonMonomialResidual, NotDivisible, RangeError, RepeatedIndex, SingularMatrix
from .exactring import (ONE, ZERO, LaurentPoly, RatFunc, compact_rows, from_compact, poly_divide_exact, render,
                        sigma_name)
from .freealg import NcPoly, QParams, apply_partial, pairing, partial_word


def multilinear_basis(G: Iterable[int]) -> list:
    letters = sorted(G)
    return list(itertools.permutations(letters))


def _letters(G) -> tuple:
    g = tuple(G)
    if len(set(g)) != len(g):
        raise RepeatedIndex(f"degree {g} repeats a generator")
    return tuple(sorted(g))


@dataclass
class SForm:
    basis: list
    entries: list
    params: QParams | None = None
    quotient: object = None

    @property
    def size(self) -> int:
        return len(self.basis)

    def __getitem__(self, ab):
        a, b = ab
        return self.entries[a][b]

    def specialize(self, assignment) -> "SForm":
        rows = [[e.specialize(assignment) if isinstance(e, LaurentPoly) else Fraction(e) for e in r]
                for r in self.entries]
        return SForm(list(self.basis), rows, None)

    def substitute(self, assignment) -> "SForm":
        rows = [[e.substitute(assignment) if isinstance(e, LaurentPoly) else e for e in r] for r in self.entries]
        return SForm(list(self.basis), rows, None)

    def transpose(self) -> "SForm":
        n = self.size
        return SForm(list(self.basis), [[self.entries[j][i] for j in range(n)] for i in range(n)], self.params)

    def is_symmetric(self) -> bool:
        n = self.size
        return all(self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(i + 1, n))


def form_on_basis(basis: Sequence, q: QParams) -> list:
    rows = []
    for u in basis:
        row = []
        for w in basis:
            e = pairing(u, w, q)
            if isinstance(e, int):
                e = ONE * e if not q.is_rational() else Fraction(e)
            row.append(e)
        rows.append(row)
    return rows


def build_smatrix(G: Iterable[int], q: QParams | None = None) -> SForm:
    letters = _letters(G)
    if q is None:
        q = QParams.symbolic(max(letters) if letters else 1)
    basis = multilinear_basis(letters)
    entries = form_on_basis(basis, q)
    for row in entries:
        for e in row:
            if isinstance(e, LaurentPoly) and not e.is_monomial():
                raise AssertionError("multilinear S-matrix entry is not a monomial")
    return SForm(basis, entries, q)


def pairing_monomial(u: Sequence[int], w: Sequence[int], q: QParams):
    """Closed form on multilinear words: product of q_ab over (a, b) with a before b in u, b before a in w."""
    pu = {a: i for i, a in enumerate(u)}
    pw = {a: i for i, a in enumerate(w)}
    out = 1
    for a in u:
        for b in u:
            if a != b and pu[a] < pu[b] and pw[b] < pw[a]:
                out = out * q.q(a, b)
    return out


def derivative_matrix(G: Iterable[int], q: QParams):
    """The stacked map w -> (d_a w)_a on degree G.

    Returns ``(rows, cols, entries)``: rows are pairs (a, v) with v a word on G - a,
    columns are the words of G, and ``entries[r][c]`` is the coefficient of v in d_a(w).
    """
    letters = _letters(G)
    cols = multilinear_basis(letters)
    rows = [(a, v) for a in letters for v in multilinear_basis([b for b in letters if b != a])]
    pos = {r: k for k, r in enumerate(rows)}
    zero = Fraction(0) if q.is_rational() else ZERO
    entries = [[zero] * len(cols) for _ in rows]
    for c, w in enumerate(cols):
        for a in letters:
            for v, coeff in partial_word(a, w, q).items():
                if isinstance(coeff, int):
                    coeff = Fraction(coeff) if q.is_rational() else ONE * coeff
                entries[pos[(a, v)]][c] = coeff
    return rows, cols, entries


def verify_block_factorization(G: Iterable[int], q: QParams | None = None) -> bool:
    """Check S_G = blockdiag(S_{G-a}) * E_G entry by entry."""
    letters = _letters(G)
    if q is None:
        q = QParams.symbolic(max(letters))
    s = build_smatrix(letters, q)
    rows, cols, e = derivative_matrix(letters, q)
    pos = {r: k for k, r in enumerate(rows)}
    subs = {a: build_smatrix([b for b in letters if b != a], q) for a in letters} if len(letters) > 1 else {}
    for i, u in enumerate(s.basis):
        a, rest = u[0], u[1:]
        if len(letters) == 1:
            if s.entries[0][0] != e[0][0]:
                return False
            continue
        sub = subs[a]
        ri = sub.basis.index(rest)
        for j in range(len(cols)):
            acc = 0
            for k, v in enumerate(sub.basis):
                x = e[pos[(a, v)]][j]
                if x:
                    acc = sub.entries[ri][k] * x + acc
            if acc != s.entries[i][j]:
                return False
    return True


def _entries(m):
    return m.entries if isinstance(m, SForm) else m


def det_exact(m) -> LaurentPoly | Fraction:
    """Fraction-free (Bareiss) determinant with exact division."""
    a = [list(r) for r in _entries(m)]
    n = len(a)
    if n == 0:
        return ONE
    rational = all(not isinstance(x, LaurentPoly) for r in a for x in r)
    if not rational:
        # run the elimination on plain polynomials in the variables that occur
        rows, one, used, shift = compact_rows(a)
        return from_compact(_bareiss(rows, one), used, shift)
    return _bareiss(a, Fraction(1))


def _bareiss(a: list, one):
    n = len(a)
    sign = 1
    prev = one
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((r for r in range(k + 1, n) if a[r][k]), None)
            if swap is None:
                return one * 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        p = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            f = rowi[k]
            for j in range(k + 1, n):
                x = p * rowi[j]
                if f and rowk[j]:
                    x = x - f * rowk[j]
                rowi[j] = x / prev if (x and k) else x
        prev = p
    d = a[n - 1][n - 1]
    return d if sign > 0 else -d


def det_cofactor(m):
    """Laplace expansion along the first row (oracle for small sizes)."""
    a = [list(r) for r in _entries(m)]
    n = len(a)
    if n == 0:
        return ONE
    if n == 1:
        return a[0][0]
    total = 0
    for j in range(n):
        if not a[0][j]:
            continue
        minor = [r[:j] + r[j + 1:] for r in a[1:]]
        t = a[0][j] * det_cofactor(minor)
        total = total + t if j % 2 == 0 else total - t
    if isinstance(total, int):
        total = ONE * total
    return total


def smatrix_det(G: Iterable[int], q: QParams | None = None):
    """det S_G through det E_G times the determinants of the S_{G-a}."""
    letters = _letters(G)
    if q is None:
        return _symbolic_det(letters)
    return _structural_det(letters, q, {})


@lru_cache(maxsize=None)
def _symbolic_det(letters: tuple):
    return _structural_det(letters, QParams.symbolic(max(letters)), {})


def _structural_det(letters: tuple, q: QParams, memo: dict):
    if letters in memo:
        return memo[letters]
    if len(letters) <= 1:
        d = Fraction(1) if q.is_rational() else ONE
    else:
        _, _, e = derivative_matrix(letters, q)
        d = det_exact(e)
        for a in letters:
            d = d * _structural_det(tuple(b for b in letters if b != a), q, memo)
    memo[letters] = d
    return d


def derivative_det(G: Iterable[int], q: QParams | None = None):
    letters = _letters(G)
    if q is None:
        q = QParams.symbolic(max(letters))
    return det_exact(derivative_matrix(letters, q)[2])


@dataclass
class Factorization:
    """det = unit * prod (1 - sigma_S)^exponent."""
    factors: list
    unit: LaurentPoly
    bases: dict = field(default_factory=dict, repr=False)

    def exponent(self, subset) -> int:
        s = tuple(sorted(subset))
        return next((e for t, e in self.factors if t == s), 0)

    def expand(self) -> LaurentPoly:
        out = self.unit
        for s, e in self.factors:
            out = out * self.bases[s] ** e
        return out

    def render(self, sigma_names: bool = True) -> str:
        parts = []
        if self.unit != ONE:
            parts.append(f"[{render(self.unit, True)}]")
        for s, e in self.factors:
            parts.append(f"(1-{sigma_name(s)})^{e}")
        return " ".join(parts) if parts else "1"

    def to_json(self) -> dict:
        return {"factors": [{"subset": list(s), "exponent": e} for s, e in self.factors],
                "unit": render(self.unit)}


def candidate_subsets(letters: Sequence[int]) -> list:
    letters = sorted(letters)
    out = []
    for k in range(2, len(letters) + 1):
        out.extend(itertools.combinations(letters, k))
    return out


def factor_determinant(d: LaurentPoly, n: int | None = None, letters: Sequence[int] | None = None,
                       params: QParams | None = None, candidates: Sequence | None = None) -> Factorization:
    """Exact multiplicities of every (1 - sigma_S) by repeated trial division."""
    if d.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if letters is None:
        letters = range(1, (n or 0) + 1)
    letters = sorted(letters)
    if params is None and letters:
        params = QParams.symbolic(max(letters))
    if candidates is None:
        candidates = candidate_subsets(letters)
    rest = d
    factors = []
    bases = {}
    for s in candidates:
        sig = params.sigma(s)
        if not isinstance(sig, LaurentPoly):
            sig = ONE * sig
        if sig.is_constant():
            continue
        base = ONE - sig
        e = 0
        while True:
            try:
                rest = poly_divide_exact(rest, base)
            except NotDivisible:
                break
            e += 1
        if e:
            factors.append((tuple(s), e))
            bases[tuple(s)] = base
    if not rest.is_monomial():
        raise NonMonomialResidual(f"residual with {len(rest)} terms after removing all (1 - sigma) factors")
    return Factorization(factors, rest, bases)


def predicted_exponent(n: int, k: int) -> int:
    if not 2 <= k <= n:
        raise RangeError(f"need 2 <= k <= n, got n={n}, k={k}")
    return math.factorial(n + 1 - k) * math.factorial(k - 2)


def predicted_factorization(letters: Sequence[int]) -> Factorization:
    letters = sorted(letters)
    n = len(letters)
    q = QParams.symbolic(max(letters))
    subsets = candidate_subsets(letters)
    return Factorization([(s, predicted_exponent(n, len(s))) for s in subsets], ONE,
                         {s: ONE - q.sigma(s) for s in subsets})


@dataclass
class SumRuleReport:
    n: int
    total_degree_sum: int
    total_degree_expected: int
    pair_degree_sum: int
    pair_degree_expected: int
    det_total_degree: int | None = None
    det_pair_degree: int | None = None

    @property
    def total_degree_ok(self) -> bool:
        return self.total_degree_sum == self.total_degree_expected

    @property
    def pair_degree_ok(self) -> bool:
        return self.pair_degree_sum == self.pair_degree_expected

    @property
    def determinant_ok(self) -> bool | None:
        if self.det_total_degree is None:
            return None
        return (self.det_total_degree == self.total_degree_expected
                and self.det_pair_degree == self.pair_degree_expected)

    @property
    def passed(self) -> bool:
        return self.total_degree_ok and self.pair_degree_ok and self.determinant_ok is not False


def check_sum_rules(n: int, with_determinant: bool | None = None) -> SumRuleReport:
    """Degree bookkeeping of the exponents, optionally against the actual determinant."""
    if n < 2:
        raise RangeError("sum rules need n >= 2")
    total = sum(k * (k - 1) * predicted_exponent(n, k) * math.comb(n, k) for k in range(2, n + 1))
    pair = sum(predicted_exponent(n, k) * math.comb(n - 2, k - 2) for k in range(2, n + 1))
    rep = SumRuleReport(n, total, math.comb(n, 2) * math.factorial(n), pair, math.factorial(n) // 2)
    if with_determinant is None:
        with_determinant = n <= 4
    if with_determinant:
        from .exactring import VarId
        d = smatrix_det(range(1, n + 1))
        rep.det_total_degree = d.total_degree()
        rep.det_pair_degree = d.degree_in(VarId(1, 2))[1]
    return rep


def t_matrix(m: SForm) -> list:
    """Exact inverse over the rational-function field (adjugate over determinant)."""
    a = _entries(m)
    n = len(a)
    d = det_exact(a)
    if not d:
        raise SingularMatrix("determinant vanishes identically")
    if n == 1:
        return [[RatFunc(ONE, _poly(a[0][0]))]]
    inv = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [r[:j] + r[j + 1:] for k, r in enumerate(a) if k != i]
            c = det_exact(minor)
            if (i + j) % 2:
                c = -c
            inv[j][i] = RatFunc(_poly(c), _poly(d))
    return inv


def _poly(x) -> LaurentPoly:
    return x if isinstance(x, LaurentPoly) else ONE * x


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list:
    n, m, p = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = RatFunc(ZERO, b[0][j].den) if isinstance(b[0][j], RatFunc) else 0
            for k in range(m):
                if a[i][k] and b[k][j]:
                    acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def is_identity(m: Sequence[Sequence]) -> bool:
    n = len(m)
    return all((m[i][j] == (1 if i == j else 0)) for i in range(n) for j in range(n))


def t_elements(m: SForm) -> dict:
    """Dual elements t_u = sum_b t[b][u] e_{basis[b]}, characterized by <v, t_u> = delta_uv."""
    t = t_matrix(m)
    out = {}
    for c, u in enumerate(m.basis):
        out[u] = NcPoly({w: t[b][c] for b, w in enumerate(m.basis)})
    return out


def check_t_recursion(G: Iterable[int], q: QParams | None = None) -> bool:
    """d_k t_u = [k == u_1] t_{u minus its first letter}, with lower-degree t's and t_() = 1."""
    letters = _letters(G)
    if q is None:
        q = QParams.symbolic(max(letters))
    duals = {(): NcPoly({(): RatFunc(ONE)})}
    for size in range(1, len(letters) + 1):
        for sub in itertools.combinations(letters, size):
            duals.update(t_elements(build_smatrix(sub, q)))
    for size in range(1, len(letters) + 1):
        for sub in itertools.combinations(letters, size):
            for u in multilinear_basis(sub):
                for k in sub:
                    lhs = apply_partial(k, duals[u], q)
                    rhs = duals[u[1:]] if k == u[0] else NcPoly()
                    if not lhs == rhs:
                        return False
    return True
