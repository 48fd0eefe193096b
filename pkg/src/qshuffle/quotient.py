"""Constraint sets, elimination of constrained parameters, and quotients B_G(Q).

For pair constraints the quotient is described combinatorially: imposing
e_x e_y = q_yx e_y e_x for each pair in P identifies words that differ by
commuting adjacent letters of those pairs.  The classes are the traces of
the partially commutative monoid, and the lexicographically smallest word of
each class serves as its normal form.  The scalar between two words of a
class does not depend on the rewriting path: it is the product of q_yx over
the pairs {x, y} in P whose order was flipped from (x, y) to (y, x).

For general constraints the ideal in degree G is spanned by x*C*z, where C
runs over constants of lower degree computed at an exact rational point of
V^Q.  The complement basis is chosen greedily in lexicographic order: a word
is kept when it is independent of the ideal together with all smaller words.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import FormDoesNotDescend, InconsistentConstraints
from .exactring import ONE, LaurentPoly, VarId
from .freealg import NcPoly, QParams, pairing
from .ratlinalg import Reducer, rank
from .smatrix import SForm, det_exact, form_on_basis, multilinear_basis


def _norm_subset(s) -> tuple:
    return tuple(sorted(set(s)))


def subset_key(s) -> tuple:
    return (len(s), tuple(s))


@dataclass(frozen=True)
class ConstraintSet:
    """Conditions sigma_S = 1, one per subset S of {1..n}."""
    n: int
    subsets: tuple = ()

    def __post_init__(self):
        subs = sorted({_norm_subset(s) for s in self.subsets}, key=subset_key)
        for s in subs:
            if len(s) < 2:
                raise InconsistentConstraints(f"constraint {list(s)} needs at least two indices")
            if s[0] < 1 or s[-1] > self.n:
                raise InconsistentConstraints(f"constraint {list(s)} outside 1..{self.n}")
        object.__setattr__(self, "subsets", tuple(subs))

    @classmethod
    def of(cls, n: int, subsets: Iterable[Iterable[int]] = ()) -> "ConstraintSet":
        return cls(n, tuple(tuple(s) for s in subsets))

    def __iter__(self):
        return iter(self.subsets)

    def __len__(self):
        return len(self.subsets)

    def __contains__(self, s):
        return _norm_subset(s) in self.subsets

    def is_quadratic(self) -> bool:
        return all(len(s) == 2 for s in self.subsets)

    def pairs(self) -> set:
        return {s for s in self.subsets if len(s) == 2}

    def restrict(self, letters: Iterable[int]) -> "ConstraintSet":
        ls = set(letters)
        return ConstraintSet(self.n, tuple(s for s in self.subsets if set(s) <= ls))

    def union(self, more: Iterable[Iterable[int]]) -> "ConstraintSet":
        return ConstraintSet(self.n, self.subsets + tuple(_norm_subset(s) for s in more))

    def relabel(self, perm: dict, n: int | None = None) -> "ConstraintSet":
        return ConstraintSet(self.n if n is None else n, tuple(tuple(perm[i] for i in s) for s in self.subsets))

    def free_pairs(self, letters: Iterable[int] | None = None) -> list:
        """Pairs {a, b} (a < b) contained in no constraint subset."""
        ls = sorted(range(1, self.n + 1) if letters is None else letters)
        return [(a, b) for a, b in itertools.combinations(ls, 2)
                if not any(a in s and b in s for s in self.subsets)]

    def to_json(self) -> dict:
        return {"n": self.n, "sigma_one": [list(s) for s in self.subsets]}

    @classmethod
    def from_json(cls, data) -> "ConstraintSet":
        if isinstance(data, str):
            data = json.loads(data)
        unknown = set(data) - {"n", "sigma_one"}
        if unknown:
            raise ValueError(f"unknown constraint-set keys: {sorted(unknown)}")
        return cls.of(int(data["n"]), data.get("sigma_one", []))

    def __str__(self):
        return "{" + ", ".join("".join(map(str, s)) for s in self.subsets) + "}"


# elimination

def _pair_exponents(s: Sequence[int]) -> dict:
    return {VarId(i, j): 1 for i in s for j in s if i != j}


def _apply(sub: dict, exps: dict) -> dict:
    """Rewrite an exponent vector through the substitution map."""
    out = {}
    for v, e in exps.items():
        for w, f in (sub[v].items() if v in sub else ((v, 1),)):
            out[w] = out.get(w, 0) + e * f
    return {w: e for w, e in out.items() if e}


@dataclass
class Elimination:
    """Eliminated variables expressed as Laurent monomials in the free ones."""
    substitution: dict = field(default_factory=dict)
    eliminated: dict = field(default_factory=dict)
    implied: list = field(default_factory=list)
    roots: list = field(default_factory=list)

    def exponents(self, exps: dict) -> dict:
        return _apply(self.substitution, exps)

    def forces(self, s: Sequence[int]) -> bool:
        return not self.exponents(_pair_exponents(s))


def _candidate_vars(s: tuple) -> list:
    a, b = s[0], s[1]
    first = [VarId(a, b), VarId(b, a)]
    rest = [VarId(i, j) for i in s for j in s if i != j and VarId(i, j) not in first]
    return first + sorted(rest)


def eliminate_monomials(constraints: ConstraintSet, protect: Iterable[VarId] = (),
                        exponents: Callable[[tuple], dict] = _pair_exponents,
                        candidates: Callable[[tuple], list] = _candidate_vars) -> Elimination:
    """Solve sigma_S = 1 for one variable per constraint, in (size, lex) order.

    The preferred variable is q_ab with a < b the two smallest indices of S;
    if it is already eliminated, protected, or does not occur to the power +-1,
    the next candidate is used.  Constraints already implied are recorded.
    """
    protect = set(protect)
    el = Elimination()
    for s in constraints.subsets:
        m = _apply(el.substitution, exponents(s))
        if not m:
            el.implied.append(s)
            continue
        g = math.gcd(*m.values())
        if g > 1 and not any(m.get(c) in (1, -1) for c in candidates(s)
                             if c not in el.substitution and c not in protect):
            # m^g = 1 splits into components; keep the one through the identity, m = 1
            m = {w: e // g for w, e in m.items()}
            el.roots.append((s, g))
        v = next((c for c in candidates(s)
                  if c not in el.substitution and c not in protect and m.get(c) in (1, -1)), None)
        if v is None:
            raise InconsistentConstraints(f"cannot solve sigma_{''.join(map(str, s))} = 1 for a free variable")
        e = m[v]
        value = {w: -e * f for w, f in m.items() if w != v}
        for w in list(el.substitution):
            el.substitution[w] = _apply({v: value}, el.substitution[w])
        el.substitution[v] = value
        el.eliminated[s] = v
    return el


def _monomial_value(exps: dict, q: QParams):
    out = 1
    for w, e in exps.items():
        x = q.q(w.i, w.j)
        if e > 0:
            for _ in range(e):
                out = out * x
        else:
            inv = x.inverse_monomial() if isinstance(x, LaurentPoly) else 1 / x
            for _ in range(-e):
                out = out * inv
    if isinstance(out, int):
        out = ONE * out if not q.is_rational() else Fraction(out)
    return out


def eliminate_constraints(q: QParams | None, Q: ConstraintSet, protect: Iterable[VarId] = ()) -> QParams:
    """Replace one parameter per constraint so that sigma_S is identically 1 for S in Q."""
    if q is None:
        q = QParams.symbolic(Q.n)
    el = eliminate_monomials(Q, protect)
    vals = dict(q.values)
    for v, exps in el.substitution.items():
        vals[(v.i, v.j)] = _monomial_value(exps, q)
    return QParams(q.n, vals, q.diag, q.diag_sqrt)


def implied_subsets(Q: ConstraintSet, letters: Iterable[int] | None = None) -> list:
    """Every subset S (|S| >= 2) whose sigma becomes identically 1 under Q."""
    el = eliminate_monomials(Q)
    ls = sorted(range(1, Q.n + 1) if letters is None else letters)
    out = []
    for k in range(2, len(ls) + 1):
        for s in itertools.combinations(ls, k):
            if el.forces(s):
                out.append(s)
    return out


def coincident_subsets(Q: ConstraintSet, s: Sequence[int], letters: Iterable[int] | None = None) -> list:
    """Subsets T != S with sigma_T identically equal to sigma_S on V^Q (neither implied)."""
    el = eliminate_monomials(Q)
    s = tuple(sorted(s))
    target = el.exponents(_pair_exponents(s))
    if not target:
        return []
    ls = sorted(range(1, Q.n + 1) if letters is None else letters)
    return [t for k in range(2, len(ls) + 1) for t in itertools.combinations(ls, k)
            if t != s and el.exponents(_pair_exponents(t)) == target]


# sigma-level gauge

def _sigma_vars(s: tuple) -> dict:
    return {VarId(i, j): 1 for i, j in itertools.combinations(s, 2)}


def _sigma_candidates(s: tuple) -> list:
    return [VarId(i, j) for i, j in itertools.combinations(s, 2)]


def gauge_params(n: int, Q: ConstraintSet | None = None, symmetric_weights: bool = False) -> QParams:
    """Parameters with q_ij = s_ij (i < j) and q_ji = 1.

    Determinants of S-forms depend only on the sigma_ij, and this slice meets
    every gauge orbit once, with s_ij = sigma_ij.  The variable VarId(i, j), i < j,
    stands for sigma_ij.  Constraints are solved at the level of the s_ij.
    """
    Q = Q or ConstraintSet(n)
    el = eliminate_monomials(Q, exponents=_sigma_vars, candidates=_sigma_candidates)
    vals = {}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i < j:
                v = VarId(i, j)
                vals[(i, j)] = (LaurentPoly.monomial(el.substitution[v]) if v in el.substitution
                                else LaurentPoly.var(i, j))
            elif i > j:
                vals[(i, j)] = ONE
    return QParams(n, vals)


def gauge_sigma(s: Sequence[int], q: QParams):
    """sigma_S evaluated on gauge parameters (product over unordered pairs)."""
    return q.sigma(s)


# trace normal forms for pair constraints

def _commute(P) -> set:
    return {frozenset(p) for p in P}


def trace_normal_form(w: Sequence[int], P) -> tuple:
    """Lexicographically smallest word reachable by swapping adjacent commuting letters."""
    comm = _commute(P)
    rest = list(w)
    out = []
    while rest:
        best = None
        for p, x in enumerate(rest):
            if all(frozenset((x, y)) in comm for y in rest[:p]):
                if best is None or x < rest[best]:
                    best = p
        out.append(rest.pop(best))
    return tuple(out)


def trace_scalar(w: Sequence[int], target: Sequence[int], P, q: QParams):
    """Scalar c with e_w = c * e_target modulo the pair relations."""
    pw = {a: i for i, a in enumerate(w)}
    pt = {a: i for i, a in enumerate(target)}
    out = 1
    for x, y in (tuple(sorted(p)) for p in P):
        if x not in pw or y not in pw:
            continue
        if pw[x] < pw[y] and pt[y] < pt[x]:
            out = out * q.q(y, x)
        elif pw[y] < pw[x] and pt[x] < pt[y]:
            out = out * q.q(x, y)
    return out


@dataclass
class QuotientBasis:
    G: tuple
    words: list
    ideal_dim: int
    constraints: ConstraintSet
    reduce_word: Callable = field(repr=False, default=None)
    ideal_vectors: list = field(repr=False, default_factory=list)

    def reduce(self, x: NcPoly) -> NcPoly:
        """Coordinates of x in the basis words (x taken modulo the ideal)."""
        acc = {}
        for w, c in x.terms.items():
            for b, a in self.reduce_word(w).items():
                t = c * a
                acc[b] = acc[b] + t if b in acc else t
        return NcPoly(acc)

    def report(self) -> dict:
        return {"degree": list(self.G), "words": [list(w) for w in self.words], "ideal_dim": self.ideal_dim}


def quadratic_quotient_basis(G: Iterable[int], P, q: QParams | None = None) -> QuotientBasis:
    letters = tuple(sorted(G))
    pairs = [tuple(sorted(p)) for p in P]
    n = max([0, *letters, *(b for _, b in pairs)])
    cs = ConstraintSet.of(n, pairs).restrict(letters)
    pairs = list(cs.pairs())
    classes = {}
    for w in multilinear_basis(letters):
        classes.setdefault(trace_normal_form(w, pairs), []).append(w)
    words = sorted(classes)
    if q is None:
        q = eliminate_constraints(QParams.symbolic(cs.n), cs)
    for x, y in pairs:
        if q.q(x, y) * q.q(y, x) != 1:
            raise InconsistentConstraints(f"parameters do not satisfy sigma_{x}{y} = 1")
    rep = {w: r for r, ws in classes.items() for w in ws}

    def reduce_word(w):
        r = rep[tuple(w)]
        return {r: trace_scalar(w, r, pairs, q)}

    ideal = []
    for r, ws in classes.items():
        for w in ws:
            if w != r:
                ideal.append(NcPoly({w: 1}) - NcPoly({r: trace_scalar(w, r, pairs, q)}))
    return QuotientBasis(letters, words, len(multilinear_basis(letters)) - len(words), cs, reduce_word, ideal)


def ideal_vectors(G: Sequence[int], constants: dict) -> list:
    """All x*C*z of degree G for C in ``constants`` (mapping degree -> list of NcPoly).

    A constant of degree exactly G contributes itself.
    """
    letters = tuple(sorted(G))
    out = []
    for deg, cs in constants.items():
        if not cs or not set(deg) <= set(letters):
            continue
        rest = [a for a in letters if a not in deg]
        for perm in itertools.permutations(rest):
            for k in range(len(perm) + 1):
                x, z = NcPoly.word(perm[:k]), NcPoly.word(perm[k:])
                for c in cs:
                    out.append(x * c * z)
    return out


def general_quotient_basis(G: Iterable[int], Q: ConstraintSet, q: QParams,
                           constants: dict | None = None) -> QuotientBasis:
    """Quotient by the ideal of lower-degree constants at the rational point ``q``."""
    letters = tuple(sorted(G))
    if not q.is_rational():
        raise ValueError("general quotients are computed at a rational point")
    if constants is None:
        from .kernelconst import lower_constants
        constants = lower_constants(letters, q)
    words = multilinear_basis(letters)
    pos = {w: k for k, w in enumerate(words)}
    vecs = ideal_vectors(letters, constants)
    rows = []
    for v in vecs:
        row = [Fraction(0)] * len(words)
        for w, c in v.terms.items():
            row[pos[w]] = c
        rows.append(row)
    red = Reducer(rows, len(words), col_order=range(len(words) - 1, -1, -1))
    pivots = set(red.pivots)
    basis = [w for w in words if pos[w] not in pivots]
    bpos = set(pos[w] for w in basis)

    def reduce_word(w):
        vec = red.reduce({pos[tuple(w)]: Fraction(1)})
        if any(j not in bpos for j in vec):
            raise AssertionError("reduction left a non-basis word")
        return {words[j]: c for j, c in vec.items()}

    return QuotientBasis(letters, basis, red.rank, Q.restrict(letters), reduce_word, vecs)


def quotient_basis(G: Iterable[int], Q: ConstraintSet, q: QParams | None = None, spec=None) -> QuotientBasis:
    """Dispatch to the applicable construction."""
    letters = tuple(sorted(G))
    Qg = Q.restrict(letters)
    if Qg.is_quadratic():
        return quadratic_quotient_basis(letters, Qg.pairs(), q if q is not None else None)
    if q is not None and q.is_rational():
        return general_quotient_basis(letters, Qg, q)
    if spec is None:
        from .kernelconst import generic_specialization
        spec = generic_specialization(Q.n, Q.subsets, seed=0)
    return general_quotient_basis(letters, Qg, spec.params())


def build_smatrix_q(G: Iterable[int], Q: ConstraintSet, q: QParams | None = None, spec=None,
                    check: bool = True) -> SForm:
    """S_G(Q): the pairing restricted to the quotient basis, with descent verified."""
    letters = tuple(sorted(G))
    Qg = Q.restrict(letters)
    if q is None:
        q = eliminate_constraints(QParams.symbolic(Q.n), Q)
    if Qg.is_quadratic():
        qb = quadratic_quotient_basis(letters, Qg.pairs(), q)
    else:
        if q.is_rational():
            qb = general_quotient_basis(letters, Qg, q)
        else:
            if spec is None:
                from .kernelconst import generic_specialization
                spec = generic_specialization(Q.n, Q.subsets, seed=0)
            qb = general_quotient_basis(letters, Qg, spec.params())
    entries = form_on_basis(qb.words, q)
    m = SForm(qb.words, entries, q, qb)
    if check:
        check_descent(letters, Qg, q, qb, spec)
    return m


def check_descent(letters: tuple, Q: ConstraintSet, q: QParams, qb: QuotientBasis, spec=None) -> None:
    """The ideal must lie in the radical of S_G, and the basis must carry the full rank."""
    words = multilinear_basis(letters)
    if Q.is_quadratic() or q.is_rational():
        point_q = q
        vecs = qb.ideal_vectors
    else:
        point_q = spec.params()
        vecs = qb.ideal_vectors
    for v in vecs:
        for u in words:
            acc = 0
            for w, c in v.terms.items():
                acc = acc + c * pairing(u, w, point_q)
            if acc:
                raise FormDoesNotDescend(f"operator word {u} does not annihilate an ideal vector")
    if spec is not None or q.is_rational():
        pq = q if q.is_rational() else spec.params()
        full = form_on_basis(words, pq)
        r = rank(full, len(words))
        if r != len(qb.words):
            raise FormDoesNotDescend(f"rank {r} of S_G on V^Q differs from quotient dimension {len(qb.words)}")


def substitute_entries(m: SForm, assignment: dict) -> SForm:
    return m.substitute(assignment)
