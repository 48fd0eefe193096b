"""Constants at exact rational points of parameter space.

Three independent routes are compared:

* kernel of the form S_G(Q) on the quotient basis;
* the linear system d_a C = 0 (mod the ideal) solved over the quotient basis;
* genuine constants of the free algebra (d_a C = 0 exactly) modulo the ideal
  generated by constants of lower degree.

A point is accepted only after every subset product sigma_T has been checked:
sigma_T = 1 exactly when T is forced or implied by the forced subsets.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import flint

from .errors import ExhaustedRetries, InconsistentConstraints, OracleMismatch
from .exactring import LaurentPoly, VarId
from .freealg import NcPoly, QParams, apply_partial, is_constant
from .quotient import (ConstraintSet, coincident_subsets, eliminate_monomials, general_quotient_basis,
                       ideal_vectors, quadratic_quotient_basis, _sigma_candidates, _sigma_vars)
from .ratlinalg import nullspace, rank
from .smatrix import SForm, derivative_matrix, form_on_basis, multilinear_basis

LOW, HIGH = 2, 97


@dataclass
class Specialization:
    """A certified point of V^Q: sigma_T = 1 exactly for forced or implied T."""
    n: int
    assignment: dict
    seed: int
    forced: tuple = ()
    implied: tuple = ()
    symmetric: bool = False
    _elimination: object = field(default=None, repr=False)
    _free_values: dict = field(default_factory=dict, repr=False)

    def params(self, keep: Iterable[VarId] = ()) -> QParams:
        """Rational parameters; variables in ``keep`` stay symbolic (a line through the point)."""
        keep = set(keep)
        if not keep:
            return QParams.from_assignment(self.n, self.assignment)
        el = self._elimination
        free = {}
        for v, val in self._free_values.items():
            free[v] = LaurentPoly.var(v.i, v.j) if v in keep else val
        vals = {}
        for v, val in free.items():
            vals[v] = val
        for v, exps in el.substitution.items():
            out = LaurentPoly.const(1)
            for w, e in exps.items():
                x = free[w]
                out = out * (x ** e if isinstance(x, LaurentPoly) else LaurentPoly.const(Fraction(x) ** e))
            vals[v] = out
        qv = {}
        for i in range(1, self.n + 1):
            for j in range(1, self.n + 1):
                if i == j:
                    continue
                if self.symmetric:
                    val = vals[VarId(min(i, j), max(i, j))]
                else:
                    val = vals[VarId(i, j)]
                if isinstance(val, LaurentPoly) and val.is_constant():
                    val = val.constant_value()
                qv[(i, j)] = val if isinstance(val, LaurentPoly) else Fraction(val)
        if all(not isinstance(v, LaurentPoly) for v in qv.values()):
            return QParams(self.n, qv)
        return QParams(self.n, {k: (v if isinstance(v, LaurentPoly) else LaurentPoly.const(v)) for k, v in qv.items()})

    def sigma(self, s: Sequence[int]) -> Fraction:
        out = Fraction(1)
        for i in s:
            for j in s:
                if i != j:
                    out *= self.assignment[VarId(i, j)]
        return out


def _all_subsets(n: int):
    for k in range(2, n + 1):
        yield from itertools.combinations(range(1, n + 1), k)


def generic_specialization(n: int, forced: Iterable[Iterable[int]] = (), seed: int = 0,
                           symmetric: bool = False, protect: Iterable[VarId] = (),
                           max_retries: int = 64) -> Specialization:
    """Seeded rationals with numerators and denominators in [2, 97], adjusted so sigma_S = 1 on ``forced``."""
    Q = ConstraintSet.of(n, forced)
    if symmetric:
        el = eliminate_monomials(Q, protect, exponents=_sigma_vars, candidates=_sigma_candidates)
        free_vars = [VarId(i, j) for i, j in itertools.combinations(range(1, n + 1), 2)]
    else:
        el = eliminate_monomials(Q, protect)
        free_vars = [VarId(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    free_vars = [v for v in free_vars if v not in el.substitution]
    implied = tuple(s for s in _all_subsets(n)
                    if not el.exponents((_sigma_vars if symmetric else _pair_exponents_q)(s)))
    for attempt in range(max_retries):
        rng = random.Random(seed + attempt)
        free = {}
        for v in free_vars:
            x = Fraction(1)
            while x == 1:
                x = Fraction(rng.randint(LOW, HIGH), rng.randint(LOW, HIGH))
            free[v] = x
        values = dict(free)
        for v, exps in el.substitution.items():
            x = Fraction(1)
            for w, e in exps.items():
                x *= free[w] ** e
            values[v] = x
        if symmetric:
            assignment = {}
            for (i, j), x in ((tuple((v.i, v.j)), x) for v, x in values.items()):
                assignment[VarId(i, j)] = x
                assignment[VarId(j, i)] = x
        else:
            assignment = values
        spec = Specialization(n, assignment, seed + attempt, tuple(Q.subsets), implied, symmetric, el, free)
        if all((spec.sigma(s) == 1) == (s in implied) for s in _all_subsets(n)):
            return spec
    raise ExhaustedRetries(f"no generic point found after {max_retries} seeds")


def _pair_exponents_q(s):
    return {VarId(i, j): 1 for i in s for j in s if i != j}


def kernel_basis(m) -> list:
    """Right nullspace {v : M v = 0} of a rational square matrix."""
    rows = m.entries if isinstance(m, SForm) else m
    return nullspace(rows, len(rows[0]) if rows else 0)


def vector_to_ncpoly(vec: Sequence, words: Sequence) -> NcPoly:
    return NcPoly({w: c for w, c in zip(words, vec) if c})


def genuine_constants(G: Sequence[int], q: QParams) -> list:
    """Basis of {C of degree G : d_a C = 0 for all a} via the stacked derivative map."""
    letters = tuple(sorted(G))
    if len(letters) < 2:
        return []
    rows, cols, e = derivative_matrix(letters, q)
    return [vector_to_ncpoly(v, cols) for v in nullspace(e, len(cols))]


def lower_constants(G: Sequence[int], q: QParams) -> dict:
    """Genuine constants of every proper sub-degree of G (size >= 2)."""
    letters = tuple(sorted(G))
    out = {}
    for k in range(2, len(letters)):
        for sub in itertools.combinations(letters, k):
            out[sub] = genuine_constants(sub, q)
    return out


@dataclass
class ConstantSpace:
    degree: tuple
    basis: list
    primitive_dim: int
    quotient_kernel: list = field(default_factory=list)
    quotient_dim: int = 0
    brute_force_dim: int | None = None

    @property
    def dim(self) -> int:
        return len(self.basis)


def _vectors(polys: Sequence[NcPoly], words: Sequence) -> list:
    pos = {w: k for k, w in enumerate(words)}
    rows = []
    for p in polys:
        row = [Fraction(0)] * len(words)
        for w, c in p.terms.items():
            row[pos[w]] = c
        rows.append(row)
    return rows


def _quotient(letters, Q, q, lower, quadratic):
    if quadratic:
        return quadratic_quotient_basis(letters, Q.restrict(letters).pairs(), q)
    # every constant of degree inside ``letters`` lies in the ideal, including degree = letters
    sub = {d: cs for d, cs in lower.items() if set(d) <= set(letters)}
    return general_quotient_basis(letters, Q.restrict(letters), q, constants=sub)


def brute_force_constant_dim(G: Sequence[int], Q: ConstraintSet, q: QParams, lower: dict | None = None,
                             quadratic: bool = False) -> int:
    """Dimension of {C in B_G(Q) : d_a C = 0 in B_{G-a}(Q) for every a}, solved directly."""
    letters = tuple(sorted(G))
    if lower is None:
        lower = lower_constants(letters, q)
    qb = _quotient(letters, Q, q, lower, quadratic)
    rows = []
    for a in letters:
        rest = tuple(b for b in letters if b != a)
        sub = _quotient(rest, Q, q, lower, quadratic)
        index = {w: k for k, w in enumerate(sub.words)}
        block = [[Fraction(0)] * len(qb.words) for _ in sub.words]
        for c, w in enumerate(qb.words):
            red = sub.reduce(apply_partial(a, NcPoly.word(w), q))
            for v, x in red.terms.items():
                block[index[v]][c] += x
        rows.extend(block)
    return len(qb.words) - rank(rows, len(qb.words))


def constant_space(G: Sequence[int], Q: ConstraintSet, spec: Specialization,
                   brute_force: bool | None = None, quadratic: bool | None = None) -> ConstantSpace:
    """Constants of degree G at ``spec`` with their primitive dimension, cross-checked."""
    letters = tuple(sorted(G))
    q = spec.params()
    Qg = Q.restrict(letters)
    if quadratic is None:
        quadratic = False
    if brute_force is None:
        brute_force = len(letters) <= 4
    lower = lower_constants(letters, q)
    words = multilinear_basis(letters)

    # genuine constants: kernel of the full form, then the exact derivative test
    full = form_on_basis(words, q)
    radical = [vector_to_ncpoly(v, words) for v in nullspace(full, len(words))]
    genuine = _constants_in(radical, letters, q, words)
    for c in genuine:
        if not is_constant(c, q):
            raise OracleMismatch("kernel element failed the direct derivative test")
    ideal = ideal_vectors(letters, lower)
    ideal_rows = _vectors(ideal, words)
    r_ideal = rank(ideal_rows, len(words)) if ideal_rows else 0
    r_both = rank(ideal_rows + _vectors(genuine, words), len(words)) if (ideal_rows or genuine) else 0
    primitive = r_both - r_ideal

    # quotient route
    qb = _quotient(letters, Qg, q, lower, quadratic)
    sq = form_on_basis(qb.words, q)
    kern = [vector_to_ncpoly(v, qb.words) for v in nullspace(sq, len(qb.words))]
    for c in kern:
        for a in letters:
            rest = tuple(b for b in letters if b != a)
            sub = _quotient(rest, Qg, q, lower, quadratic)
            if not sub.reduce(apply_partial(a, c, q)).is_zero():
                raise OracleMismatch("quotient kernel vector is not a constant modulo the ideal")
    if len(kern) != primitive:
        raise OracleMismatch(f"quotient kernel dimension {len(kern)} != primitive dimension {primitive}")
    bf = None
    if brute_force:
        bf = brute_force_constant_dim(letters, Qg, q, lower, quadratic)
        if bf != len(kern):
            raise OracleMismatch(f"derivative solver found {bf} constants, kernel has {len(kern)}")
    return ConstantSpace(letters, genuine, primitive, kern, len(kern), bf)


def _constants_in(span: Sequence[NcPoly], letters: tuple, q: QParams, words: Sequence) -> list:
    """Subspace of ``span`` killed by every d_a (a small linear system)."""
    if not span:
        return []
    images = []
    for v in span:
        img = {}
        for a in letters:
            for w, c in apply_partial(a, v, q).terms.items():
                img[(a, w)] = c
        images.append(img)
    keys = sorted({k for img in images for k in img})
    if not keys:
        return list(span)
    cols = [[img.get(k, Fraction(0)) for img in images] for k in keys]
    out = []
    for coeffs in nullspace(cols, len(span)):
        acc = NcPoly()
        for c, v in zip(coeffs, span):
            if c:
                acc = acc + v.scale(c)
        out.append(acc)
    return out


# determinants on a line through a specialization

def univariate(p, v: VarId) -> tuple:
    """(fmpq_poly f, shift) with p = v^shift * f(v); p may only involve ``v``."""
    if not isinstance(p, LaurentPoly):
        return flint.fmpq_poly([Fraction(p).numerator]) / Fraction(p).denominator, 0
    terms = {}
    for exps, c in p.exponent_vectors():
        if set(exps) - {v}:
            raise ValueError("polynomial is not univariate in the line parameter")
        terms[exps.get(v, 0)] = c
    if not terms:
        return flint.fmpq_poly([]), 0
    low = min(terms)
    coeffs = [flint.fmpq(0)] * (max(terms) - low + 1)
    for e, c in terms.items():
        coeffs[e - low] = flint.fmpq(c.numerator, c.denominator)
    return flint.fmpq_poly(coeffs), low


def root_multiplicity(f, t0: Fraction) -> int:
    """Order of vanishing of the polynomial f at t0."""
    lin = flint.fmpq_poly([-flint.fmpq(t0.numerator, t0.denominator), 1])
    k = 0
    while not f.is_zero():
        quo, rem = divmod(f, lin)
        if not rem.is_zero():
            break
        f = quo
        k += 1
    return k


@dataclass
class LinePoint:
    """Where sigma_S reaches 1 along the line q_v = t, all other parameters fixed."""
    subset: tuple
    parameter: VarId
    value: Fraction
    exponent: int
    kernel_dim: int | None = None
    coincident: tuple = ()


def line_determinant(G: Sequence[int], Q: ConstraintSet, spec: Specialization, v: VarId):
    """det S_G(Q) with every parameter at ``spec`` except ``v``, which stays symbolic."""
    from .quotient import build_smatrix_q
    from .smatrix import det_exact
    letters = tuple(sorted(G))
    q = spec.params(keep={v})
    m = build_smatrix_q(letters, Q, q, spec=spec, check=False)
    return det_exact(m), m


def _solve_sigma(spec: Specialization, s: tuple, v: VarId) -> Fraction:
    """Value of the line parameter at which sigma_S = 1.

    For symmetric weights sigma_S is the square of the weight product and the
    root taken is the one where that product equals 1.
    """
    q = spec.params(keep={v})
    target = _product_of_weights(q, s) if spec.symmetric else q.sigma(s)
    f, shift = univariate(target, v)
    nonzero = [x for x in f.coeffs() if x != 0]
    if len(nonzero) != 1 or f.degree() + shift != 1:
        raise ValueError(f"sigma_{''.join(map(str, s))} is not linear in the line parameter")
    c = nonzero[0]
    return 1 / Fraction(int(c.p), int(c.q))


def _product_of_weights(q: QParams, s: tuple):
    out = 1
    for i, j in itertools.combinations(s, 2):
        out = out * q.q(i, j)
    return out


def restrict_to_point(spec: Specialization, v: VarId, t0: Fraction) -> Specialization:
    """The specialization with the free variable ``v`` moved to t0, certified afresh."""
    free = dict(spec._free_values)
    free[v] = t0
    el = spec._elimination
    values = dict(free)
    for w, exps in el.substitution.items():
        x = Fraction(1)
        for u, e in exps.items():
            x *= free[u] ** e
        values[w] = x
    if spec.symmetric:
        assignment = {}
        for w, x in values.items():
            assignment[VarId(w.i, w.j)] = x
            assignment[VarId(w.j, w.i)] = x
    else:
        assignment = values
    return Specialization(spec.n, assignment, spec.seed, spec.forced, spec.implied, spec.symmetric, el, free)


def line_exponent(G: Sequence[int], Q: ConstraintSet, spec: Specialization, subset: Sequence[int] | None = None,
                  v: VarId | None = None, kernel: bool = True) -> LinePoint:
    """Exponent of (1 - sigma_S) in det S_G(Q), read as a root multiplicity on a line.

    The point t0 on the line where sigma_S = 1 is certified: no other subset
    product equals 1 there beyond those implied by Q and those identically
    equal to sigma_S on V^Q (reported as ``coincident``; their factors cannot
    be separated from 1 - sigma_S).  At t0 the kernel of S_G(Q) is computed
    as well when ``kernel`` is set.
    """
    letters = tuple(sorted(G))
    s = tuple(sorted(subset)) if subset is not None else letters
    n = spec.n
    v = v or VarId(letters[0], letters[-1])
    same = tuple(coincident_subsets(ConstraintSet.of(n, spec.forced), s, letters))
    t0 = _solve_sigma(spec, s, v)
    point = restrict_to_point(spec, v, t0)
    bad = [T for T in _all_subsets(n) if set(T) <= set(letters) and T != s
           and T not in spec.implied and T not in same and point.sigma(T) == 1]
    if bad or point.sigma(s) != 1:
        raise ExhaustedRetries(f"line point is not generic: sigma = 1 also on {bad}")
    d, _ = line_determinant(letters, Q, spec, v)
    f, _shift = univariate(d, v)
    e = root_multiplicity(f, t0)
    kd = None
    if kernel:
        from .quotient import build_smatrix_q
        m = build_smatrix_q(letters, Q, point.params(), check=False)
        kd = len(kernel_basis(m))
    return LinePoint(s, v, t0, e, kd, same)


def symmetric_line_check(G: Sequence[int], Q: ConstraintSet, seed: int = 0, symmetric: bool = True) -> LinePoint:
    """Exponent of (1 - sigma_G) versus kernel dimension at the point where it vanishes.

    Only the free pair {min G, max G} moves; the rest sit at a certified
    generic point of V^Q.  For symmetric parameters the two numbers agree.
    """
    letters = tuple(sorted(G))
    v = VarId(letters[0], letters[-1])
    if (letters[0], letters[-1]) not in Q.free_pairs(letters):
        raise InconsistentConstraints(f"pair {{{letters[0]},{letters[-1]}}} is constrained")
    for attempt in range(64):
        spec = generic_specialization(Q.n, Q.subsets, seed=seed + 1000 * attempt, symmetric=symmetric, protect={v})
        try:
            return line_exponent(letters, Q, spec, letters, v)
        except ExhaustedRetries:
            continue
    raise ExhaustedRetries("no generic line found")
