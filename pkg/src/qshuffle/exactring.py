"""Exact coefficient ring: rationals, Laurent polynomials in q_ij, rational functions.

Laurent polynomials are stored as ``x^shift * p`` with ``p`` a python-flint
``fmpq_mpoly`` that has no monomial factor.  That normal form makes equality
structural and keeps exact division inside the polynomial ring.

All generators live in one fixed context of ``N_MAX**2`` variables so that
polynomials coming from different degrees can be mixed freely.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import flint

from .errors import MissingVariable, NotDivisible, SubsetTooSmall, ZeroAssignment

Rational = Fraction

N_MAX = 6
NVARS = N_MAX * N_MAX


@dataclass(frozen=True, order=True)
class VarId:
    """The parameter q_ij.  ``i == j`` is allowed for the diagonal q_ii."""
    i: int
    j: int

    def __post_init__(self):
        if not (1 <= self.i <= N_MAX and 1 <= self.j <= N_MAX):
            raise ValueError(f"generator index out of range 1..{N_MAX}: {self.i},{self.j}")

    def __str__(self):
        return f"q{self.i}_{self.j}"


def var_index(i: int, j: int) -> int:
    # generators of {1..m} occupy the first m*m slots, so small problems stay compact
    m = max(i, j)
    base = (m - 1) ** 2
    if i == j:
        return base + 2 * (m - 1)
    return base + 2 * (min(i, j) - 1) + (0 if i < j else 1)


_VARS = sorted(VarId(i, j) for i in range(1, N_MAX + 1) for j in range(1, N_MAX + 1))
_INDEX_OF = {v: var_index(v.i, v.j) for v in _VARS}
_VAR_AT = {k: v for v, k in _INDEX_OF.items()}
# rendering order: VarIds sorted lexicographically
_RENDER_SLOTS = [_INDEX_OF[v] for v in _VARS]

CTX = flint.fmpq_mpoly_ctx.get(("q", NVARS), "lex")
_ZERO_SHIFT = (0,) * NVARS
_ONE = CTX.from_dict({_ZERO_SHIFT: 1})
_ZERO = _ONE - _ONE


def rational(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, flint.fmpq):
        return Fraction(int(x.p), int(x.q))
    if isinstance(x, flint.fmpz):
        return Fraction(int(x))
    return Fraction(x)


def _fmpq(x) -> flint.fmpq:
    x = rational(x)
    return flint.fmpq(x.numerator, x.denominator)


def _mono(exps) -> flint.fmpq_mpoly:
    return CTX.from_dict({tuple(exps): 1})


class LaurentPoly:
    """Sparse Laurent polynomial in the q_ij with rational coefficients (immutable)."""

    __slots__ = ("_p", "_shift", "_hash")

    def __init__(self, p=None, shift=_ZERO_SHIFT, _normal=False):
        if p is None:
            p = _ZERO
        elif not isinstance(p, flint.fmpq_mpoly):
            p = _ONE * _fmpq(p)
        if _normal:
            self._p, self._shift = p, shift
        else:
            self._p, self._shift = _normalize(p, shift)
        self._hash = None

    # construction
    @classmethod
    def const(cls, c) -> "LaurentPoly":
        return cls(_ONE * _fmpq(c))

    @classmethod
    def var(cls, i: int, j: int) -> "LaurentPoly":
        return cls.monomial({VarId(i, j): 1})

    @classmethod
    def monomial(cls, exps: Mapping[VarId, int], coeff=1) -> "LaurentPoly":
        shift = [0] * NVARS
        for v, e in exps.items():
            shift[_INDEX_OF[v]] += e
        if coeff == 0:
            return ZERO
        return cls(_ONE * _fmpq(coeff), tuple(shift), _normal=True)

    @classmethod
    def from_terms(cls, terms: Mapping[tuple, object]) -> "LaurentPoly":
        """Build from ``{((VarId, exp), ...): coeff}``."""
        out = ZERO
        for mono, c in terms.items():
            out = out + cls.monomial(dict(mono), c)
        return out

    # inspection
    def is_zero(self) -> bool:
        return self._p.is_zero()

    def __bool__(self):
        return not self._p.is_zero()

    def is_monomial(self) -> bool:
        return len(self._p) == 1

    def is_constant(self) -> bool:
        return self._p.is_constant() and self._shift == _ZERO_SHIFT

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("not a constant")
        return rational(self._p.coefficient(0)) if len(self._p) else Fraction(0)

    def __len__(self):
        return len(self._p)

    def exponent_vectors(self):
        """Yield ``(dict VarId -> exp, Fraction)`` for every term."""
        s = self._shift
        for m, c in zip(self._p.monoms(), self._p.coeffs()):
            exps = {}
            for k in range(NVARS):
                e = m[k] + s[k]
                if e:
                    exps[_VAR_AT[k]] = e
            yield exps, rational(c)

    @property
    def terms(self) -> dict:
        """Canonical ``{((VarId, exp), ...): coeff}`` mapping."""
        return {tuple(sorted(e.items())): c for e, c in self.exponent_vectors()}

    def variables(self) -> set:
        degs = self._p.degrees()
        return {_VAR_AT[k] for k in range(NVARS) if degs[k] > 0 or self._shift[k] != 0}

    def degree_in(self, v: VarId) -> tuple[int, int]:
        """(min, max) exponent of ``v`` over the terms."""
        k = _INDEX_OF[v]
        if self.is_zero():
            return (0, 0)
        exps = [m[k] for m in self._p.monoms()]
        return (min(exps) + self._shift[k], max(exps) + self._shift[k])

    def total_degree(self) -> int:
        return self._p.total_degree() + sum(self._shift)

    def inverse_monomial(self) -> "LaurentPoly":
        if not self.is_monomial():
            raise NotDivisible("only monomials are units")
        c = self._p.coefficient(0)
        return LaurentPoly(_ONE / c, tuple(-e for e in self._shift), _normal=True)

    # arithmetic
    def _coerce(self, other):
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Fraction, flint.fmpq, flint.fmpz)):
            return LaurentPoly.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self._shift == other._shift:
            return LaurentPoly(self._p + other._p, self._shift)
        low = tuple(min(a, b) for a, b in zip(self._shift, other._shift))
        pa = self._p * _mono(a - l for a, l in zip(self._shift, low))
        pb = other._p * _mono(b - l for b, l in zip(other._shift, low))
        return LaurentPoly(pa + pb, low)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(-self._p, self._shift, _normal=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ZERO
        shift = tuple(a + b for a, b in zip(self._shift, other._shift))
        # products of monomial-free polynomials are monomial-free
        return LaurentPoly(self._p * other._p, shift, _normal=True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse_monomial() ** (-k)
        return LaurentPoly(self._p ** k, tuple(k * e for e in self._shift), _normal=True)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return poly_divide_exact(self, other)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._shift == other._shift and self._p == other._p

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._shift, tuple(self._p.monoms()), tuple(str(c) for c in self._p.coeffs())))
        return self._hash

    def __repr__(self):
        return f"LaurentPoly({render(self)!r})"

    def __str__(self):
        return render(self)

    # substitution
    def specialize(self, assignment: Mapping[VarId, object]) -> Fraction:
        return poly_specialize(self, assignment)

    def substitute(self, assignment: Mapping[VarId, object]) -> "LaurentPoly":
        """Replace some variables by nonzero rationals; other variables stay symbolic."""
        subs = {}
        factor = flint.fmpq(1)
        shift = list(self._shift)
        for v, val in assignment.items():
            k = _INDEX_OF[v]
            val = _fmpq(val)
            if val == 0:
                raise ZeroAssignment(f"{v} assigned zero")
            subs[k] = val
            if shift[k]:
                factor *= val ** shift[k]
                shift[k] = 0
        p = self._p.subs(subs) if subs else self._p
        return LaurentPoly(p * factor, tuple(shift))

    def substitute_monomials(self, assignment: Mapping[VarId, "LaurentPoly"]) -> "LaurentPoly":
        """Replace variables by Laurent polynomials (term-by-term; for small inputs)."""
        out = ZERO
        for exps, c in self.exponent_vectors():
            t = LaurentPoly.const(c)
            for v, e in exps.items():
                t = t * (assignment[v] ** e if v in assignment else LaurentPoly.monomial({v: e}))
            out = out + t
        return out

    def gcd(self, other: "LaurentPoly") -> "LaurentPoly":
        # monomials are units, so only the monomial-free parts matter
        return LaurentPoly(self._p.gcd(other._p))


def _normalize(p, shift):
    if p.is_zero():
        return _ZERO, _ZERO_SHIFT
    c = p.term_content()
    m = c.monoms()[0]
    if any(m):
        p = p / c
        shift = tuple(a + b for a, b in zip(shift, m))
    return p, shift


ZERO = LaurentPoly(_ZERO, _ZERO_SHIFT, _normal=True)
ONE = LaurentPoly(_ONE, _ZERO_SHIFT, _normal=True)


def poly_add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a + b


def poly_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def poly_neg(a: LaurentPoly) -> LaurentPoly:
    return -a


def poly_divide_exact(num: LaurentPoly, div: LaurentPoly) -> LaurentPoly:
    """Exact quotient; raises ``NotDivisible`` when ``div`` does not divide ``num``."""
    if div.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if num.is_zero():
        return ZERO
    try:
        p = num._p / div._p
    except Exception as exc:  # flint raises DomainError on inexact division
        raise NotDivisible(str(exc)) from None
    shift = tuple(a - b for a, b in zip(num._shift, div._shift))
    r = LaurentPoly(p, shift)
    if r * div != num:
        raise NotDivisible("multiplication-back check failed")
    return r


def compact_rows(rows) -> tuple:
    """Rows of Laurent polynomials as flint polynomials over only the variables in use.

    Each row is multiplied by a monomial that clears its negative exponents.
    Returns ``(rows, one, used, shift)``: the flint rows, the unit of their ring,
    the used variable slots, and the total exponent shift, so that
    det(original) = x^shift * det(compact).
    """
    polys = [[x if isinstance(x, LaurentPoly) else LaurentPoly.const(x) for x in r] for r in rows]
    used = sorted({k for r in polys for x in r if not x.is_zero()
                   for k, (d, sh) in enumerate(zip(x._p.degrees(), x._shift)) if d or sh})
    ctx = flint.fmpq_mpoly_ctx.get(("c", max(len(used), 1)), "lex")
    total = [0] * NVARS
    out = []
    for r in polys:
        nz = [x for x in r if not x.is_zero()]
        low = {k: min(x._shift[k] for x in nz) for k in used} if nz else {}
        for k, e in low.items():
            total[k] += e
        row = []
        for x in r:
            terms = {}
            for m, c in zip(x._p.monoms(), x._p.coeffs()):
                key = tuple(m[k] + x._shift[k] - low[k] for k in used) or (0,)
                terms[key] = c
            row.append(ctx.from_dict(terms) if terms else ctx.from_dict({}))
        out.append(row)
    return out, ctx.from_dict({(0,) * ctx.nvars(): 1}), used, tuple(total)


def from_compact(p, used: list, shift: tuple) -> LaurentPoly:
    """Inverse of ``compact_rows`` for a single polynomial."""
    terms = {}
    for m, c in zip(p.monoms(), p.coeffs()):
        e = [0] * NVARS
        for k, v in zip(used, m):
            e[k] = v
        terms[tuple(e)] = c
    return LaurentPoly(CTX.from_dict(terms) if terms else _ZERO, shift)


def poly_specialize(p: LaurentPoly, assignment: Mapping[VarId, object]) -> Fraction:
    """Evaluate at nonzero rationals; every variable of ``p`` must be assigned."""
    needed = p.variables()
    missing = [v for v in needed if v not in assignment]
    if missing:
        raise MissingVariable(", ".join(str(v) for v in sorted(missing)))
    vals = [flint.fmpq(0)] * NVARS
    factor = flint.fmpq(1)
    for v in needed:
        val = _fmpq(assignment[v])
        if val == 0:
            raise ZeroAssignment(f"{v} assigned zero")
        k = _INDEX_OF[v]
        vals[k] = val
        if p._shift[k]:
            factor *= val ** p._shift[k]
    if p.is_zero():
        return Fraction(0)
    return rational(p._p(*vals) * factor)


def sigma_monomial(subset: Iterable[int]) -> LaurentPoly:
    """The product of q_ij over all ordered pairs i != j in ``subset``."""
    s = sorted(set(subset))
    if len(s) < 2:
        raise SubsetTooSmall(f"sigma needs at least two indices, got {s}")
    return LaurentPoly.monomial({VarId(i, j): 1 for i in s for j in s if i != j})


def sigma_name(subset: Iterable[int]) -> str:
    return "s" + "".join(str(i) for i in sorted(subset))


class RatFunc:
    """Quotient num/den of Laurent polynomials; equality by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=ONE):
        num = num if isinstance(num, LaurentPoly) else LaurentPoly.const(num)
        den = den if isinstance(den, LaurentPoly) else LaurentPoly.const(den)
        if den.is_zero():
            raise ZeroDivisionError("RatFunc with zero denominator")
        self.num, self.den = num, den

    @staticmethod
    def _coerce(other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (LaurentPoly, int, Fraction)):
            return RatFunc(other)
        return None

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def reduced(self) -> "RatFunc":
        g = self.num.gcd(self.den)
        if g.is_zero() or g == ONE:
            return self
        return RatFunc(poly_divide_exact(self.num, g), poly_divide_exact(self.den, g))

    def __repr__(self):
        return f"RatFunc(({render(self.num)}) / ({render(self.den)}))"


# rendering

def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _sigma_word(exps: dict):
    """Name a monomial as a product of sigma's, or None if it is not one."""
    pairs = {}
    for v, e in exps.items():
        if v.i == v.j:
            return None
        if exps.get(VarId(v.j, v.i)) != e:
            return None
        if v.i < v.j:
            pairs[(v.i, v.j)] = e
    if not pairs:
        return None
    letters = sorted({i for p in pairs for i in p})
    full = {(a, b) for a in letters for b in letters if a < b}
    if set(pairs) == full and len(set(pairs.values())) == 1:
        e = next(iter(pairs.values()))
        name = sigma_name(letters)
        return name if e == 1 else f"{name}^{e}"
    return "*".join(sigma_name(p) + ("" if e == 1 else f"^{e}") for p, e in sorted(pairs.items()))


def _fmt_mono(exps: dict, sigma: bool) -> str:
    if sigma:
        name = _sigma_word(exps)
        if name is not None:
            return name
    parts = []
    for v in sorted(exps):
        e = exps[v]
        parts.append(str(v) if e == 1 else f"{v}^{e}")
    return "*".join(parts)


def _render_key(exps: dict):
    return tuple(exps.get(v, 0) for v in _VARS)


def render(p, sigma: bool = False) -> str:
    """Canonical text: terms in monomial order, ``q1_2`` variables, optional ``s123`` names."""
    if isinstance(p, RatFunc):
        return f"({render(p.num, sigma)})/({render(p.den, sigma)})"
    if isinstance(p, Fraction) or isinstance(p, int):
        return _fmt_coeff(Fraction(p))
    if p.is_zero():
        return "0"
    terms = sorted(p.exponent_vectors(), key=lambda t: _render_key(t[0]))
    out = []
    for exps, c in terms:
        mono = _fmt_mono(exps, sigma)
        mag = abs(c)
        if not mono:
            body = _fmt_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(mag)}*{mono}"
        if not out:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)
