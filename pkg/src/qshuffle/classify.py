"""Primitive boundaries: path criterion, word classes, and the type catalog.

Words e_w of B_G(Q) with e_1 before e_n are positive; such a word reads
x e_1 y e_n z and its class is the set of letters of y.  Counting is done at an
exact rational point of V^Q in coordinates of the quotient basis, so every
count is a rank.  Kernel computations are the authority; the predicates are
checked against them.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import NoFreePair, OracleMismatch, ProvisoViolated, SizeTooLarge
from .freealg import NcPoly, QParams
from .kernelconst import (Specialization, generic_specialization, kernel_basis, line_exponent,
                          lower_constants)
from .quotient import (ConstraintSet, build_smatrix_q, general_quotient_basis, implied_subsets,
                       quadratic_quotient_basis, subset_key)
from .ratlinalg import IncrementalSpan
from .smatrix import form_on_basis

EXHAUSTIVE_MAX = 4


# relabeling

def free_pair(Q: ConstraintSet, letters: Sequence[int]) -> tuple | None:
    """Lexicographically smallest pair of ``letters`` contained in no constraint."""
    pairs = Q.free_pairs(letters)
    return pairs[0] if pairs else None


def free_pair_relabeling(letters: Sequence[int], pair: tuple) -> dict:
    """Map letters to 1..n with pair[0] -> 1, pair[1] -> n, the rest in increasing order."""
    a, b = pair
    rest = [x for x in sorted(letters) if x not in (a, b)]
    perm = {a: 1, b: len(letters)}
    perm.update({x: k + 2 for k, x in enumerate(rest)})
    return perm


def relabeled(G: Sequence[int], Q: ConstraintSet) -> tuple:
    """(n, Q on 1..n with the free pair at {1, n}, relabeling map) or NoFreePair."""
    letters = tuple(sorted(G))
    Qg = Q.restrict(letters)
    pair = free_pair(Qg, letters)
    if pair is None:
        raise NoFreePair(f"every pair of {list(letters)} lies in a constraint")
    perm = free_pair_relabeling(letters, pair)
    return len(letters), Qg.relabel(perm, len(letters)), perm


# path criterion

def _simple_paths_cover(n: int, allowed: set) -> set:
    """Vertices lying on some simple path from 1 to n using only ``allowed`` pairs."""
    covered = set()

    def walk(path, seen):
        last = path[-1]
        if last == n:
            covered.update(path)
            return
        for y in range(1, n + 1):
            if y not in seen and (min(last, y), max(last, y)) in allowed:
                seen.add(y)
                path.append(y)
                walk(path, seen)
                path.pop()
                seen.discard(y)

    walk([1], {1})
    return covered


def theorem42_predicate(n: int, P: Iterable[Sequence[int]]) -> bool:
    """Every interior letter lies on a simple path 1 .. i .. n avoiding the pairs of P.

    Letters are first relabeled so the smallest free pair is {1, n}.  Returns
    False when every pair is in P (the determinant is then 1).
    """
    Q = ConstraintSet.of(n, P)
    if not Q.is_quadratic():
        raise ValueError("the path criterion applies to pair constraints only")
    try:
        m, Qr, _ = relabeled(range(1, n + 1), Q)
    except NoFreePair:
        return False
    allowed = {p for p in itertools.combinations(range(1, m + 1), 2) if p not in Qr.pairs()}
    return _simple_paths_cover(m, allowed) >= set(range(1, m + 1))


# quotient coordinates at a rational point

class PointQuotients:
    """Quotient bases B_H(Q) for subsets H of G at one rational point, cached."""

    def __init__(self, Q: ConstraintSet, q: QParams):
        self.Q = Q
        self.q = q
        self._lower = {}
        self._bases = {}

    def basis(self, letters: Sequence[int]):
        letters = tuple(sorted(letters))
        if letters not in self._bases:
            Qh = self.Q.restrict(letters)
            if Qh.is_quadratic():
                qb = quadratic_quotient_basis(letters, Qh.pairs(), self.q)
            else:
                qb = general_quotient_basis(letters, Qh, self.q, constants=self.lower(letters))
            self._bases[letters] = qb
        return self._bases[letters]

    def lower(self, letters: tuple) -> dict:
        if letters not in self._lower:
            self._lower[letters] = lower_constants(letters, self.q)
        return self._lower[letters]

    def coordinates(self, letters: Sequence[int], w: Sequence[int]) -> dict:
        qb = self.basis(letters)
        index = {b: k for k, b in enumerate(qb.words)}
        return {index[b]: c for b, c in qb.reduce(NcPoly.word(w)).terms.items()}


# word classes

def positive_split(w: Sequence[int], n: int):
    """(x, y, z) with w = x 1 y n z, or None if n precedes 1."""
    i, j = w.index(1), w.index(n)
    if i > j:
        return None
    return tuple(w[:i]), tuple(w[i + 1:j]), tuple(w[j + 1:])


def interior_classes(n: int) -> list:
    inner = range(2, n)
    out = [c for k in range(n - 1) for c in itertools.combinations(inner, k)]
    return sorted(out, key=subset_key)


@dataclass
class ClassRow:
    cls: tuple
    u: int | None
    v: int
    count: int
    factors: list = field(default_factory=list)
    words: list = field(default_factory=list)
    u_by_factor: list = field(default_factory=list)


@dataclass
class WordClassTable:
    n: int
    constraints: ConstraintSet
    relabeling: dict
    rows: list
    half_dim: int
    dim: int

    def total(self) -> int:
        return sum((r.u or 0) * r.v for r in self.rows)

    def first_sum_rule(self) -> bool:
        return self.total() == self.half_dim and 2 * self.half_dim == self.dim

    def row(self, cls: Iterable[int]) -> ClassRow:
        c = tuple(sorted(cls))
        return next(r for r in self.rows if r.cls == c)

    def u_depends_only_on_degree(self) -> bool:
        return all(len(set(r.u_by_factor)) <= 1 for r in self.rows)

    def render(self) -> str:
        lines = ["class  u  v  words"]
        for r in self.rows:
            name = "(" + "".join(map(str, r.cls)) + ")" if r.cls else "(.)"
            u = "" if r.u is None else str(r.u)
            words = ", ".join("e" + ".e".join(map(str, w)) for w in r.words)
            lines.append(f"{name:6} {u:>2} {r.v:>2}  {words}".rstrip())
        lines.append(f"sum u*v = {self.total()} = dim/2 = {self.half_dim}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"n": self.n, "constraints": self.constraints.to_json(),
                "relabeling": {str(k): v for k, v in sorted(self.relabeling.items())},
                "rows": [{"class": list(r.cls), "u": r.u, "v": r.v, "count": r.count,
                          "words": [list(w) for w in r.words]} for r in self.rows],
                "sum_uv": self.total(), "half_dim": self.half_dim}


def _positive_words(letters: Sequence[int], n: int) -> dict:
    by_class = {}
    for w in itertools.permutations(letters):
        s = positive_split(w, n)
        if s is not None:
            by_class.setdefault(tuple(sorted(s[1])), []).append(w)
    return by_class


def word_class_table(G: Sequence[int], Q: ConstraintSet, seed: int = 0,
                     spec: Specialization | None = None) -> WordClassTable:
    """Class counts u(g), v(g) of the positive words of B_G(Q)."""
    n, Qr, perm = relabeled(G, Q)
    if spec is None:
        spec = generic_specialization(n, Qr.subsets, seed=seed)
    pq = PointQuotients(Qr, spec.params())
    letters = tuple(range(1, n + 1))
    dim = len(pq.basis(letters).words)
    words = _positive_words(letters, n)
    order = interior_classes(n)

    # greedy basis of the positive part, class by class
    span = IncrementalSpan()
    before = {}
    kept = {}
    for g in order:
        before[g] = span.copy()
        kept[g] = [w for w in words.get(g, []) if span.add(pq.coordinates(letters, w))]

    rows = []
    for g in order:
        hat = (1, *g, n)
        sub_words = _positive_words(hat, n)
        sub_span = IncrementalSpan()
        for h in order:
            if h == g:
                break
            if set(h) <= set(g):
                for w in sub_words.get(h, []):
                    sub_span.add(pq.coordinates(hat, w))
        factors = [w[1:-1] for w in sub_words.get(g, []) if sub_span.add(pq.coordinates(hat, w))]
        u_list = []
        rest = [a for a in letters if a not in hat]
        for y in factors:
            trial = before[g].copy()
            count = 0
            for p in itertools.permutations(rest):
                for k in range(len(p) + 1):
                    w = p[:k] + (1, *y, n) + p[k:]
                    if trial.add(pq.coordinates(letters, w)):
                        count += 1
            u_list.append(count)
        u = u_list[0] if u_list else None
        rows.append(ClassRow(g, u, len(factors), len(kept[g]), factors, kept[g], u_list))
    half = span.rank
    return WordClassTable(n, Qr, perm, rows, half, dim)


# top-class count

@dataclass
class Theorem65Result:
    exponent: int
    primitive: bool
    relabeling: dict
    determinant_exponent: int | None = None
    coincident: tuple = ()


def theorem65_predicate(G: Sequence[int], Q: ConstraintSet, seed: int = 0, cross_check: bool | None = None):
    """Exponent of (1 - sigma_G) in det S_G(Q) as the number of words of the top class."""
    letters = tuple(sorted(G))
    try:
        n, Qr, perm = relabeled(letters, Q)
    except NoFreePair as exc:
        raise ProvisoViolated(str(exc)) from None
    if tuple(range(1, n + 1)) in Qr or tuple(range(1, n + 1)) in implied_subsets(Qr):
        raise ProvisoViolated("sigma_G is already 1 on V^Q")
    table = word_class_table(range(1, n + 1), Qr, seed=seed)
    top = table.row(range(2, n)).count
    res = Theorem65Result(top, top > 0, perm)
    if cross_check is None:
        cross_check = n <= EXHAUSTIVE_MAX
    if cross_check:
        pt = determinant_top_exponent(n, Qr, seed)
        res.determinant_exponent, res.coincident = pt.exponent, pt.coincident
        # a sigma_{1gn} equal to sigma_G on V^Q shares its root; its words add up
        shared = {(1, *r.cls, n) for r in table.rows} & set(pt.coincident)
        expected = top + sum(r.count for r in table.rows if (1, *r.cls, n) in shared)
        if pt.exponent != expected:
            raise OracleMismatch(f"class count {expected} != determinant exponent {pt.exponent}")
    return res


def determinant_top_exponent(n: int, Q: ConstraintSet, seed: int = 0):
    """Multiplicity of the root sigma_{1..n} = 1 of det S_G(Q) on the q_1n line; {1, n} must be free."""
    from .kernelconst import symmetric_line_check
    return symmetric_line_check(tuple(range(1, n + 1)), Q, seed=seed, symmetric=False)


def second_sum_rule(G: Sequence[int], Q: ConstraintSet, seed: int = 0) -> tuple:
    """(sum of u(g) * exponent of (1 - sigma_{1 g n}) in det S_{1gn}(Q), half dimension).

    Each exponent is measured on a line. When another sigma_{1hn} equals
    sigma_{1gn} on V^Q the two roots merge, and the measured multiplicity is
    checked against v(g) plus the basis words of class h inside 1gn.
    """
    table = word_class_table(G, Q, seed=seed)
    n, Qr = table.n, table.constraints
    spec = generic_specialization(n, Qr.subsets, seed=seed, protect={_line_var(n)})
    pq = PointQuotients(Qr, spec.params())
    total = 0
    tildes = {}
    for r in table.rows:
        hat = (1, *r.cls, n)
        if hat in implied_subsets(Qr, hat):
            e, expected = 0, r.v
        else:
            pt = line_exponent(hat, Qr, spec, hat, _line_var(n), kernel=False)
            e = pt.exponent
            expected = r.v + _coincident_words(pq, hat, n, pt.coincident)
        tildes[r.cls] = r.v
        total += (r.u or 0) * r.v
        if e != expected:
            raise OracleMismatch(f"class {r.cls}: v = {r.v} but determinant exponent {e}")
    return total, table.half_dim, tildes


def _coincident_words(pq, hat: tuple, n: int, coincident) -> int:
    """Basis words of B_hat in the classes whose sigma coincides with sigma_hat."""
    shared = {tuple(t[1:-1]) for t in coincident if t[0] == 1 and t[-1] == n}
    if not shared:
        return 0
    words = _positive_words(hat, n)
    span = IncrementalSpan()
    count = 0
    for g in interior_classes(n):
        if not set(g) <= set(hat):
            continue
        for w in words.get(g, []):
            if span.add(pq.coordinates(hat, w)) and g in shared:
                count += 1
    return count


def _line_var(n: int):
    from .exactring import VarId
    return VarId(1, n)


# brute force

def primitive_boundary_brute(G: Sequence[int], Q: ConstraintSet, seed: int = 0) -> int:
    """Primitive constants of degree G at a certified point of V^Q with sigma_G = 1.

    The quotient is taken by every lower-degree constant present at that point,
    so constraints implied by sigma_G = 1 are accounted for.
    """
    letters = tuple(sorted(G))
    forced = list(Q.subsets) + [letters]
    spec = generic_specialization(Q.n, forced, seed=seed)
    q = spec.params()
    qb = general_quotient_basis(letters, ConstraintSet.of(Q.n, forced).restrict(letters), q)
    return len(kernel_basis(form_on_basis(qb.words, q)))


# canonical forms and the type catalog

def _key(subsets) -> tuple:
    return tuple(sorted((tuple(sorted(s)) for s in subsets), key=subset_key))


def canonical_constraints(Q: ConstraintSet) -> ConstraintSet:
    """Lexicographically smallest image of Q under relabelings of 1..n."""
    best = None
    for p in itertools.permutations(range(1, Q.n + 1)):
        perm = {i + 1: p[i] for i in range(Q.n)}
        k = _key(tuple(perm[i] for i in s) for s in Q.subsets)
        key = tuple(subset_key(s) for s in k)
        if best is None or key < best[0]:
            best = (key, k)
    return ConstraintSet(Q.n, best[1] if best else ())


@dataclass
class TypeDescriptor:
    n: int
    constraints: ConstraintSet
    primitive_boundary: dict
    boundaries: dict = field(default_factory=dict)
    origin: str = ""

    def to_json(self) -> dict:
        return {"constraints": [list(s) for s in self.constraints.subsets],
                "primitive_boundary": {str(d): b for d, b in sorted(self.primitive_boundary.items())},
                "boundaries": {str(d): [list(s) for s in bs] for d, bs in sorted(self.boundaries.items())}}


@dataclass
class BoundaryDecision:
    subset: tuple
    brute: int | None
    predicate: int | None
    forces: tuple = ()


def forced_lower(Q: ConstraintSet, T: tuple) -> tuple:
    """Subsets smaller than T whose sigma becomes 1 once sigma_T = 1 is added to Q."""
    before = set(implied_subsets(Q)) | set(Q.subsets)
    after = implied_subsets(Q.union([T]))
    return tuple(S for S in after if len(S) < len(T) and S not in before)


def boundary_subsets(Q: ConstraintSet, degree: int, seed: int = 0, log: list | None = None) -> list:
    """Subsets T of size ``degree`` where V^Q has a primitive boundary sigma_T = 1.

    A T whose constraint forces a new lower-degree sigma_S = 1 is a degeneration
    already met at that lower degree and is not a boundary of degree |T|.
    """
    implied = set(implied_subsets(Q)) | set(Q.subsets)
    out = []
    for T in itertools.combinations(range(1, Q.n + 1), degree):
        if T in implied:
            continue
        lower = forced_lower(Q, T)
        if lower:
            if log is not None:
                log.append(BoundaryDecision(T, None, None, lower))
            continue
        brute = primitive_boundary_brute(T, Q, seed)
        pred = None
        try:
            pred = theorem65_predicate(T, Q, seed=seed, cross_check=False).exponent
        except ProvisoViolated:
            pass
        if pred is not None and (pred > 0) != (brute > 0):
            raise OracleMismatch(f"T = {T}, Q = {Q}: class count {pred}, kernel dimension {brute}")
        if log is not None:
            log.append(BoundaryDecision(T, brute, pred))
        if brute > 0:
            out.append(T)
    return out


def _families(items: Sequence) -> Iterable[tuple]:
    for k in range(1, len(items) + 1):
        yield from itertools.combinations(items, k)


def enumerate_multilinear_types(N: int, max_degree: int | None = None, seed: int = 0,
                                log: list | None = None) -> list:
    """All multilinear types on N generators, built degree by degree.

    Layer 2 is every pair set.  At degree d each known type Q contributes
    Q together with any nonempty family of its degree-d primitive boundaries.
    """
    if N > EXHAUSTIVE_MAX:
        raise SizeTooLarge(f"exhaustive enumeration is limited to N <= {EXHAUSTIVE_MAX}")
    max_degree = N if max_degree is None else max_degree
    pairs = list(itertools.combinations(range(1, N + 1), 2))
    types = {}
    for k in range(len(pairs) + 1):
        for P in itertools.combinations(pairs, k):
            c = canonical_constraints(ConstraintSet.of(N, P))
            types.setdefault(c.subsets, c)
    found = sorted(types.values(), key=lambda c: (len(c.subsets), [subset_key(s) for s in c.subsets]))
    origin = {c.subsets: "pairs" for c in found}
    boundaries = {}
    for d in range(3, max_degree + 1):
        new = []
        for Q in found:
            bs = boundary_subsets(Q, d, seed, log)
            boundaries[(Q.subsets, d)] = bs
            for fam in _families(bs):
                c = canonical_constraints(Q.union(fam))
                if c.subsets not in types:
                    types[c.subsets] = c
                    origin[c.subsets] = f"{Q} + degree {d}"
                    new.append(c)
        found = found + new
    out = []
    for Q in found:
        pb, bd = {}, {}
        for d in range(3, max_degree + 1):
            bs = boundaries.get((Q.subsets, d))
            if bs is None:
                bs = boundary_subsets(Q, d, seed, log)
            pb[d] = bool(bs)
            bd[d] = bs
        out.append(TypeDescriptor(N, Q, pb, bd, origin[Q.subsets]))
    return out


# the reference catalog for N = 4, item number -> constraints

REFERENCE_N4_CATALOG = {
    1: [], 2: [(1, 2)], 3: [(1, 2), (3, 4)], 4: [(1, 2), (1, 3)], 5: [(1, 2), (1, 3), (1, 4)],
    6: [(1, 2), (1, 3), (2, 3)], 7: [(1, 2), (2, 3), (3, 4)], 8: [(1, 2), (2, 3), (3, 4), (1, 4)],
    9: [(1, 2), (2, 3), (3, 4), (1, 3)], 10: [(1, 2), (2, 3), (3, 4), (1, 3), (1, 4)],
    11: [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)],
    12: [(1, 2, 3)], 13: [(1, 2, 3), (1, 2, 4)], 14: [(1, 2, 3), (1, 2, 4), (1, 3, 4)],
    15: [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)],
    16: [(1, 2), (1, 3, 4)], 17: [(1, 2), (1, 4), (2, 3, 4)], 18: [(1, 2), (1, 3), (1, 4), (2, 3, 4)],
    19: [(1, 2, 3, 4)], 20: [(1, 2), (1, 2, 3, 4)], 21: [(1, 2), (3, 4), (1, 2, 3, 4)],
    22: [(1, 2, 3), (1, 2, 3, 4)],
}

REFERENCE_N3_COUNT = 5


@dataclass
class CatalogDiff:
    matched: dict
    missing: list
    extra: list
    duplicates: list
    notes: list

    def ok(self) -> bool:
        return not self.missing

    def to_json(self) -> dict:
        return {"matched": {str(k): [list(s) for s in v] for k, v in self.matched.items()},
                "missing": self.missing, "extra": [[list(s) for s in e] for e in self.extra],
                "duplicates": self.duplicates, "notes": self.notes}


def diff_against_reference(types: Sequence[TypeDescriptor], reference: dict = REFERENCE_N4_CATALOG,
                           N: int = 4) -> CatalogDiff:
    computed = {t.constraints.subsets for t in types}
    matched, missing, seen, dups = {}, [], {}, []
    for k, subsets in reference.items():
        c = canonical_constraints(ConstraintSet.of(N, subsets)).subsets
        if c in seen:
            dups.append([seen[c], k])
        seen.setdefault(c, k)
        if c in computed:
            matched[k] = c
        else:
            missing.append(k)
    extra = sorted((c for c in computed if c not in seen), key=lambda c: [subset_key(s) for s in c])
    degree3 = [k for k, s in reference.items() if s and max(len(x) for x in s) == 3]
    by_subsets = {t.constraints.subsets: t for t in types}
    notes = [
        f"listed types up to total order 3: {len([k for k in reference if k <= 18])}; "
        f"the accompanying count says 16",
        f"items with a degree-3 constraint in the list: {len(degree3)}",
        f"computed types: {len(computed)}; listed: {len(reference)}",
    ]
    for d in sorted({d for t in types for d in t.primitive_boundary}):
        with_b = [k for k, c in matched.items() if by_subsets[c].primitive_boundary.get(d)]
        notes.append(f"listed items with a computed degree-{d} primitive boundary: {with_b}")
    return CatalogDiff(matched, missing, extra, dups, notes)


def render_catalog(types: Sequence[TypeDescriptor]) -> str:
    lines = []
    degrees = sorted({d for t in types for d in t.primitive_boundary})
    head = "  #  constraints" + "".join(f"  deg{d}" for d in degrees)
    lines.append(head)
    for k, t in enumerate(types, 1):
        names = ", ".join("s" + "".join(map(str, s)) for s in t.constraints.subsets) or "none"
        flags = "".join(f"  {'yes' if t.primitive_boundary[d] else 'no':>4}" for d in degrees)
        lines.append(f"{k:>3}  {names:<32}{flags}")
    return "\n".join(lines)
