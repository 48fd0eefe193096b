import itertools
from fractions import Fraction

import pytest

from qshuffle.classify import enumerate_multilinear_types, forced_lower, relabeled
from qshuffle.errors import InconsistentConstraints
from qshuffle.exactring import VarId
from qshuffle.freealg import NcPoly, is_constant
from qshuffle.kernelconst import (constant_space, generic_specialization, genuine_constants, kernel_basis,
                                  symmetric_line_check, vector_to_ncpoly)
from qshuffle.quotient import ConstraintSet, implied_subsets
from qshuffle.smatrix import build_smatrix, multilinear_basis


def all_subsets(n):
    return [s for k in range(2, n + 1) for s in itertools.combinations(range(1, n + 1), k)]


def test_forced_pair_is_reciprocal():
    spec = generic_specialization(2, [(1, 2)], seed=0)
    a, b = spec.assignment[VarId(1, 2)], spec.assignment[VarId(2, 1)]
    assert a * b == 1 and a not in (0, 1, -1)


def test_generic_three_letters():
    spec = generic_specialization(3, seed=0)
    assert all(spec.sigma(s) != 1 for s in all_subsets(3))
    assert len(spec.assignment) == 6


def test_forced_triple():
    spec = generic_specialization(3, [(1, 2, 3)], seed=0)
    assert spec.sigma((1, 2, 3)) == 1
    assert all(spec.sigma(s) != 1 for s in [(1, 2), (1, 3), (2, 3)])


@pytest.mark.parametrize("seed", range(5))
def test_seed_is_reproducible_and_certified(seed):
    a = generic_specialization(4, [(1, 2), (3, 4)], seed=seed)
    b = generic_specialization(4, [(1, 2), (3, 4)], seed=seed)
    assert a.assignment == b.assignment
    for s in all_subsets(4):
        assert (a.sigma(s) == 1) == (s in a.implied)
    for x in a._free_values.values():
        assert x not in (0, 1, -1) and x.numerator <= 97 and x.denominator <= 97


def test_line_check_needs_the_end_pair_free():
    with pytest.raises(InconsistentConstraints):
        symmetric_line_check((1, 2, 3), ConstraintSet.of(3, [(1, 3)]))


def test_two_letter_kernel():
    spec = generic_specialization(2, [(1, 2)], seed=0)
    q = spec.params()
    m = build_smatrix((1, 2), q)
    (v,) = kernel_basis(m)
    c = vector_to_ncpoly(v, m.basis)
    expected = NcPoly.word((1, 2)) - NcPoly.word((2, 1)).scale(q.q(2, 1))
    ratio = c.coefficient((1, 2))
    assert c == expected.scale(ratio)
    assert is_constant(c, q)


def test_two_letter_kernel_off_the_boundary():
    from qshuffle.freealg import QParams
    m = build_smatrix((1, 2), QParams(2, {(1, 2): Fraction(2), (2, 1): Fraction(1)}))
    assert kernel_basis(m) == []


@pytest.mark.parametrize("n,dim", [(3, 1), (4, 2), (5, 6)])
def test_kernel_dimension_on_the_top_boundary(n, dim):
    G = tuple(range(1, n + 1))
    spec = generic_specialization(n, [G], seed=0)
    cs = constant_space(G, ConstraintSet.of(n), spec, brute_force=n <= 4)
    assert cs.dim == dim == cs.primitive_dim
    assert all(is_constant(c, spec.params()) for c in cs.basis)


def test_no_primitive_constant_over_a_pair():
    spec = generic_specialization(3, [(1, 2), (1, 2, 3)], seed=0)
    cs = constant_space((1, 2, 3), ConstraintSet.of(3, [(1, 2)]), spec)
    assert cs.primitive_dim == 0
    assert cs.dim == 1


def test_one_primitive_constant_over_two_pairs():
    Q = ConstraintSet.of(4, [(1, 2), (3, 4)])
    spec = generic_specialization(4, [(1, 2), (3, 4), (1, 2, 3, 4)], seed=0)
    cs = constant_space((1, 2, 3, 4), Q, spec)
    assert cs.primitive_dim == 1 == cs.brute_force_dim
    assert cs.dim == 5


def test_genuine_constants_of_a_pair():
    spec = generic_specialization(2, [(1, 2)], seed=0)
    assert len(genuine_constants((1, 2), spec.params())) == 1


def canonical_types(N):
    return [t.constraints for t in enumerate_multilinear_types(N)]


@pytest.mark.parametrize("N", [3, 4])
def test_kernel_matches_derivative_solver_on_every_canonical_type(N):
    G = tuple(range(1, N + 1))
    for Q in canonical_types(N):
        points = [list(Q.subsets)]
        if G not in implied_subsets(Q) and not forced_lower(Q, G):
            points.append(list(Q.subsets) + [G])
        for forced in points:
            spec = generic_specialization(N, forced, seed=2)
            cs = constant_space(G, Q, spec, brute_force=True)
            assert cs.brute_force_dim == cs.quotient_dim == cs.primitive_dim


def line_cases():
    for N in (3, 4):
        for Q in canonical_types(N):
            G = tuple(range(1, N + 1))
            if not Q.free_pairs(G):
                continue
            n, Qr, _ = relabeled(G, Q)
            if G in implied_subsets(Qr):
                continue
            if forced_lower(Qr, G):
                continue
            yield N, Qr


@pytest.mark.parametrize("symmetric", [True, False], ids=["symmetric", "asymmetric"])
def test_exponent_equals_kernel_dimension_on_the_line(symmetric):
    seen = 0
    for N, Q in line_cases():
        pt = symmetric_line_check(tuple(range(1, N + 1)), Q, seed=0, symmetric=symmetric)
        assert pt.exponent == pt.kernel_dim, (N, str(Q), pt)
        seen += 1
    assert seen >= 10
