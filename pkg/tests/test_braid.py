import itertools
import math

import pytest

from qshuffle.braid import (Domain, Edge, WeightedArrangement, count_acyclic_orientations, edge_numbers, edges,
                            fixed_wall, is_edge, render_formula, separating_set, set_partitions, varchenko_det,
                            varchenko_det_formula, varchenko_form)
from qshuffle.errors import DimensionMismatch, NotAnEdge
from qshuffle.exactring import ONE, LaurentPoly
from qshuffle.quotient import ConstraintSet, build_smatrix_q
from qshuffle.smatrix import build_smatrix

a12 = LaurentPoly.var(1, 2)


def test_separating_sets():
    assert separating_set(Domain((1, 2, 3)), Domain((1, 2, 3))) == set()
    assert separating_set(Domain((1, 2, 3)), Domain((2, 1, 3))) == {(1, 2)}
    assert separating_set(Domain((1, 2, 3)), Domain((3, 2, 1))) == {(1, 2), (1, 3), (2, 3)}
    with pytest.raises(DimensionMismatch):
        separating_set(Domain((1, 2)), Domain((1, 2, 3)))


def test_two_chamber_form():
    b = varchenko_form(WeightedArrangement.symbolic(2))
    assert b.entries == [[ONE, a12], [a12, ONE]]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_form_equals_smatrix_with_symmetric_weights(n):
    arr = WeightedArrangement.symbolic(n)
    b = varchenko_form(arr)
    s = build_smatrix(range(1, n + 1), arr.params())
    assert b.basis == s.basis and b.entries == s.entries


@pytest.mark.parametrize("removed", [[(1, 2)], [(1, 3)], [(1, 2), (2, 3)]])
def test_form_equals_quotient_smatrix_with_removed_planes(removed):
    arr = WeightedArrangement.symbolic(3, removed)
    b = varchenko_form(arr)
    s = build_smatrix_q((1, 2, 3), ConstraintSet.of(3, removed), arr.params())
    assert b.basis == s.basis and b.entries == s.entries


def test_domains_are_trace_normal_forms():
    doms = WeightedArrangement.symbolic(3, [(1, 2)]).domains()
    assert [d.order for d in doms] == [(1, 2, 3), (1, 3, 2), (2, 3, 1), (3, 1, 2)]


def test_set_partitions_are_bell_numbers():
    assert [sum(1 for _ in set_partitions(range(k))) for k in range(6)] == [1, 1, 2, 5, 15, 52]


def test_edges_of_the_removed_arrangement():
    arr = WeightedArrangement.symbolic(3, [(1, 2)])
    assert not is_edge(arr, Edge(((1, 2), (3,))))
    assert is_edge(arr, Edge(((1, 2, 3),)))
    with pytest.raises(NotAnEdge):
        edge_numbers(arr, Edge(((1, 2), (3,))))
    assert len(edges(WeightedArrangement.symbolic(3))) == 4


@pytest.mark.parametrize("n", range(2, 7))
def test_one_block_chamber_count(n):
    arr = WeightedArrangement.symbolic(n)
    for k in range(2, n + 1):
        n_l, p_l = edge_numbers(arr, Edge.block(n, range(1, k + 1)))
        assert n_l == math.factorial(n + 1 - k)
        assert p_l == math.factorial(k - 2)


def test_two_blocks_have_no_projective_domains():
    arr = WeightedArrangement.symbolic(4)
    assert edge_numbers(arr, Edge(((1, 2), (3, 4))))[1] == 0


def test_bracketing_count_with_two_planes_removed():
    arr = WeightedArrangement.symbolic(4, [(1, 2), (3, 4)])
    assert edge_numbers(arr, Edge(((1, 2, 3, 4),))) == (1, 1)


def test_fixed_wall_rule():
    walls = {(1, 3), (2, 3), (1, 2)}
    assert fixed_wall((1, 2, 3), walls) == (1, 3)
    assert fixed_wall((1, 2, 3), {(1, 2), (2, 3)}) == (1, 2)


def test_acyclic_orientations():
    assert count_acyclic_orientations((1, 2, 3), [(1, 2), (1, 3), (2, 3)]) == 6
    assert count_acyclic_orientations((1, 2, 3), [(1, 2), (2, 3)]) == 4


def test_two_dimensional_formula():
    arr = WeightedArrangement.symbolic(2)
    f = varchenko_det_formula(arr)
    assert f.factors == [((1, 2), 1)]
    assert f.expand() == ONE - a12 * a12 == varchenko_det(arr)


def test_three_dimensional_formula_matches_the_smatrix_exponents():
    arr = WeightedArrangement.symbolic(3)
    f = varchenko_det_formula(arr)
    assert f.factors == [((1, 2), 2), ((1, 3), 2), ((2, 3), 2), ((1, 2, 3), 1)]
    assert varchenko_det(arr) == f.expand()
    assert render_formula(f, arr) == "(1-a12^2)^2 (1-a13^2)^2 (1-a23^2)^2 (1-(a12*a13*a23)^2)^1"


@pytest.mark.parametrize("removed", [[(1, 2)], [(1, 2), (1, 3)], [(1, 2), (1, 3), (2, 3)]])
def test_three_dimensional_removed_planes(removed):
    arr = WeightedArrangement.symbolic(3, removed)
    assert varchenko_det(arr) == varchenko_det_formula(arr).expand()


@pytest.mark.parametrize("removed", [[(1, 2), (3, 4)], [(1, 2), (1, 3)], [(1, 2), (1, 3), (1, 4)],
                                     [(1, 2), (1, 3), (2, 4)]])
def test_four_dimensional_removed_planes(removed):
    arr = WeightedArrangement.symbolic(4, removed)
    assert varchenko_det(arr) == varchenko_det_formula(arr).expand()


def test_full_diagonal_factor_with_two_planes_removed():
    arr = WeightedArrangement.symbolic(4, [(1, 2), (3, 4)])
    f = varchenko_det_formula(arr)
    assert f.exponent((1, 2, 3, 4)) == 1
    assert [e for s, e in f.factors if len(s) == 2] == [6, 6, 6, 6]
