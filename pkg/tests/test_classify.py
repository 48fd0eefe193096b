import itertools
import random

import pytest

from qshuffle.classify import (REFERENCE_N4_CATALOG, canonical_constraints, diff_against_reference,
                               enumerate_multilinear_types, free_pair_relabeling,
                               primitive_boundary_brute, relabeled, second_sum_rule,
                               theorem42_predicate, theorem65_predicate, word_class_table)
from qshuffle.errors import NoFreePair, ProvisoViolated, SizeTooLarge
from qshuffle.quotient import ConstraintSet


def rows(table):
    return [(r.cls, r.u, r.v, r.count) for r in table.rows]


def test_table_single_pair_constraint():
    t = word_class_table((1, 2, 3, 4), ConstraintSet.of(4, [(1, 2)]))
    assert rows(t) == [((), 6, 1, 6), ((2,), None, 0, 0), ((3,), 2, 1, 2), ((2, 3), 1, 1, 1)]
    assert t.total() == 9 and t.half_dim == 9 and t.dim == 18
    assert t.first_sum_rule() and t.u_depends_only_on_degree()


def test_table_triple_constraint():
    t = word_class_table((1, 2, 3, 4), ConstraintSet.of(4, [(1, 2, 3)]))
    assert [(r.cls, r.u, r.v) for r in t.rows] == [((), 6, 1), ((2,), 2, 1), ((3,), 2, 1), ((2, 3), 1, 1)]
    assert t.total() == 11 and t.dim == 22


def test_table_two_letters():
    t = word_class_table((1, 2), ConstraintSet.of(2))
    assert rows(t) == [((), 1, 1, 1)]
    assert t.total() == 1 and t.dim == 2


def test_table_needs_a_free_pair():
    with pytest.raises(NoFreePair):
        word_class_table((1, 2, 3), ConstraintSet.of(3, [(1, 2), (1, 3), (2, 3)]))


def test_table_json_shape():
    d = word_class_table((1, 2, 3), ConstraintSet.of(3)).to_json()
    assert d["sum_uv"] == d["half_dim"] == 3
    assert [r["class"] for r in d["rows"]] == [[], [2]]


@pytest.mark.parametrize("n,P,expected", [
    (4, [(1, 2), (3, 4)], True),
    (4, [(1, 2), (1, 3)], False),
    (3, [], True),
])
def test_path_criterion_examples(n, P, expected):
    assert theorem42_predicate(n, P) is expected


def test_path_criterion_all_pairs_constrained():
    assert theorem42_predicate(3, [(1, 2), (1, 3), (2, 3)]) is False


def test_path_criterion_rejects_triples():
    with pytest.raises(ValueError):
        theorem42_predicate(3, [(1, 2, 3)])


def test_path_criterion_matches_kernel_small_random():
    rng = random.Random(1)
    pairs = list(itertools.combinations(range(1, 5), 2))
    for _ in range(6):
        P = [p for p in pairs if rng.random() < 0.35]
        Q = ConstraintSet.of(4, P)
        brute = primitive_boundary_brute((1, 2, 3, 4), Q) > 0
        assert theorem42_predicate(4, P) is brute


@pytest.mark.parametrize("n,subsets,exponent", [
    (4, [(1, 2), (3, 4)], 1),
    (3, [(1, 2)], 0),
    (4, [(1, 2, 3)], 1),
    (3, [], 1),
    (4, [], 2),
])
def test_top_class_count(n, subsets, exponent):
    r = theorem65_predicate(tuple(range(1, n + 1)), ConstraintSet.of(n, subsets), cross_check=True)
    assert r.exponent == exponent
    assert r.primitive is (exponent > 0)
    assert r.determinant_exponent == exponent


def test_top_class_count_with_merged_root():
    # after relabeling sigma_123 equals sigma_13 on V^Q, so the line sees both roots
    r = theorem65_predicate((1, 2, 3), ConstraintSet.of(3, [(1, 2), (1, 3)]), cross_check=True)
    assert r.exponent == 0
    assert r.coincident == ((1, 3),)
    assert r.determinant_exponent == 1


@pytest.mark.parametrize("subsets", [[(1, 2, 3)], [(1, 2), (1, 3), (2, 3)]])
def test_top_class_count_proviso(subsets):
    with pytest.raises(ProvisoViolated):
        theorem65_predicate((1, 2, 3), ConstraintSet.of(3, subsets))


def test_second_sum_rule_unconstrained():
    total, half, tildes = second_sum_rule((1, 2, 3, 4), ConstraintSet.of(4))
    assert total == half == 12
    assert tildes == {(): 1, (2,): 1, (3,): 1, (2, 3): 2}


def test_relabeling_moves_the_free_pair_to_the_ends():
    assert free_pair_relabeling((1, 2, 3, 4), (2, 4)) == {2: 1, 4: 4, 1: 2, 3: 3}
    n, Qr, perm = relabeled((1, 2, 3), ConstraintSet.of(3, [(1, 3)]))
    assert perm == {1: 1, 2: 3, 3: 2} and Qr.subsets == ((1, 2),)


@pytest.mark.parametrize("n,subsets,expected", [
    (3, [(2, 3)], ((1, 2),)),
    (4, [(1, 2), (3, 4)], ((1, 2), (3, 4))),
    (4, [(1, 3), (1, 4), (3, 4)], ((1, 2), (1, 3), (2, 3))),
])
def test_canonical_examples(n, subsets, expected):
    c = canonical_constraints(ConstraintSet.of(n, subsets))
    assert c.subsets == expected
    assert canonical_constraints(c) == c


def test_canonical_matches_exhaustive_minimum():
    Q = ConstraintSet.of(4, [(2, 4), (1, 3, 4)])
    key = lambda c: [(len(s), s) for s in c.subsets]
    images = [Q.relabel({i + 1: p[i] for i in range(4)}) for p in itertools.permutations(range(1, 5))]
    best = min((canonical_constraints(ConstraintSet.of(4, q.subsets)) for q in images), key=key)
    assert canonical_constraints(Q) == best


def test_three_letter_types():
    types = enumerate_multilinear_types(3)
    assert [t.constraints.subsets for t in types] == [
        (), ((1, 2),), ((1, 2), (1, 3)), ((1, 2), (1, 3), (2, 3)), ((1, 2, 3),)]
    assert [t.primitive_boundary[3] for t in types] == [True, False, False, False, False]


@pytest.fixture(scope="module")
def four_letter_types():
    return enumerate_multilinear_types(4)


def test_four_letter_pair_layer():
    pairs = list(itertools.combinations(range(1, 5), 2))
    canon = {canonical_constraints(ConstraintSet.of(4, P)).subsets
             for k in range(len(pairs) + 1) for P in itertools.combinations(pairs, k)}
    assert len(canon) == 11


def test_four_letter_catalog(four_letter_types):
    types = four_letter_types
    assert len(types) == 23
    assert len({t.constraints.subsets for t in types}) == 23
    for t in types:
        assert canonical_constraints(t.constraints) == t.constraints
    diff = diff_against_reference(types)
    assert diff.ok() and diff.missing == []
    assert diff.extra == [((1, 2), (1, 3, 4), (2, 3, 4))]
    assert len(diff.matched) == len(REFERENCE_N4_CATALOG)


def test_four_letter_top_boundaries(four_letter_types):
    with_top = {t.constraints.subsets for t in four_letter_types if t.primitive_boundary[4]}
    expected = {canonical_constraints(ConstraintSet.of(4, REFERENCE_N4_CATALOG[k])).subsets
                for k in (1, 2, 3, 12)}
    assert with_top == expected


def test_five_letters_not_enumerated():
    with pytest.raises(SizeTooLarge):
        enumerate_multilinear_types(5)
