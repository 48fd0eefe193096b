from fractions import Fraction

import pytest

from qshuffle.errors import HasConstantTerm, IndexOutOfRange, MissingDiagonalParameter
from qshuffle.exactring import ONE, sigma_monomial
from qshuffle.freealg import (CARTAN_RANK2, DEFAULT_CONVENTION, NcPoly, QBinomialConvention, QParams,
                              apply_partial, apply_partial_word, cartan_params, degree, is_constant,
                              pairing, render_ncpoly, reversal, serre_element)

q = QParams.symbolic(2)


def commutator():
    return NcPoly.word((1, 2)) - NcPoly.word((2, 1)).scale(q.q(2, 1))


def test_words():
    assert reversal(reversal((1, 3, 2))) == (1, 3, 2)
    assert degree((2, 1, 2)) == degree((1, 2, 2))


def test_partial_basics():
    assert apply_partial(1, NcPoly.word((1,)), q) == NcPoly.one()
    assert apply_partial(2, NcPoly.word((1,)), q).is_zero()
    assert apply_partial(1, NcPoly.one(), q).is_zero()
    assert apply_partial(2, NcPoly.word((1, 2)), q) == NcPoly.word((1,)).scale(q.q(2, 1))


def test_partial_of_the_commutator():
    # d1(e1 e2) = e2 and d1(e2 e1) = q12 e2, so the residue is (1 - s12) e2
    assert apply_partial(1, commutator(), q) == NcPoly.word((2,)).scale(ONE - sigma_monomial((1, 2)))


def test_partial_index_range():
    with pytest.raises(IndexOutOfRange):
        apply_partial(3, commutator(), q)


def test_operator_words_reproduce_the_two_letter_matrix():
    assert apply_partial_word((1,), NcPoly.word((1,)), q) == NcPoly.one()
    assert pairing((1, 2), (1, 2), q) == 1
    assert pairing((1, 2), (2, 1), q) == q.q(1, 2)
    assert pairing((2, 1), (1, 2), q) == q.q(2, 1)
    assert pairing((2, 1), (2, 1), q) == 1


def test_degree_bookkeeping():
    x = NcPoly.word((1, 2, 3)) + NcPoly.word((3, 1, 2))
    q3 = QParams.symbolic(3)
    assert apply_partial(2, x, q3).degrees() == {degree((1, 3))}
    assert apply_partial(2, NcPoly.word((1, 3)), q3).is_zero()


def test_is_constant():
    qc = QParams(2, {(1, 2): Fraction(5), (2, 1): Fraction(1, 5)})
    c = NcPoly.word((1, 2)) - NcPoly.word((2, 1)).scale(qc.q(2, 1))
    assert is_constant(c, qc)
    assert is_constant(c.scale(7), qc)
    q2 = QParams(2, {(1, 2): 2, (2, 1): 1})
    c2 = NcPoly.word((1, 2)) - NcPoly.word((2, 1)).scale(q2.q(2, 1))
    assert not is_constant(c2, q2)
    assert not is_constant(NcPoly.word((1,)), q2)
    with pytest.raises(HasConstantTerm):
        is_constant(NcPoly.one() + c2, q2)


def test_serre_flat_commutator():
    qa = cartan_params(CARTAN_RANK2["A1xA1"])
    x = serre_element(1, 2, qa, 0)
    assert len(x.terms) == 2
    assert is_constant(x, qa)


def test_serre_three_terms():
    qa = cartan_params(CARTAN_RANK2["A2"])
    x = serre_element(1, 2, qa, -1)
    assert sorted(x.terms) == [(1, 1, 2), (1, 2, 1), (2, 1, 1)]
    assert render_ncpoly(x) == "e1.e1.e2 + (-q1_1^-1 - q1_1)*e1.e2.e1 + e2.e1.e1"


def test_serre_requires_diagonal():
    with pytest.raises(MissingDiagonalParameter):
        serre_element(1, 2, QParams.symbolic(2), -1)


@pytest.mark.parametrize("name", sorted(CARTAN_RANK2))
def test_serre_constancy_under_default_convention(name):
    cartan = CARTAN_RANK2[name]
    qa = cartan_params(cartan)
    assert DEFAULT_CONVENTION is QBinomialConvention.ONE_SIDED
    for i, j in ((1, 2), (2, 1)):
        assert is_constant(serre_element(i, j, qa, cartan[i - 1][j - 1], DEFAULT_CONVENTION), qa)


def test_symmetric_convention_fails_off_diagonal():
    qa = cartan_params(CARTAN_RANK2["A2"])
    assert not is_constant(serre_element(1, 2, qa, -1, QBinomialConvention.SYMMETRIC), qa)


def test_rendering_order():
    x = NcPoly.word((2, 1)) + NcPoly.word((1,)) + NcPoly.word((1, 2))
    assert render_ncpoly(x) == "e1 + e1.e2 + e2.e1"
