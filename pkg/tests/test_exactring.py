from fractions import Fraction

import pytest

from qshuffle.errors import MissingVariable, NotDivisible, SubsetTooSmall, ZeroAssignment
from qshuffle.exactring import (ONE, ZERO, LaurentPoly, RatFunc, VarId, poly_add, poly_divide_exact, poly_mul,
                                poly_neg, poly_specialize, render, sigma_monomial)
from qshuffle.smatrix import smatrix_det

q12, q21 = LaurentPoly.var(1, 2), LaurentPoly.var(2, 1)
s12 = sigma_monomial((1, 2))


def test_additive_cancellation():
    assert poly_add(ONE - s12, s12) == ONE
    assert poly_add(s12, poly_neg(s12)) == ZERO


def test_sigma_pair_is_the_product():
    assert poly_mul(q12, q21) == s12
    assert s12 == LaurentPoly.monomial({VarId(1, 2): 1, VarId(2, 1): 1})
    assert s12.is_monomial() and len(s12.variables()) == 2


def test_difference_of_squares():
    assert (ONE - q12) * (ONE + q12) == ONE - q12 * q12


def test_zero_is_unique():
    assert (s12 - s12).is_zero()
    assert LaurentPoly.const(0) == ZERO
    assert LaurentPoly.monomial({VarId(1, 2): 3}, 0) == ZERO


def test_laurent_inverse():
    inv = q12.inverse_monomial()
    assert inv * q12 == ONE
    assert inv.degree_in(VarId(1, 2)) == (-1, -1)


def test_divide_exact_square():
    assert poly_divide_exact((ONE - s12) ** 2, ONE - s12) == ONE - s12


def test_divide_exact_coprime():
    with pytest.raises(NotDivisible):
        poly_divide_exact(ONE - s12, ONE - sigma_monomial((1, 3)))


def test_divide_exact_on_the_three_letter_determinant():
    rest = poly_divide_exact(smatrix_det((1, 2, 3)), ONE - sigma_monomial((1, 2, 3)))
    expected = ONE
    for s in [(1, 2), (1, 3), (2, 3)]:
        expected = expected * (ONE - sigma_monomial(s)) ** 2
    assert rest == expected


def test_specialize_examples():
    p = ONE - s12
    assert poly_specialize(p, {VarId(1, 2): 2, VarId(2, 1): Fraction(1, 2)}) == 0
    assert poly_specialize(p, {VarId(1, 2): 2, VarId(2, 1): 3}) == -5
    all2 = {VarId(i, j): 2 for i in range(1, 4) for j in range(1, 4) if i != j}
    assert poly_specialize(sigma_monomial((1, 2, 3)), all2) == 64


def test_specialize_negative_exponents():
    p = q12.inverse_monomial() + ONE
    assert poly_specialize(p, {VarId(1, 2): Fraction(2, 3)}) == Fraction(5, 2)


def test_specialize_errors():
    with pytest.raises(MissingVariable):
        poly_specialize(ONE - s12, {VarId(1, 2): 2})
    with pytest.raises(ZeroAssignment):
        poly_specialize(ONE - s12, {VarId(1, 2): 0, VarId(2, 1): 1})


def test_sigma_monomial():
    assert sigma_monomial((1, 2, 3)) == LaurentPoly.monomial(
        {VarId(i, j): 1 for i in range(1, 4) for j in range(1, 4) if i != j})
    with pytest.raises(SubsetTooSmall):
        sigma_monomial((1,))


def test_rendering():
    assert render(s12) == "q1_2*q2_1"
    assert render(ONE - s12, sigma=True) == "1 - s12"


def test_ratfunc_equality_by_cross_multiplication():
    a = RatFunc(ONE - s12, ONE - s12)
    assert a == RatFunc(ONE)
    assert RatFunc(ONE, ONE - s12) * (ONE - s12) == RatFunc(ONE)
    assert RatFunc(q12, q21) + RatFunc(q21, q21) == RatFunc(q12 + q21, q21)
