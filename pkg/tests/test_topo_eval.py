import pytest
from sympy import QQ

from src.analysis.topo_eval import ExponentData, MElement, cone_red, m_membership, ray_contribution, red
from src.core.exact import RationalFunction, parse_ratfun
from src.core.exceptions import InvariantViolation
from src.core.laurent import LaurentPoly
from src.core.polyhedra import HalfOpenCone

X = LaurentPoly.variable(2, 0)
Y = LaurentPoly.variable(2, 1)

SIMPLE = MElement(1 - Y, ((1, (1,), 1),))


def test_red_of_simple_quotient():
    assert red(SIMPLE) == parse_ratfun("s/(s-1)")
    assert m_membership(SIMPLE)


def test_red_of_quartic_example():
    numerator = (X ** 2 * Y ** 6 + X ** 2 * Y ** 3 - 4 * X * Y ** 3 + Y ** 3 + 1) * (1 - Y) ** 2
    w = MElement(numerator, ((4, (4,), 1), (2, (2,), 1), (1, (1,), 2)))
    assert red(w) == parse_ratfun("(9s^2 - 6s + 2)s^2/(8(s-1)^4)")
    assert red(w).limit_at_infinity() == QQ(9, 8)


@pytest.mark.parametrize("specialization, expected", [
    ([(1, 0)], "s/(s-1)"),
    ([(2, 0)], "2s/(2s-1)"),
    ([(1, 1)], "(s+1)/s"),
])
def test_specialization(specialization, expected):
    assert red(SIMPLE, specialization) == parse_ratfun(expected)


def test_pole_is_outside_m():
    w = MElement(LaurentPoly.constant(2, 1), ((1, (1,), 1),))
    assert not m_membership(w)
    with pytest.raises(ValueError):
        red(w)


def test_specialization_length_checked():
    with pytest.raises(ValueError):
        red(SIMPLE, [(1, 0), (1, 0)])


def test_sum_is_additive():
    square = MElement((1 - Y) ** 2, ((1, (1,), 2),))
    total = SIMPLE + square
    assert total.factors == ((1, (1,), 2),)
    assert red(total) == red(SIMPLE) + red(square)
    assert red(SIMPLE + SIMPLE) == parse_ratfun("2s/(s-1)")


@pytest.mark.parametrize("factors", [
    ((1, (1,), 0),),
    ((1, (1, 1), 1),),
    ((0, (0,), 1),),
])
def test_element_validation(factors):
    with pytest.raises(ValueError):
        MElement(1 - Y, factors)


def test_exponent_form_on_rays():
    data = ExponentData((1, 1), (((1, 0), (1, 0)),))
    assert data.form((1, 0)) == RationalFunction.linear(1, 1)
    assert data.form((0, 1)) == RationalFunction.constant(1)
    assert cone_red([(1, 0), (0, 1)], data) == parse_ratfun("1/(s+1)")
    assert ray_contribution([(1, 0), (1, 2)], data).index == 2


def test_cone_red_of_halfopen_cone():
    orthant = HalfOpenCone(2, strict=((1, 0), (0, 1)))
    data = ExponentData((1, 1), (((0, 1), (1, -1)),))
    assert cone_red(orthant, data) == parse_ratfun("1/s")


def test_zero_form_rejected():
    with pytest.raises(InvariantViolation):
        cone_red([(1,)], ExponentData((0,)))
