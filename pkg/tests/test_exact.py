import numpy as np
import pytest
from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from src.core.exact import (
    RationalFunction,
    format_rational,
    int_matrix,
    integer_rank,
    parse_rational,
    parse_ratfun,
    pfaffian,
    primitive_vector,
    rank_over_function_field,
    smith_normal_form,
)
from src.core.laurent import polynomial_ring


def test_parse_and_format_rational():
    assert parse_rational("3/4") == QQ(3, 4)
    assert parse_rational(" -7 ") == QQ(-7)
    assert parse_rational(5) == QQ(5)
    assert format_rational(QQ(-3, 4)) == "-3/4"
    assert format_rational(QQ(6, 3)) == "2"


@pytest.mark.parametrize("text", ["x", "1/0", "1.5", ""])
def test_parse_rational_rejects_garbage(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_smith_normal_form_diagonalizes():
    rows = [[2, 4], [6, 8]]
    diag, left, right = smith_normal_form(rows)
    assert diag == (2, 4)
    product = (left * int_matrix(rows) * right).to_list()
    assert [abs(int(product[i][i])) for i in range(2)] == [2, 4]
    assert product[0][1] == 0 and product[1][0] == 0


def test_smith_normal_form_rank_deficient():
    diag, _, _ = smith_normal_form([[1, 2, 3], [2, 4, 6]])
    assert diag == (1, 0)


def test_integer_rank_and_primitive_vector():
    assert integer_rank([[1, 0, 1], [2, 0, 2], [0, 1, 0]]) == 2
    assert integer_rank([]) == 0
    assert primitive_vector([4, -6, 2]) == (2, -3, 1)
    assert primitive_vector([0, 0]) == (0, 0)


def test_pfaffian_of_4x4():
    a, b, c, d, e, f = 1, 2, 3, 4, 5, 6
    m = [[0, a, b, c], [-a, 0, d, e], [-b, -d, 0, f], [-c, -e, -f, 0]]
    assert pfaffian(m) == a * f - b * e + c * d


def test_pfaffian_squared_is_determinant():
    rng = np.random.default_rng(7)
    for size in (2, 4, 6):
        for _ in range(20):
            upper = rng.integers(-5, 6, size=(size, size))
            m = [[0] * size for _ in range(size)]
            for i in range(size):
                for j in range(i + 1, size):
                    m[i][j] = int(upper[i][j])
                    m[j][i] = -int(upper[i][j])
            det = DomainMatrix([[ZZ(x) for x in row] for row in m], (size, size), ZZ).det()
            assert pfaffian(m) ** 2 == det


@pytest.mark.parametrize("m", [
    [[0, 1, 2], [-1, 0, 3], [-2, -3, 0]],
    [[1, 0], [0, 0]],
    [[0, 1], [1, 0]],
])
def test_pfaffian_rejects_bad_input(m):
    with pytest.raises(ValueError):
        pfaffian(m)


def test_rank_over_function_field():
    poly_ring = polynomial_ring(2)
    y1, y2 = poly_ring.gens
    m = [[poly_ring.zero, y1, y2], [-y1, poly_ring.zero, poly_ring.zero], [-y2, poly_ring.zero, poly_ring.zero]]
    assert rank_over_function_field(m) == 2
    assert rank_over_function_field([[y1, y2], [2 * y1, 2 * y2]]) == 1


def test_rational_function_is_canonical():
    assert parse_ratfun("2s/(2s-2)") == parse_ratfun("s/(s-1)")
    assert RationalFunction.linear(2, -2) / 2 == RationalFunction.linear(1, -1)
    assert hash(parse_ratfun("s^2/(s^2)")) == hash(RationalFunction.constant(1))


def test_rational_function_properties():
    z = parse_ratfun("s^2/((s-1)(s-2)^2)")
    assert z.degree() == -1
    assert z.limit_at_infinity() == 0
    assert z.evaluate(3) == QQ(9, 2)
    assert z.poles() == [(QQ(1), 1), (QQ(2), 2)]
    assert parse_ratfun("1/(s^2+1)").poles() == [(None, 1)]
    with pytest.raises(ZeroDivisionError):
        z.evaluate(1)
    with pytest.raises(ValueError):
        parse_ratfun("s^2/(s-1)").limit_at_infinity()


def test_rational_function_json():
    z = parse_ratfun("s/(s-1)")
    assert z.to_json() == {"num": [0, 1], "den": [-1, 1]}
    assert RationalFunction.from_json(z.to_json()) == z


@pytest.mark.parametrize("text,plain", [
    ("s/(s-1)", "s/(s - 1)"),
    ("2(4s^2-6s+1)s/(2s-3)^3", "2*(4*s^2 - 6*s + 1)*s/(2*s - 3)^3"),
    ("1", "1"),
])
def test_rational_function_plain_output(text, plain):
    assert parse_ratfun(text).to_plain() == plain


def test_parse_ratfun_accepts_table_notation():
    assert parse_ratfun("(2s−1)s/(2(s−1)²)") == parse_ratfun("(2*s-1)*s/(2*(s-1)^2)")
    assert parse_ratfun("s/(s-1)").to_latex().startswith("\\frac")


def test_parse_ratfun_rejects_foreign_symbols():
    with pytest.raises(ValueError):
        parse_ratfun("s/(t-1)")


def test_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        RationalFunction(1, 0)
