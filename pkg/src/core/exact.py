"""
Точная арифметика: рациональные числа, целочисленные матрицы и нормальная
форма Смита, пфаффианы, ранги над полем рациональных функций и канонические
рациональные функции одной переменной s.

Рациональные числа и многочлены берутся из доменов sympy (QQ, ZZ), никакой
плавающей точки в решающих путях нет.
"""
import logging
import math
import re
from functools import reduce
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import sympy
from sympy import QQ, ZZ
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp
from sympy.polys.rings import PolyElement, ring

logger = logging.getLogger(__name__)

# Кольца многочленов от s: над QQ для арифметики и над ZZ для разложения знаменателей.
QQs, s = ring("s", QQ)
ZZs, _s_zz = ring("s", ZZ)
S_SYMBOL = sympy.Symbol("s")

RATIONAL_PATTERN = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: Union[str, int]):
    """
    Разбирает строку вида "p/q" или "n" в точное рациональное число QQ.

    Raises:
        ValueError: если строка не является записью рационального числа.
    """
    if isinstance(text, int):
        return QQ(text)
    match = RATIONAL_PATTERN.match(str(text))
    if not match:
        raise ValueError(f"Не удалось разобрать рациональное число: {text!r}")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) else 1
    if denominator == 0:
        raise ValueError(f"Нулевой знаменатель в {text!r}")
    return QQ(numerator, denominator)


def format_rational(value) -> str:
    value = QQ.convert(value)
    if value.denominator == 1:
        return str(int(value.numerator))
    return f"{int(value.numerator)}/{int(value.denominator)}"


# --- Целочисленные матрицы ---

def int_matrix(rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> DomainMatrix:
    """
    Строит целочисленную матрицу (DomainMatrix над ZZ) из списка строк.
    Для пустого списка строк нужно указать число столбцов.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return DomainMatrix([], (0, cols or 0), ZZ)
    ncols = len(rows[0])
    return DomainMatrix([[ZZ(int(x)) for x in r] for r in rows], (len(rows), ncols), ZZ)


def smith_normal_form(m) -> tuple:
    """
    Нормальная форма Смита целочисленной матрицы.

    Args:
        m: DomainMatrix над ZZ или список строк целых чисел.

    Returns:
        (diag, left, right): diag - кортеж неотрицательных d_1 | d_2 | ...,
        left и right - унимодулярные матрицы с left·m·right = diag(d).
    """
    if not isinstance(m, DomainMatrix):
        m = int_matrix(m)
    smf, left, right = smith_normal_decomp(m)
    rows, cols = smf.shape
    entries = smf.to_list()
    diag = tuple(abs(int(entries[i][i])) for i in range(min(rows, cols)))
    return diag, left, right


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    """Ранг целочисленной (рациональной) матрицы."""
    rows = [list(r) for r in rows]
    if not rows or not rows[0]:
        return 0
    return DomainMatrix([[QQ(x) for x in r] for r in rows], (len(rows), len(rows[0])), QQ).rank()


def primitive_vector(vector: Iterable[int]) -> tuple:
    """Делит целочисленный вектор на НОД его координат."""
    vector = tuple(int(x) for x in vector)
    g = reduce(math.gcd, vector, 0)
    if g <= 1:
        return vector
    return tuple(x // g for x in vector)


# --- Пфаффианы ---

def pfaffian(m: Sequence[Sequence]):
    """
    Пфаффиан кососимметричной матрицы чётного размера.

    Разложение по первой строке: Pf(A) = Σ_j (-1)^j a_{1j} Pf(A без строк/столбцов 1, j).
    Элементы могут быть целыми, элементами QQ или многочленами (PolyElement).

    Raises:
        ValueError: нечётный размер или матрица не кососимметрична.
    """
    size = len(m)
    if size % 2:
        raise ValueError(f"Пфаффиан определён только для матриц чётного размера, получено {size}")
    for i in range(size):
        if len(m[i]) != size:
            raise ValueError("Матрица должна быть квадратной")
        if m[i][i]:
            raise ValueError(f"Ненулевой диагональный элемент в позиции {i + 1}")
        for j in range(i + 1, size):
            if m[i][j] != -m[j][i]:
                raise ValueError(f"Матрица не кососимметрична в позиции ({i + 1}, {j + 1})")
    if size == 0:
        return 1
    cache = {}

    def _pf(indices: tuple):
        if not indices:
            return 1
        if indices in cache:
            return cache[indices]
        first, rest = indices[0], indices[1:]
        total = 0
        for position, j in enumerate(rest):
            entry = m[first][j]
            if not entry:
                continue
            minor = _pf(rest[:position] + rest[position + 1:])
            term = entry * minor
            total = total + term if position % 2 == 0 else total - term
        cache[indices] = total
        return total

    return _pf(tuple(range(size)))


# --- Ранг над полем рациональных функций ---

def _bareiss_rank(rows: list, domain_ring) -> int:
    a = [list(r) for r in rows]
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    rank = 0
    previous = domain_ring.one
    for col in range(ncols):
        if rank == nrows:
            break
        pivot = next((i for i in range(rank, nrows) if a[i][col]), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        for i in range(rank + 1, nrows):
            for j in range(col + 1, ncols):
                a[i][j] = (a[rank][col] * a[i][j] - a[i][col] * a[rank][j]).exquo(previous)
            a[i][col] = domain_ring.zero
        previous = a[rank][col]
        rank += 1
    return rank


def rank_over_function_field(m: Sequence[Sequence], nvars: Optional[int] = None, seed: int = 0) -> int:
    """
    Ранг матрицы линейных форм от Y_1..Y_n над полем Q(Y).

    Считается дробно-свободным исключением Бареисса в кольце QQ[Y];
    затем подтверждается рангом в случайной целой точке (точка
    перевыбирается, если ранг в ней упал).

    Args:
        m: Матрица из элементов PolyElement (одного кольца) или целых чисел.
        nvars: Число переменных, если элементы - обычные числа.
        seed: Зерно генератора случайных точек.
    """
    rows = [list(r) for r in m]
    if not rows or not rows[0]:
        return 0
    poly_ring = None
    for r in rows:
        for x in r:
            if isinstance(x, PolyElement):
                poly_ring = x.ring
                break
        if poly_ring is not None:
            break
    if poly_ring is None:
        names = ",".join(f"Y{i + 1}" for i in range(max(nvars or 1, 1)))
        poly_ring = ring(names, QQ)[0]
    rows = [[poly_ring(x) for x in r] for r in rows]
    symbolic = _bareiss_rank(rows, poly_ring)

    rng = np.random.default_rng(seed)
    ngens = poly_ring.ngens
    for attempt in range(20):
        point = [int(v) for v in rng.integers(-97, 98, size=ngens)]
        evaluated = [[QQ.convert(x(*point)) if ngens > 1 else QQ.convert(x(point[0])) for x in r] for r in rows]
        numeric = DomainMatrix(evaluated, (len(rows), len(rows[0])), QQ).rank()
        if numeric > symbolic:
            raise ArithmeticError(f"Ранг в точке {point} ({numeric}) больше символьного ({symbolic})")
        if numeric == symbolic:
            break
        logger.debug(f"Rank dropped at random point {point} ({numeric} < {symbolic}), redrawing.")
    else:
        logger.warning(f"Random evaluation never reached symbolic rank {symbolic}; trusting Bareiss elimination.")
    return symbolic


# --- Рациональные функции от s ---

def _to_qq_poly(value) -> PolyElement:
    if isinstance(value, PolyElement):
        if value.ring == QQs:
            return value
        return QQs.from_dict({k: QQ.convert(v) for k, v in value.items()})
    if isinstance(value, sympy.Basic):
        return QQs.from_expr(sympy.sympify(value).subs({sympy.Symbol("s"): S_SYMBOL}))
    return QQs(QQ.convert(value))


def _ascending(poly: PolyElement) -> list:
    if not poly:
        return [0]
    degree = poly.degree()
    coeffs = [0] * (degree + 1)
    for (k,), v in poly.items():
        coeffs[k] = int(v)
    return coeffs


def _poly_terms(poly: PolyElement, power: str = "^") -> str:
    """Запись многочлена от s по убыванию степеней: '4*s^2 - 6*s + 1'."""
    pieces = []
    for (k,), c in sorted(poly.items(), key=lambda item: -item[0][0]):
        c = int(c)
        sign = "-" if c < 0 else "+"
        c = abs(c)
        if k == 0:
            body = str(c)
        else:
            monomial = "s" if k == 1 else f"s{power}{k}"
            body = monomial if c == 1 else f"{c}*{monomial}"
        pieces.append((sign, body))
    if not pieces:
        return "0"
    text = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


class RationalFunction:
    """
    Рациональная функция от s в канонической форме.

    Числитель и знаменатель - взаимно простые многочлены с целыми
    коэффициентами, старший коэффициент знаменателя положителен, общий
    НОД всех коэффициентов пары равен 1. Такая запись единственна.
    """

    __slots__ = ("num", "den")

    def __init__(self, numerator=0, denominator=1):
        num = _to_qq_poly(numerator)
        den = _to_qq_poly(denominator)
        if not den:
            raise ZeroDivisionError("Знаменатель рациональной функции равен нулю")
        if not num:
            self.num, self.den = QQs.zero, QQs.one
            return
        g = num.gcd(den)
        num, den = num.exquo(g), den.exquo(g)
        scale = 1
        for c in list(num.coeffs()) + list(den.coeffs()):
            scale = math.lcm(scale, int(c.denominator))
        num, den = num * scale, den * scale
        content = reduce(math.gcd, [int(c) for c in list(num.coeffs()) + list(den.coeffs())], 0)
        if den.LC < 0:
            content = -content
        self.num = num.quo_ground(QQ(content))
        self.den = den.quo_ground(QQ(content))

    # --- конструкторы ---
    @classmethod
    def constant(cls, value) -> "RationalFunction":
        return cls(QQ.convert(value), 1)

    @classmethod
    def variable(cls) -> "RationalFunction":
        return cls(s, 1)

    @classmethod
    def linear(cls, a, b) -> "RationalFunction":
        """Функция a·s + b."""
        return cls(QQ.convert(a) * s + QQ.convert(b), 1)

    @classmethod
    def from_sympy(cls, expr) -> "RationalFunction":
        expr = sympy.together(sympy.sympify(expr))
        numerator, denominator = sympy.fraction(expr)
        return cls(QQs.from_expr(sympy.expand(numerator)), QQs.from_expr(sympy.expand(denominator)))

    # --- арифметика ---
    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        return RationalFunction(other, 1)

    def __add__(self, other):
        other = self._coerce(other)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if not other.num:
            raise ZeroDivisionError("Деление на нулевую рациональную функцию")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, exponent: int):
        if exponent < 0:
            return RationalFunction(1) / (self ** -exponent)
        return RationalFunction(self.num ** exponent, self.den ** exponent)

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, sympy.SympifyError, sympy.polys.polyerrors.CoercionFailed):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        return hash((tuple(_ascending(self.num)), tuple(_ascending(self.den))))

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        return f"RationalFunction({self.to_plain()})"

    def __str__(self):
        return self.to_plain()

    # --- свойства ---
    def is_zero(self) -> bool:
        return not self.num

    def degree(self):
        """deg(num) - deg(den); для нулевой функции -inf."""
        if not self.num:
            return -math.inf
        return self.num.degree() - self.den.degree()

    def limit_at_infinity(self):
        """Предел при s → ∞ (отношение старших коэффициентов)."""
        degree = self.degree()
        if degree == -math.inf or degree < 0:
            return QQ(0)
        if degree > 0:
            raise ValueError(f"Функция {self} не ограничена на бесконечности (степень {degree})")
        return QQ.convert(self.num.LC) / QQ.convert(self.den.LC)

    def evaluate(self, value):
        value = QQ.convert(value)
        denominator = self.den(value)
        if not denominator:
            raise ZeroDivisionError(f"Полюс в точке s = {format_rational(value)}")
        return QQ.convert(self.num(value)) / QQ.convert(denominator)

    def _zz(self, poly: PolyElement) -> PolyElement:
        return ZZs.from_dict({k: ZZ(int(v)) for k, v in poly.items()})

    def poles(self) -> list:
        """
        Полюса: список (корень, кратность) для линейных множителей знаменателя
        и (None, кратность) для нелинейных (нерациональных) множителей.
        """
        _, factors = self._zz(self.den).factor_list()
        result = []
        for factor, multiplicity in factors:
            if factor.degree() == 1:
                a = int(factor.coeff(_s_zz))
                b = int(factor.coeff(1))
                result.append((QQ(-b, a), multiplicity))
            elif factor.degree() > 1:
                result.append((None, multiplicity))
        return sorted(result, key=lambda item: (item[0] is None, item[0] if item[0] is not None else 0))

    def coefficients(self) -> dict:
        """Канонические массивы коэффициентов по возрастанию степеней."""
        return {"num": _ascending(self.num), "den": _ascending(self.den)}

    def to_json(self) -> dict:
        return self.coefficients()

    @classmethod
    def from_json(cls, data: dict) -> "RationalFunction":
        num = QQs.from_dict({(k,): QQ(int(c)) for k, c in enumerate(data["num"]) if c})
        den = QQs.from_dict({(k,): QQ(int(c)) for k, c in enumerate(data["den"]) if c})
        return cls(num, den)

    # --- вывод ---
    def _numerator_parts(self, power: str) -> list:
        num = self._zz(self.num)
        low = min(k for (k,) in num.monoms())
        shifted = ZZs.from_dict({(k - low,): v for (k,), v in num.items()})
        content, primitive = shifted.primitive()
        if primitive.LC < 0:
            content, primitive = -content, -primitive
        parts = []
        if primitive != 1:
            parts.append(f"({_poly_terms(primitive, power)})")
        if low:
            parts.append("s" if low == 1 else f"s{power}{low}")
        content = int(content)
        if content == -1 and parts:
            parts[0] = "-" + parts[0]
        elif content != 1 or not parts:
            parts.insert(0, str(content))
        return parts

    def _denominator_parts(self, power: str) -> list:
        content, factors = self._zz(self.den).factor_list()

        def _order(item):
            factor, _ = item
            lc = int(factor.LC)
            if factor.degree() == 1:
                return (0, -lc, QQ(-int(factor.coeff(1)), lc))
            return (1, -lc, QQ(0))

        parts = [] if int(content) == 1 else [str(int(content))]
        for factor, multiplicity in sorted(factors, key=_order):
            if factor.degree() == 1 and int(factor.LC) == 1 and not factor.coeff(1):
                body = "s"
            else:
                body = f"({_poly_terms(factor, power)})"
            parts.append(body if multiplicity == 1 else f"{body}{power}{multiplicity}")
        return parts

    def to_plain(self) -> str:
        """Текстовая запись в стиле таблиц: '2*(4*s^2 - 6*s + 1)*s/(2*s - 3)^3'."""
        if not self.num:
            return "0"
        numerator = "*".join(self._numerator_parts("^"))
        if self.den == 1:
            return numerator
        parts = self._denominator_parts("^")
        if len(parts) == 1 and (parts[0].startswith("(") or parts[0].isdigit()):
            return f"{numerator}/{parts[0]}"
        return f"{numerator}/({'*'.join(parts)})"

    def to_latex(self) -> str:
        if not self.num:
            return "0"
        numerator = "".join(self._numerator_parts("^")).replace("*", "")
        if self.den == 1:
            return numerator
        denominator = "".join(self._denominator_parts("^")).replace("*", "")
        return f"\\frac{{{numerator}}}{{{denominator}}}"

    def as_expr(self):
        return self.num.as_expr() / self.den.as_expr()


_SUPERSCRIPTS = str.maketrans({"²": "^2", "³": "^3", "⁴": "^4", "⁵": "^5", "⁶": "^6", "−": "-", "·": "*"})


def parse_ratfun(text: str) -> RationalFunction:
    """
    Разбирает рациональную функцию от s из строки, допуская запись таблиц:
    неявное умножение, '^' и надстрочные степени, знак '−'.
    """
    cleaned = str(text).translate(_SUPERSCRIPTS)
    transformations = standard_transformations + (implicit_multiplication_application, convert_xor)
    try:
        expr = parse_expr(cleaned, local_dict={"s": S_SYMBOL}, transformations=transformations)
    except (SyntaxError, TypeError, sympy.SympifyError) as e:
        raise ValueError(f"Не удалось разобрать рациональную функцию {text!r}: {e}") from e
    if expr.free_symbols - {S_SYMBOL}:
        raise ValueError(f"Лишние переменные в {text!r}: {expr.free_symbols - {S_SYMBOL}}")
    return RationalFunction.from_sympy(expr)
