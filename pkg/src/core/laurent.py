"""
Многочлены Лорана от n переменных над QQ.

Многочлен хранится как словарь {вектор показателей: коэффициент}; нулевые
коэффициенты не хранятся. Объекты неизменяемы после создания.
"""
import logging
from typing import Dict, Iterable, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.orderings import grevlex
from sympy.polys.rings import PolyElement, ring

from src.core.polyhedra import Cone, HalfOpenCone, Polytope

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]


def grlex_key(exponent: Sequence[int]) -> tuple:
    """Ключ градуированного лексикографического порядка."""
    return (sum(exponent), tuple(exponent))


class LaurentPoly:
    """
    Многочлен Лорана.

    Args:
        nvars: Число переменных n.
        terms: Словарь {показатели: коэффициент}; коэффициенты приводятся к QQ.
    """

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Optional[Dict[Exponent, object]] = None):
        self.nvars = nvars
        clean = {}
        for exponent, coeff in (terms or {}).items():
            exponent = tuple(int(x) for x in exponent)
            if len(exponent) != nvars:
                raise ValueError(f"Показатель {exponent} не соответствует числу переменных {nvars}")
            coeff = QQ.convert(coeff)
            if coeff:
                clean[exponent] = clean.get(exponent, QQ(0)) + coeff
                if not clean[exponent]:
                    del clean[exponent]
        self._terms = clean
        self._hash = None

    # --- конструкторы ---
    @classmethod
    def zero(cls, nvars: int) -> "LaurentPoly":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, value=1) -> "LaurentPoly":
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff=1) -> "LaurentPoly":
        return cls(len(exponent), {tuple(exponent): coeff})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "LaurentPoly":
        exponent = [0] * nvars
        exponent[index] = 1
        return cls.monomial(exponent)

    @classmethod
    def from_ring_element(cls, element: PolyElement, shift: Optional[Sequence[int]] = None) -> "LaurentPoly":
        nvars = element.ring.ngens
        shift = tuple(shift) if shift is not None else (0,) * nvars
        return cls(nvars, {tuple(a + b for a, b in zip(m, shift)): c for m, c in element.items()})

    # --- доступ к данным ---
    @property
    def terms(self) -> Dict[Exponent, object]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, exponent: Sequence[int]):
        return self._terms.get(tuple(exponent), QQ(0))

    def support(self) -> frozenset:
        """Носитель: множество показателей с ненулевым коэффициентом."""
        return frozenset(self._terms)

    def terms_in_order(self) -> list:
        """Члены (показатель, коэффициент) по убыванию в градуированном лексикографическом порядке."""
        return sorted(self._terms.items(), key=lambda item: grlex_key(item[0]), reverse=True)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {(0,) * self.nvars}

    def min_exponents(self) -> Exponent:
        if not self._terms:
            return (0,) * self.nvars
        return tuple(min(e[i] for e in self._terms) for i in range(self.nvars))

    def depends_on(self, index: int) -> bool:
        return any(e[index] for e in self._terms)

    # --- арифметика ---
    def _check(self, other: "LaurentPoly"):
        if other.nvars != self.nvars:
            raise ValueError(f"Разное число переменных: {self.nvars} и {other.nvars}")

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        return LaurentPoly.constant(self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, QQ(0)) + c
        return LaurentPoly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        terms: Dict[Exponent, object] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, QQ(0)) + c1 * c2
        return LaurentPoly(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            if not self.is_monomial():
                raise ValueError("Отрицательная степень допустима только для мономов")
            (e, c), = self._terms.items()
            return LaurentPoly(self.nvars, {tuple(exponent * x for x in e): QQ(1) / c ** (-exponent)})
        result = LaurentPoly.constant(self.nvars, 1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, factor) -> "LaurentPoly":
        factor = QQ.convert(factor)
        return LaurentPoly(self.nvars, {e: c * factor for e, c in self._terms.items()})

    def shift(self, exponent: Sequence[int]) -> "LaurentPoly":
        """Умножение на моном X^exponent."""
        return LaurentPoly(self.nvars, {tuple(a + b for a, b in zip(e, exponent)): c for e, c in self._terms.items()})

    def diff(self, index: int) -> "LaurentPoly":
        """Частная производная по переменной с номером index."""
        terms = {}
        for e, c in self._terms.items():
            if e[index]:
                lowered = list(e)
                lowered[index] -= 1
                terms[tuple(lowered)] = c * e[index]
        return LaurentPoly(self.nvars, terms)

    def map_exponents(self, func, nvars: int) -> "LaurentPoly":
        """Мономиальная замена: показатель e переходит в func(e) (длины nvars)."""
        terms = {}
        for e, c in self._terms.items():
            image = tuple(func(e))
            terms[image] = terms.get(image, QQ(0)) + c
        return LaurentPoly(nvars, terms)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.nvars == other.nvars and self._terms == other._terms
        if not self._terms:
            return not other
        return self.is_constant() and self._terms.get((0,) * self.nvars) == QQ.convert(other)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # --- вычисления ---
    def evaluate(self, point: Sequence) -> object:
        total = QQ(0)
        for e, c in self._terms.items():
            value = c
            for x, k in zip(point, e):
                value *= QQ.convert(x) ** k
            total += value
        return total

    def evaluate_mod(self, point: Sequence[int], p: int) -> int:
        """Значение в точке тора над F_p (все координаты обратимы по модулю p)."""
        total = 0
        for e, c in self._terms.items():
            value = int(c.numerator) * pow(int(c.denominator), -1, p)
            for x, k in zip(point, e):
                value = value * pow(int(x), int(k), p) % p
            total = (total + value) % p
        return total

    def to_ring_element(self, poly_ring=None) -> tuple:
        """
        Переводит в многочлен sympy с неотрицательными показателями.

        Returns:
            (shift, element): self = X^shift · element.
        """
        poly_ring = poly_ring or polynomial_ring(self.nvars)
        shift = self.min_exponents()
        element = poly_ring.from_dict({tuple(a - b for a, b in zip(e, shift)): c for e, c in self._terms.items()})
        return shift, element

    def as_expr(self, names: Optional[Sequence[str]] = None) -> str:
        names = names or [f"Y{i + 1}" for i in range(self.nvars)]
        if not self._terms:
            return "0"
        pieces = []
        for e, c in self.terms_in_order():
            factors = []
            for name, k in zip(names, e):
                if k == 1:
                    factors.append(name)
                elif k:
                    factors.append(f"{name}^{k}")
            monomial = "*".join(factors)
            coeff = str(c) if c.denominator != 1 else str(int(c))
            if not monomial:
                pieces.append(coeff)
            elif c == 1:
                pieces.append(monomial)
            elif c == -1:
                pieces.append(f"-{monomial}")
            else:
                pieces.append(f"{coeff}*{monomial}")
        return " + ".join(pieces).replace("+ -", "- ")

    def __repr__(self):
        return f"LaurentPoly({self.as_expr()})"

    __str__ = as_expr


_RINGS: dict = {}


def polynomial_ring(nvars: int, extra: int = 0):
    """Кольцо QQ[Y1..Yn, T1..T_extra] с порядком grevlex (кэшируется)."""
    key = (nvars, extra)
    if key not in _RINGS:
        names = [f"Y{i + 1}" for i in range(nvars)] + [f"T{i + 1}" for i in range(extra)]
        if not names:
            names = ["Z"]
        _RINGS[key] = ring(",".join(names), QQ, grevlex)[0]
    return _RINGS[key]


# --- операции модуля ---

def support(f: LaurentPoly) -> frozenset:
    return f.support()


def newton_polytope(f: LaurentPoly) -> Polytope:
    """
    Многогранник Ньютона: выпуклая оболочка носителя.

    Raises:
        ValueError: для нулевого многочлена.
    """
    if f.is_zero():
        raise ValueError("Многогранник Ньютона нулевого многочлена не определён")
    return Polytope.from_points(f.support(), f.nvars)


def initial_form(f: LaurentPoly, omega: Sequence) -> LaurentPoly:
    """
    Начальная форма init_ω(f): сумма членов с минимальным ⟨α, ω⟩.
    ω может быть рациональным; init_ω(0) = 0.
    """
    if f.is_zero():
        return f
    omega = [QQ.convert(x) for x in omega]
    values = {e: sum((QQ(a) * w for a, w in zip(e, omega)), QQ(0)) for e in f.support()}
    minimum = min(values.values())
    return LaurentPoly(f.nvars, {e: c for e, c in f.items() if values[e] == minimum})


def is_integer_valued_on_cone(f: LaurentPoly, cone) -> bool:
    """
    Целозначность f на C(K): все точки носителя лежат в двойственном конусе C^*.

    Args:
        cone: Cone или HalfOpenCone (используется замыкание).
    """
    closure = cone.closure if isinstance(cone, HalfOpenCone) else cone
    for alpha in f.support():
        if any(sum(a * r for a, r in zip(alpha, ray)) < 0 for ray in closure.rays):
            return False
        if any(sum(a * l for a, l in zip(alpha, line)) != 0 for line in closure.lineality):
            return False
    return True


def monomial_normalize(f: LaurentPoly) -> tuple:
    """
    Разложение f = c · X^{-twist} · g, где g имеет нулевой минимальный показатель по
    каждой переменной и старший (grlex) коэффициент 1.

    Returns:
        (g, twist): g = X^twist · f / c.

    Raises:
        ValueError: для нулевого многочлена.
    """
    if f.is_zero():
        raise ValueError("Нельзя нормализовать нулевой многочлен")
    twist = tuple(-x for x in f.min_exponents())
    shifted = f.shift(twist)
    leading = shifted.terms_in_order()[0][1]
    return shifted.scale(QQ(1) / leading), twist


def make_monic(f: LaurentPoly) -> LaurentPoly:
    """Делит на старший коэффициент (без сдвига показателей)."""
    if f.is_zero():
        return f
    return f.scale(QQ(1) / f.terms_in_order()[0][1])


def underlying(f: LaurentPoly) -> LaurentPoly:
    """Нормализованный представитель f с точностью до монома и скаляра."""
    return monomial_normalize(f)[0]
