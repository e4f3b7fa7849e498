"""
Минимальный набор операций с идеалами над QQ: базисы Грёбнера, проверка
существования нулей в алгебраическом торе и пустоты множества, где падает
ранг матрицы Якоби.
"""
import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

from sympy import QQ
from sympy.polys.groebnertools import groebner
from sympy.polys.matrices import DomainMatrix

from src.core.laurent import LaurentPoly, polynomial_ring

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Ideal:
    """
    Идеал, порождённый многочленами Лорана (при переходе к кольцу многочленов
    каждый образующий умножается на подходящий моном).
    """
    nvars: int
    generators: Tuple[LaurentPoly, ...]

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        for g in self.generators:
            if g.is_zero():
                raise ValueError("Образующие идеала должны быть ненулевыми")
            if g.nvars != self.nvars:
                raise ValueError(f"Образующий {g} не соответствует числу переменных {self.nvars}")


def _cleared(polys: Sequence[LaurentPoly], poly_ring, nvars: int) -> list:
    extra = poly_ring.ngens - nvars
    elements = []
    for f in polys:
        shift = f.min_exponents()
        elements.append(poly_ring.from_dict(
            {tuple(a - b for a, b in zip(e, shift)) + (0,) * extra: c for e, c in f.items()}))
    return elements


def groebner_basis(ideal: Ideal) -> list:
    """
    Приведённый базис Грёбнера в порядке grevlex.

    Returns:
        Список PolyElement кольца QQ[Y1..Yn]; [1] для единичного идеала.
    """
    poly_ring = polynomial_ring(ideal.nvars)
    if not ideal.generators:
        return []
    return groebner(_cleared(ideal.generators, poly_ring, ideal.nvars), poly_ring)


def _is_unit_ideal(basis: list) -> bool:
    return any(g and g.is_ground for g in basis)


@lru_cache(maxsize=4096)
def _torus_zero_exists(polys: frozenset, nvars: int) -> bool:
    if not polys:
        return True
    if any(f.is_monomial() for f in polys):
        return False
    if nvars == 0:
        return False
    poly_ring = polynomial_ring(nvars, extra=1)
    elements = _cleared(sorted(polys, key=str), poly_ring, nvars)
    # 1 - T·Y1⋯Yn: насыщение по произведению координат
    product = poly_ring.one
    for gen in poly_ring.gens[:nvars]:
        product *= gen
    elements.append(poly_ring.one - poly_ring.gens[nvars] * product)
    basis = groebner(elements, poly_ring)
    return not _is_unit_ideal(basis)


def torus_zero_exists(polys: Sequence[LaurentPoly], nvars: int) -> bool:
    """
    Есть ли у системы общий нуль в торе (все координаты ненулевые) над
    алгебраическим замыканием QQ.
    """
    polys = [f for f in polys if not f.is_zero()]
    return _torus_zero_exists(frozenset(polys), nvars)


def determinant(matrix: Sequence[Sequence[LaurentPoly]], nvars: int) -> LaurentPoly:
    """
    Определитель квадратной матрицы многочленов Лорана.

    Строка r домножается на X^{-m_r} (m_r - покомпонентный минимум показателей),
    определитель полученной матрицы над QQ[Y] считает DomainMatrix.det.
    """
    size = len(matrix)
    if size == 0:
        return LaurentPoly.constant(nvars, 1)
    if nvars == 0:
        values = [[entry.terms.get((), QQ(0)) for entry in row] for row in matrix]
        return LaurentPoly.constant(0, DomainMatrix(values, (size, size), QQ).det())
    poly_ring = polynomial_ring(nvars)
    rows, total_shift = [], (0,) * nvars
    for row in matrix:
        nonzero = [entry for entry in row if not entry.is_zero()]
        if not nonzero:
            return LaurentPoly.zero(nvars)
        shift = tuple(min(entry.min_exponents()[i] for entry in nonzero) for i in range(nvars))
        total_shift = tuple(a + b for a, b in zip(total_shift, shift))
        rows.append([poly_ring.from_dict({tuple(a - b for a, b in zip(e, shift)): c for e, c in entry.terms.items()})
                     for entry in row])
    value = DomainMatrix(rows, (size, size), poly_ring.to_domain()).det()
    return LaurentPoly.from_ring_element(value, total_shift)


def jacobian_minors(polys: Sequence[LaurentPoly], nvars: int) -> List[LaurentPoly]:
    """
    Ненулевые максимальные миноры логарифмической матрицы Якоби (X_i ∂/∂X_i).
    На торе её ранг совпадает с рангом обычной матрицы Якоби.
    """
    k = len(polys)
    rows = [[f.diff(i).shift(tuple(1 if j == i else 0 for j in range(nvars))) for i in range(nvars)] for f in polys]
    minors = []
    for columns in itertools.combinations(range(nvars), k):
        minor = determinant([[row[c] for c in columns] for row in rows], nvars)
        if not minor.is_zero():
            minors.append(minor)
    return minors


def rank_drop_locus_empty(polys: Sequence[LaurentPoly], nvars: int) -> bool:
    """
    Пуста ли в торе система {g = 0 для g ∈ G} ∪ {все |G|×|G| миноры Якоби = 0}.

    При |G| > n ранг всегда меньше |G|, и ответ сводится к отсутствию
    общих нулей G в торе.
    """
    polys = list(polys)
    if not torus_zero_exists(polys, nvars):
        return True
    if len(polys) > nvars:
        logger.debug(f"{len(polys)} polynomials in {nvars} variables have a torus zero: rank drop")
        return False
    minors = jacobian_minors(polys, nvars)
    if not minors:
        return False
    return not torus_zero_exists(polys + minors, nvars)
