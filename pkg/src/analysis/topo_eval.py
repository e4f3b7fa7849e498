"""
Топологическое вычисление: отображение редукции red, данные лучей
симплициальных конусов и вклад регулярной части в дзета-функцию.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from src.analysis.euler import EulerCalculator, TorusSystem, split_torus_factor
from src.analysis.repdatum import BalancedPiece, ReprDatum
from src.core.exact import RationalFunction
from src.core.exceptions import InvariantViolation
from src.core.laurent import LaurentPoly, underlying
from src.core.polyhedra import HalfOpenCone, Polytope, cone_index, dot, refine_by_normal_fans, triangulate_halfopen

logger = logging.getLogger(__name__)

Series = List[RationalFunction]


# --- элементы M и red ---

@dataclass(frozen=True)
class MElement:
    """
    W = N(X, Y_1..Y_l) / ∏ (1 - X^a·Y^b)^e.

    Args:
        numerator: Многочлен Лорана от 1 + l переменных (X первой).
        factors: Кортежи (a, b, e): b - вектор показателей Y длины l, e ≥ 1.
    """
    numerator: LaurentPoly
    factors: Tuple[Tuple[int, Tuple[int, ...], int], ...] = ()

    def __post_init__(self):
        factors = tuple((int(a), tuple(int(x) for x in b), int(e)) for a, b, e in self.factors)
        for a, b, e in factors:
            if e < 1:
                raise ValueError(f"Кратность множителя должна быть положительной: {e}")
            if len(b) != self.numerator.nvars - 1:
                raise ValueError(f"Показатель {b} не соответствует {self.numerator.nvars - 1} переменным Y")
            if a == 0 and not any(b):
                raise ValueError("Множитель 1 - X^0 равен нулю")
        object.__setattr__(self, "factors", factors)

    @property
    def l(self) -> int:
        return self.numerator.nvars - 1

    def _multiplicities(self) -> dict:
        result = {}
        for a, b, e in self.factors:
            result[(a, b)] = result.get((a, b), 0) + e
        return result

    def __add__(self, other: "MElement") -> "MElement":
        mine, theirs = self._multiplicities(), other._multiplicities()
        common = {key: max(mine.get(key, 0), theirs.get(key, 0)) for key in set(mine) | set(theirs)}
        nvars = self.numerator.nvars

        def lifted(numerator: LaurentPoly, own: dict) -> LaurentPoly:
            result = numerator
            for (a, b), e in common.items():
                missing = e - own.get((a, b), 0)
                if missing:
                    one_minus = LaurentPoly.constant(nvars, 1) - LaurentPoly.monomial((a,) + b)
                    result = result * one_minus ** missing
            return result

        factors = tuple((a, b, e) for (a, b), e in sorted(common.items()))
        return MElement(lifted(self.numerator, mine) + lifted(other.numerator, theirs), factors)


def _exponent_form(a: int, b: Sequence[int], specialization: Sequence[Tuple[int, int]]) -> RationalFunction:
    """Показатель X после подстановки Y_λ = X^{-(p_λ·s + q_λ)}: a - Σ b_λ(p_λ s + q_λ)."""
    slope = -sum(x * p for x, (p, _) in zip(b, specialization))
    constant = a - sum(x * q for x, (_, q) in zip(b, specialization))
    return RationalFunction.linear(slope, constant)


def _binomial(c: RationalFunction, k: int) -> RationalFunction:
    result = RationalFunction.constant(1)
    for i in range(k):
        result = result * (c - i)
    return result / math.factorial(k)


def _power_series(c: RationalFunction, order: int) -> Series:
    """(1 + z)^c до z^order включительно."""
    return [_binomial(c, k) for k in range(order + 1)]


def _series_mul(a: Series, b: Series, order: int) -> Series:
    zero = RationalFunction.constant(0)
    result = [zero] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        if x.is_zero():
            continue
        for j, y in enumerate(b[: order + 1 - i]):
            result[i + j] = result[i + j] + x * y
    return result


def _series_inverse(a: Series, order: int) -> Series:
    if a[0].is_zero():
        raise ZeroDivisionError("Ряд с нулевым свободным членом необратим")
    inverse = [RationalFunction.constant(1) / a[0]]
    for k in range(1, order + 1):
        acc = RationalFunction.constant(0)
        for j in range(1, min(k, len(a) - 1) + 1):
            acc = acc + a[j] * inverse[k - j]
        inverse.append(-acc / a[0])
    return inverse


def _expansion(w: MElement, specialization: Optional[Sequence[Tuple[int, int]]]) -> tuple:
    """
    Раскладывает W = z^{-E} · P(z) / ∏(-c_i)^{e_i}, z = X - 1.

    Returns:
        (P до z^E, E, ∏(-c_i)^{e_i}).
    """
    specialization = tuple(specialization or [(1, 0)] * w.l)
    if len(specialization) != w.l:
        raise ValueError(f"Нужно {w.l} специализаций, получено {len(specialization)}")
    order = sum(e for _, _, e in w.factors)
    series = [RationalFunction.constant(0)] * (order + 1)
    for exponent, coeff in w.numerator.items():
        c = _exponent_form(exponent[0], exponent[1:], specialization)
        term = _power_series(c, order)
        series = [x + RationalFunction.constant(coeff) * y for x, y in zip(series, term)]
    scale = RationalFunction.constant(1)
    for a, b, e in w.factors:
        c = _exponent_form(a, b, specialization)
        if c.is_zero():
            raise ValueError(f"Показатель множителя 1 - X^{a}·Y^{b} тождественно равен нулю")
        # 1 - X^c = -c·z·g(z), g(0) = 1
        g = [_binomial(c, k + 1) / c for k in range(order + 1)]
        inverse = _series_inverse(g, order)
        for _ in range(e):
            series = _series_mul(series, inverse, order)
        scale = scale * (-c) ** e
    return series, order, scale


def m_membership(w: MElement, specialization: Optional[Sequence[Tuple[int, int]]] = None) -> bool:
    """Разложение W по степеням X - 1 не содержит отрицательных степеней."""
    series, order, _ = _expansion(w, specialization)
    return all(x.is_zero() for x in series[:order])


def red(w: MElement, specialization: Optional[Sequence[Tuple[int, int]]] = None) -> RationalFunction:
    """
    Свободный член разложения W(X, X^{-s}, ...) по степеням X - 1.

    Args:
        specialization: Пары (p, q) для подстановки Y_λ = X^{-(p·s + q)};
            по умолчанию все Y_λ = X^{-s}.

    Raises:
        ValueError: если W не лежит в M.
    """
    series, order, scale = _expansion(w, specialization)
    if any(not x.is_zero() for x in series[:order]):
        raise ValueError("Элемент не лежит в M: разложение содержит отрицательные степени X - 1")
    return series[order] / scale


# --- лучи ---

@dataclass(frozen=True)
class ExponentData:
    """
    Данные показателя на луче r: ⟨measure, r⟩ + Σ (a·s + b)·⟨ψ, r⟩.

    Args:
        measure: Вектор весов меры (единицы по всем координатам).
        terms: Пары (выбранная вершина ψ, (a, b)) по одной на множитель.
    """
    measure: Tuple[int, ...]
    terms: Tuple[Tuple[Tuple[int, ...], Tuple[int, int]], ...] = ()

    def form(self, ray: Sequence[int]) -> RationalFunction:
        slope = sum(a * dot(psi, ray) for psi, (a, _) in self.terms)
        constant = dot(self.measure, ray) + sum(b * dot(psi, ray) for psi, (_, b) in self.terms)
        return RationalFunction.linear(slope, constant)


@dataclass(frozen=True)
class RayContribution:
    """Индекс симплициального конуса и линейные формы c_r(s) его лучей."""
    index: int
    forms: Tuple[RationalFunction, ...]

    def __post_init__(self):
        for form in self.forms:
            if form.is_zero():
                raise InvariantViolation("Линейная форма луча тождественно равна нулю")

    def value(self) -> RationalFunction:
        result = RationalFunction.constant(self.index)
        for form in self.forms:
            result = result / form
        return result


def ray_contribution(rays: Sequence[Sequence[int]], data: ExponentData) -> RayContribution:
    return RayContribution(cone_index(rays), tuple(data.form(r) for r in rays))


def cone_red(cone, data: ExponentData) -> RationalFunction:
    """
    index(σ) · ∏_r 1/c_r(s) для симплициального конуса σ.

    Args:
        cone: HalfOpenCone (берутся лучи замыкания) или последовательность лучей.

    Raises:
        InvariantViolation: если какая-то c_r тождественно равна нулю.
    """
    rays = cone.closure.rays if isinstance(cone, HalfOpenCone) else [tuple(r) for r in cone]
    return ray_contribution(rays, data).value()


# --- вклад части ---

def _lift(phi: Sequence[int], y_power: int, g_position: Optional[int], m: int) -> Tuple[int, ...]:
    excess = [0] * m
    if g_position is not None:
        excess[g_position] = 1
    return tuple(phi) + (y_power,) + tuple(excess)


def factor_polytopes(piece: BalancedPiece, datum: ReprDatum, G: Sequence[LaurentPoly]) -> List[Tuple[Polytope, Tuple[int, int]]]:
    """
    Многогранники минимумов для каждого множителя: точки ψ(f) = (φ(f), 0 или 1, e_g).
    """
    m = len(G)
    positions = {g: k for k, g in enumerate(G)}
    ambient = datum.n + 1 + m
    result = []
    for factor in datum.factors:
        points = []
        for index, y_power in ((factor.S_index, 0), (factor.T_index, 1)):
            if index is None:
                continue
            for init, phi in zip(piece.inits[index], piece.phis[index]):
                key = None if init.is_monomial() else underlying(init)
                points.append(_lift(phi, y_power, positions.get(key), m))
        result.append((Polytope.from_points(points, ambient), factor.exp))
    return result


def euler_factor(piece: BalancedPiece, n: int, G: Sequence[LaurentPoly],
                 calculator: Optional[EulerCalculator] = None) -> int:
    """χ(U_G): {g = 0 для g ∈ G, остальные начальные формы ≠ 0} после отщепления тора."""
    calculator = calculator or EulerCalculator()
    others = tuple(g for g in piece.distinct_inits() if g not in set(G))
    system = TorusSystem(n, tuple(G), others)
    return calculator.characteristic(split_torus_factor(system, piece.face_dim))


def piece_contribution(piece: BalancedPiece, G: Sequence[LaurentPoly], datum: ReprDatum,
                       calculator: Optional[EulerCalculator] = None, seed: int = 0,
                       chi: Optional[int] = None) -> RationalFunction:
    """
    Вклад регулярной части и подмножества G её начальных форм.

    Конус H = cell × R_{>0} (координата y) × R_{>0}^G измельчается так, чтобы
    каждый минимум был линеен, триангулируется, и по ячейкам максимальной
    размерности суммируется cone_red; результат умножается на χ(U_G).

    Args:
        chi: Уже вычисленная χ(U_G), если есть.
        seed: Выбор общего вектора триангуляции (результат от него не зависит).
    """
    zero = RationalFunction.constant(0)
    n = datum.n
    cell = piece.cell
    if cell.dim != n - piece.face_dim - 1:
        return zero
    G = tuple(G)
    if chi is None:
        chi = euler_factor(piece, n, G, calculator)
    if chi == 0:
        return zero
    m = len(G)
    ambient = n + 1 + m
    positive = [tuple(int(i == j) for j in range(ambient)) for i in range(n, ambient)]
    H = cell.embed(1 + m)
    for row in positive:
        H = H.with_constraint(row, "gt")
    target_dim = m + 1 + cell.dim

    polytopes = factor_polytopes(piece, datum, G)
    total = zero
    for sub, chosen in refine_by_normal_fans(H, [p for p, _ in polytopes]):
        if sub.dim != target_dim:
            continue
        data = ExponentData((1,) * ambient, tuple((psi, exp) for psi, (_, exp) in zip(chosen, polytopes)))
        for simplex in triangulate_halfopen(sub, seed):
            total = total + cone_red(simplex, data)
    result = total * chi
    logger.debug(f"Contribution of {piece.describe()} with |G|={m}: chi={chi}, {result}")
    return result


if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(name)s - %(message)s')
    one_minus_y = LaurentPoly(2, {(0, 0): 1, (0, 1): -1})
    w = MElement(one_minus_y, ((1, (1,), 1),))
    print(f"red((1-Y)/(1-XY)) = {red(w)}")
