"""
Эйлеровы характеристики подмногообразий алгебраического тора T^d(C):
    {g = 0 для g ∈ vanishing, h ≠ 0 для h ∈ nonvanishing}.

Открытые условия снимаются формулой включений-исключений; каждая замкнутая
страта вычисляется комбинаторно (мономы, ранг решётки носителей, исключение
разрешимой переменной, формула Хованского через смешанные объёмы), а в
остальных случаях - оракулом: числом точек над F_p как многочленом от q при q = 1.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from sympy.polys.polyfuncs import interpolate

from src.core.config import DEFAULT_ORACLE_PRIMES, ORACLE_MODES
from src.core.exact import integer_rank, smith_normal_form
from src.core.exceptions import EulerMismatch, OracleInconclusive
from src.core.idealtools import rank_drop_locus_empty, torus_zero_exists
from src.core.laurent import LaurentPoly, initial_form, newton_polytope, underlying
from src.core.polyhedra import HalfOpenCone, compositions, grlex_key, mixed_volume

logger = logging.getLogger(__name__)

# Предел перебора точек (p-1)^d для одного простого
ORACLE_POINT_LIMIT = 20_000_000


@dataclass(frozen=True)
class TorusSystem:
    """
    Система в торе размерности dim.

    Args:
        dim: Размерность тора d.
        vanishing: Многочлены, которые обращаются в нуль.
        nonvanishing: Многочлены, которые не обращаются в нуль.
    """
    dim: int
    vanishing: Tuple[LaurentPoly, ...] = ()
    nonvanishing: Tuple[LaurentPoly, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vanishing", tuple(self.vanishing))
        object.__setattr__(self, "nonvanishing", tuple(self.nonvanishing))
        for f in self.vanishing + self.nonvanishing:
            if f.is_zero():
                raise ValueError("Система не может содержать нулевой многочлен")
            if f.nvars != self.dim:
                raise ValueError(f"Многочлен {f} не от {self.dim} переменных")

    def describe(self) -> str:
        zeros = ", ".join(f"{f} = 0" for f in self.vanishing)
        units = ", ".join(f"{f} ≠ 0" for f in self.nonvanishing)
        body = "; ".join(part for part in (zeros, units) if part) or "-"
        return f"T^{self.dim}: {body}"


# --- расщепление торического множителя ---

def _directions(polys: Sequence[LaurentPoly]) -> List[tuple]:
    rows = []
    for f in polys:
        base = min(f.support(), key=grlex_key)
        rows.extend(tuple(a - b for a, b in zip(e, base)) for e in f.support() if e != base)
    return rows


def split_torus_factor(system: TorusSystem, tau_dim: int) -> TorusSystem:
    """
    Унимодулярная замена координат, после которой система зависит только от
    первых tau_dim координат; возвращает сжатую систему в T^{tau_dim}.

    Raises:
        ValueError: если решётка направлений носителей имеет ранг больше tau_dim.
    """
    polys = system.vanishing + system.nonvanishing
    rows = _directions(polys)
    d = system.dim
    if rows:
        diag, _, right = smith_normal_form(rows)
        rank = sum(1 for x in diag if x)
        transform = [[int(x) for x in row] for row in right.to_list()]
    else:
        rank = 0
        transform = [[int(i == j) for j in range(d)] for i in range(d)]
    if rank > tau_dim:
        raise ValueError(f"Ранг решётки направлений {rank} больше {tau_dim}")

    def compress(f: LaurentPoly) -> LaurentPoly:
        base = min(f.support(), key=grlex_key)
        terms = {}
        for e, c in f.items():
            diff = [a - b for a, b in zip(e, base)]
            image = tuple(sum(diff[i] * transform[i][j] for i in range(d)) for j in range(d))
            if any(image[tau_dim:]):
                raise ArithmeticError(f"Замена координат не сжимает {f}")
            terms[image[:tau_dim]] = c
        return LaurentPoly(tau_dim, terms)

    compressed = TorusSystem(tau_dim,
                             tuple(compress(f) for f in system.vanishing),
                             tuple(compress(f) for f in system.nonvanishing))
    logger.debug(f"Split torus factor: {system.describe()} -> {compressed.describe()}")
    return compressed


# --- вспомогательные преобразования ---

def _degrees_in(f: LaurentPoly, index: int) -> Dict[int, LaurentPoly]:
    """Разложение f = Σ_k X_index^k · f_k; f_k не зависят от X_index (показатель обнулён)."""
    parts: Dict[int, dict] = {}
    for e, c in f.items():
        rest = e[:index] + (0,) + e[index + 1:]
        parts.setdefault(e[index], {})[rest] = c
    return {k: LaurentPoly(f.nvars, terms) for k, terms in parts.items()}


def _flip(f: LaurentPoly, index: int) -> LaurentPoly:
    return f.map_exponents(lambda e: e[:index] + (-e[index],) + e[index + 1:], f.nvars)


def _drop(f: LaurentPoly, index: int) -> LaurentPoly:
    return f.map_exponents(lambda e: e[:index] + e[index + 1:], f.nvars - 1)


def _solvable_variable(polys: Sequence[LaurentPoly]) -> Optional[tuple]:
    """
    Ищет g и переменную x_i, для которых g = x_i^k (A + x_i·B) с мономом B
    (или мономом A, тогда x_i заменяется на x_i^{-1}).

    Returns:
        (позиция g, индекс переменной, нужно ли обращать переменную) или None.
    """
    for position, g in enumerate(polys):
        for index in range(g.nvars):
            parts = _degrees_in(g, index)
            if len(parts) != 2:
                continue
            low, high = sorted(parts)
            if high - low != 1:
                continue
            if parts[high].is_monomial():
                return position, index, False
            if parts[low].is_monomial():
                return position, index, True
    return None


def _eliminate(polys: Sequence[LaurentPoly], position: int, index: int) -> tuple:
    """
    Решает polys[position] = 0 относительно x_index и подставляет в остальные.

    Returns:
        (остальные многочлены от d-1 переменных, многочлен A, который не должен обращаться в нуль).
    """
    g = polys[position]
    parts = _degrees_in(g, index)
    low, high = sorted(parts)
    A, B = parts[low], parts[high]
    # x = -A/B; B = c·m - моном
    minus_a = -A
    result = []
    for k, h in enumerate(polys):
        if k == position:
            continue
        h_parts = _degrees_in(h, index)
        kmin, kmax = min(h_parts), max(h_parts)
        total = LaurentPoly.zero(h.nvars)
        for degree, coeff in h_parts.items():
            total = total + coeff * minus_a ** (degree - kmin) * B ** (kmax - degree)
        if total.is_zero():
            continue
        result.append(_drop(total, index))
    return result, _drop(A, index)


def _lattice_rank(polys: Sequence[LaurentPoly]) -> int:
    rows = _directions(polys)
    return integer_rank(rows) if rows else 0


def is_nondegenerate(polys: Sequence[LaurentPoly], d: int) -> bool:
    """
    Невырожденность по Ньютону: для каждой грани суммы Минковского начальные
    формы задают гладкое полное пересечение в торе (проверка по ячейкам
    общего измельчения нормальных вееров).
    """
    cells = [HalfOpenCone(d)]
    seen = set()
    for f in polys:
        vertices = sorted(newton_polytope(f).vertices, key=grlex_key)
        for a, b in itertools.combinations(vertices, 2):
            gamma = tuple(x - y for x, y in zip(a, b))
            if gamma in seen:
                continue
            seen.add(gamma)
            refined = []
            for cell in cells:
                if cell.sign_on(gamma) is not None:
                    refined.append(cell)
                else:
                    refined.extend(cell.split(gamma))
            cells = refined
    for cell in cells:
        omega = cell.interior_point()
        inits = [initial_form(f, omega) for f in polys]
        if any(g.is_monomial() for g in inits):
            continue
        if not rank_drop_locus_empty(inits, d):
            logger.debug(f"Degenerate face at omega={omega}: {[str(g) for g in inits]}")
            return False
    return True


def khovanskii_characteristic(polys: Sequence[LaurentPoly], d: int) -> int:
    """
    χ невырожденного полного пересечения k гиперповерхностей в T^d:
    (-1)^{d-k} Σ_{m_i ≥ 1, Σm_i = d} MV(Δ_1^{m_1}, ..., Δ_k^{m_k}).
    """
    k = len(polys)
    polytopes = [newton_polytope(f) for f in polys]
    total = 0
    for multiplicities in compositions(d, k, minimum=1):
        repeated = [p for p, m in zip(polytopes, multiplicities) for _ in range(m)]
        total += mixed_volume(repeated)
    return (-1) ** (d - k) * total


# --- оракул ---

def _coefficient_primes(polys: Sequence[LaurentPoly]) -> set:
    bad = set()
    for f in polys:
        for _, c in f.items():
            for value in (int(c.numerator), int(c.denominator)):
                bad.update(sympy.primefactors(abs(value)))
    return bad


def _count_points(system: TorusSystem, p: int) -> int:
    d = system.dim
    if d == 0:
        constants = [f.evaluate(()) for f in system.vanishing]
        units = [f.evaluate(()) for f in system.nonvanishing]
        return int(all(c == 0 for c in constants) and all(c != 0 for c in units))
    if (p - 1) ** d > ORACLE_POINT_LIMIT:
        raise OracleInconclusive(f"Слишком много точек для перебора: ({p}-1)^{d}")
    values = np.arange(1, p, dtype=np.int64)
    power_cache: Dict[int, np.ndarray] = {}

    def powers(exponent: int) -> np.ndarray:
        exponent %= p - 1
        if exponent not in power_cache:
            power_cache[exponent] = np.array([pow(int(x), exponent, p) for x in values], dtype=np.int64)
        return power_cache[exponent]

    shape = (p - 1,) * d

    def evaluate(f: LaurentPoly) -> np.ndarray:
        total = np.zeros(shape, dtype=np.int64)
        for e, c in f.items():
            coeff = int(c.numerator) * pow(int(c.denominator), -1, p) % p
            term = np.full(shape, coeff, dtype=np.int64)
            for axis, k in enumerate(e):
                if k == 0:
                    continue
                view = [1] * d
                view[axis] = p - 1
                term = term * powers(k).reshape(view) % p
            total = (total + term) % p
        return total

    mask = np.ones(shape, dtype=bool)
    for f in system.vanishing:
        mask &= evaluate(f) == 0
    for f in system.nonvanishing:
        mask &= evaluate(f) != 0
    return int(mask.sum())


def pointcount_interpolation_oracle(system: TorusSystem, primes: Sequence[int] = DEFAULT_ORACLE_PRIMES) -> int:
    """
    Эйлерова характеристика по числу точек над F_p.

    Числа точек N(p) интерполируются многочленом степени ≤ d по первым d+1
    простым, остальные простые проверяют интерполяцию. Возвращается значение
    многочлена при q = 1.

    Raises:
        OracleInconclusive: если числа точек не ложатся на многочлен.
    """
    d = system.dim
    bad = _coefficient_primes(system.vanishing + system.nonvanishing)
    usable = [p for p in primes if p not in bad]
    candidate = max(primes) if primes else 100
    while len(usable) < d + 2:
        candidate = sympy.nextprime(candidate)
        if candidate not in bad:
            usable.append(candidate)
    counts = [(p, _count_points(system, p)) for p in usable]
    q = sympy.Symbol("q")
    fitted = sympy.expand(interpolate(counts[: d + 1], q))
    for p, count in counts[d + 1:]:
        if fitted.subs(q, p) != count:
            raise OracleInconclusive(
                f"Числа точек {counts} не описываются многочленом степени ≤ {d} для {system.describe()}")
    value = fitted.subs(q, 1)
    if not value.is_integer:
        raise OracleInconclusive(f"Значение при q = 1 не целое: {value}")
    logger.debug(f"Oracle fitted {fitted} for {system.describe()}")
    return int(value)


# --- вычислитель ---

@dataclass
class EulerCalculator:
    """
    Вычисляет χ систем в торе и записывает путь вычисления каждой страты.

    Args:
        oracle_mode: "off" - оракул только как запасной путь; "crosscheck" -
            каждая комбинаторная страта сверяется с оракулом; "only" - только оракул.
        primes: Простые числа для оракула.
    """
    oracle_mode: str = "off"
    primes: Tuple[int, ...] = DEFAULT_ORACLE_PRIMES
    records: List[dict] = field(default_factory=list)

    def __post_init__(self):
        if self.oracle_mode not in ORACLE_MODES:
            raise ValueError(f"Неизвестный режим оракула: {self.oracle_mode}")

    def characteristic(self, system: TorusSystem) -> int:
        if self.oracle_mode == "only":
            value = pointcount_interpolation_oracle(system, self.primes)
            self._record(system, "oracle", value)
            return value
        if any(f.is_monomial() for f in system.vanishing):
            return 0
        units = []
        for h in system.nonvanishing:
            if h.is_monomial():
                continue
            key = underlying(h)
            if key not in units:
                units.append(key)
        total = 0
        for size in range(len(units) + 1):
            for extra in itertools.combinations(units, size):
                total += (-1) ** size * self.closed(system.dim, list(system.vanishing) + list(extra))
        return total

    def closed(self, d: int, polys: Sequence[LaurentPoly]) -> int:
        """χ замкнутой страты {g = 0 для всех g ∈ polys} ⊂ T^d."""
        value, path = self._closed(d, polys)
        if self.oracle_mode == "crosscheck" and path != "oracle":
            self._crosscheck(d, polys, value, path)
        self._record(TorusSystem(d, tuple(polys)), path, value)
        return value

    def _closed(self, d: int, polys: Sequence[LaurentPoly]) -> tuple:
        if any(f.is_monomial() for f in polys):
            return 0, "monomial"
        distinct = []
        for f in polys:
            key = underlying(f)
            if key not in distinct:
                distinct.append(key)
        if not distinct:
            return (1 if d == 0 else 0), "torus"
        if not torus_zero_exists(distinct, d):
            return 0, "empty"
        if _lattice_rank(distinct) < d:
            return 0, "torus-action"
        solvable = _solvable_variable(distinct)
        if solvable is not None:
            position, index, flip = solvable
            if flip:
                distinct = [_flip(f, index) for f in distinct]
            rest, unit = _eliminate(distinct, position, index)
            reduced = TorusSystem(d - 1, tuple(rest), () if unit.is_monomial() else (unit,))
            return self.characteristic(reduced), "elimination"
        if len(distinct) <= d and is_nondegenerate(distinct, d):
            return khovanskii_characteristic(distinct, d), "khovanskii"
        logger.warning(f"No combinatorial rule for stratum in T^{d} {[str(f) for f in distinct]}; using the point-count oracle")
        return pointcount_interpolation_oracle(TorusSystem(d, tuple(distinct)), self.primes), "oracle"

    def _crosscheck(self, d: int, polys: Sequence[LaurentPoly], value: int, path: str):
        system = TorusSystem(d, tuple(polys))
        try:
            expected = pointcount_interpolation_oracle(system, self.primes)
        except OracleInconclusive as e:
            logger.warning(f"Crosscheck skipped for {system.describe()}: {e}")
            return
        if expected != value:
            raise EulerMismatch(f"χ({system.describe()}): путь {path} дал {value}, оракул дал {expected}")

    def _record(self, system: TorusSystem, path: str, value: int):
        self.records.append({"system": system.describe(), "path": path, "chi": int(value)})


def euler_characteristic(system: TorusSystem, oracle_mode: str = "off",
                         primes: Sequence[int] = DEFAULT_ORACLE_PRIMES,
                         records: Optional[list] = None) -> int:
    """
    χ системы {vanishing = 0, nonvanishing ≠ 0} в T^d(C).

    Args:
        records: Если задан, сюда дописываются записи о пути вычисления каждой страты.
    """
    calculator = EulerCalculator(oracle_mode, tuple(primes))
    value = calculator.characteristic(system)
    if records is not None:
        records.extend(calculator.records)
    return value


if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(name)s - %(message)s')
    line = LaurentPoly(2, {(0, 0): 1, (1, 0): 1, (0, 1): 1})
    print(f"χ(V(1+x+y)) = {euler_characteristic(TorusSystem(2, (line,)))}")
    print(f"oracle: {pointcount_interpolation_oracle(TorusSystem(2, (line,)))}")
