"""
Главный цикл вычисления топологической дзета-функции представлений:
построение датума → упрощение → балансировка → проверка регулярности →
редукция → вычисление вкладов регулярных частей.
"""
import heapq
import itertools
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from sympy import QQ

from src.analysis.euler import EulerCalculator
from src.analysis.lie import NilpotentLieAlgebra, direct_sum
from src.analysis.repdatum import (
    ReprDatum,
    balance,
    construct_datum,
    find_witness,
    reduce_split,
    simplify,
    weight,
)
from src.analysis.topo_eval import euler_factor, piece_contribution
from src.core.config import DEFAULT_ORACLE_PRIMES, ORACLE_MODES, Settings
from src.core.exact import RationalFunction, format_rational
from src.core.exceptions import InvariantViolation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EngineConfig:
    """
    Параметры вычисления.

    Args:
        depth_bound: Граница глубины редукции.
        oracle_mode: "off", "crosscheck" или "only".
        jobs: Число процессов для вычисления вкладов.
        trace: Собирать ли структурированный журнал событий.
        oracle_primes: Простые числа оракула.
    """
    depth_bound: int = 16
    oracle_mode: str = "off"
    jobs: int = 1
    trace: bool = False
    oracle_primes: tuple = DEFAULT_ORACLE_PRIMES

    def __post_init__(self):
        if self.depth_bound < 0:
            raise ValueError(f"Граница глубины должна быть неотрицательной: {self.depth_bound}")
        if self.oracle_mode not in ORACLE_MODES:
            raise ValueError(f"Неизвестный режим оракула: {self.oracle_mode}")
        if self.jobs < 1:
            raise ValueError(f"Число процессов должно быть положительным: {self.jobs}")

    @classmethod
    def from_settings(cls, settings: Settings, **overrides) -> "EngineConfig":
        values = dict(depth_bound=settings.depth_bound, oracle_mode=settings.oracle_mode,
                      jobs=settings.jobs, oracle_primes=tuple(settings.oracle_primes))
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def cache_options(self) -> dict:
        """Параметры, от которых зависит результат (для ключа кэша)."""
        return {"depth_bound": self.depth_bound}


@dataclass
class ZetaResult:
    """Результат вычисления для одной алгебры."""
    zeta: RationalFunction
    omega: object
    weight: int
    piece_count: int = 0
    reduction_count: int = 0
    seconds: float = 0.0
    name: str = ""
    trace: List[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        """Стабильный формат: {"zeta": {"num": [...], "den": [...]}, "omega": "p/q", "weight": n}."""
        return {"zeta": self.zeta.to_json(), "omega": format_rational(self.omega), "weight": self.weight}


def _push(heap: list, counter, datum: ReprDatum):
    heapq.heappush(heap, (datum.depth, next(counter), datum))


def _evaluate_task(task: tuple) -> tuple:
    """
    Вклад одной пары (часть, G).

    Результат состоит только из встроенных типов: вклад передаётся в виде
    RationalFunction.to_json(), так как многочлены sympy не сериализуются pickle.
    """
    datum, piece, G, oracle_mode, primes = task
    calculator = EulerCalculator(oracle_mode, primes)
    chi = euler_factor(piece, datum.n, G, calculator)
    value = piece_contribution(piece, G, datum, calculator, chi=chi)
    return int(chi), value.to_json(), calculator.records


def regular_pieces(datum: ReprDatum, config: EngineConfig, trace: Optional[list] = None) -> tuple:
    """
    Рабочий цикл: части обрабатываются в порядке возрастания глубины редукции.

    Returns:
        (список (датум, регулярная часть), число редукций).

    Raises:
        ReductionFailure: если редукция невозможна или глубина исчерпана.
    """
    heap, counter = [], itertools.count()
    for cell in datum.region:
        _push(heap, counter, datum.restrict(cell))
    regular, reductions = [], 0
    while heap:
        _, _, current = heapq.heappop(heap)
        current = simplify(current)
        for sub, piece in balance(current):
            witness = find_witness(piece, sub.n)
            if witness is None:
                regular.append((sub, piece))
                if trace is not None:
                    trace.append({"event": "regular", "depth": sub.depth, "piece": piece.describe()})
                continue
            simplified = simplify(sub)
            if simplified.sets != sub.sets:
                _push(heap, counter, simplified)
                continue
            if trace is not None:
                trace.append({"event": "reduction", "depth": sub.depth, "piece": piece.describe(),
                              "witness": [str(g) for g in witness]})
            reductions += 1
            for branch in reduce_split(sub, piece, config.depth_bound):
                if branch is not None:
                    _push(heap, counter, branch)
    logger.info(f"Worklist finished: {len(regular)} regular pieces after {reductions} reductions")
    return regular, reductions


def topological_rep_zeta(algebra: NilpotentLieAlgebra, config: Optional[EngineConfig] = None) -> ZetaResult:
    """
    Топологическая дзета-функция представлений ζ_{G,top}(s).

    Args:
        algebra: Проверенная нильпотентная алгебра Ли над Q.
        config: Параметры вычисления.

    Returns:
        ZetaResult; для абелевой алгебры ζ = 1.

    Raises:
        ReductionFailure: если алгоритм не применим к алгебре.
    """
    config = config or EngineConfig()
    start = time.perf_counter()
    trace: Optional[list] = [] if config.trace else None
    name = algebra.name or "algebra"
    if algebra.is_abelian or algebra.dim <= 1:
        logger.info(f"{name} is abelian: zeta = 1")
        one = RationalFunction.constant(1)
        return ZetaResult(one, QQ(0), 0, seconds=time.perf_counter() - start, name=name, trace=trace or [])

    datum = construct_datum(algebra)
    datum_weight = weight(datum)
    if trace is not None:
        trace.append({"event": "datum", "n": datum.n, "weight": datum_weight, "datum": datum.describe()})
    regular, reductions = regular_pieces(datum, config, trace)

    tasks = []
    for sub, piece in regular:
        if piece.cell.dim != sub.n - piece.face_dim - 1:
            continue
        forms = piece.distinct_inits()
        for size in range(len(forms) + 1):
            for G in itertools.combinations(forms, size):
                tasks.append((sub, piece, G, config.oracle_mode, tuple(config.oracle_primes)))

    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as executor:
            outcomes = list(executor.map(_evaluate_task, tasks))
    else:
        outcomes = [_evaluate_task(task) for task in tasks]

    total = RationalFunction.constant(1)
    for task, (chi, payload, records) in zip(tasks, outcomes):
        value = RationalFunction.from_json(payload)
        total = total + value
        if trace is not None:
            _, piece, G, _, _ = task
            trace.extend({"event": "euler", **record} for record in records)
            trace.append({"event": "contribution", "piece": piece.describe(), "G": [str(g) for g in G],
                          "chi": chi, "value": value.to_plain()})

    elapsed = time.perf_counter() - start
    result = ZetaResult(total, omega_invariant(total), datum_weight, len(regular), reductions,
                        elapsed, name, trace or [])
    logger.info(f"{name}: zeta = {total} ({len(regular)} pieces, {reductions} reductions, {elapsed:.2f}s)")
    return result


# --- инварианты ---

def omega_invariant(z: RationalFunction):
    """
    ω = lim_{s→∞} s·(z(s) - 1).

    Raises:
        ValueError: если степень z - 1 больше -1.
    """
    difference = z - 1
    if difference.is_zero():
        return QQ(0)
    if difference.degree() > -1:
        raise ValueError(f"Степень z - 1 равна {difference.degree()}, ожидается ≤ -1")
    return (difference * RationalFunction.variable()).limit_at_infinity()


def fixed_points(z: RationalFunction) -> list:
    """Комплексные корни num(s) - s·den(s), то есть неподвижные точки z."""
    coefficients = (z - RationalFunction.variable()).coefficients()["num"]
    while coefficients and coefficients[-1] == 0:
        coefficients.pop()
    if len(coefficients) < 2:
        return []
    return sorted(np.roots([float(c) for c in reversed(coefficients)]).tolist(), key=lambda x: (x.real, x.imag))


@dataclass
class InvariantReport:
    """Жёсткие нарушения и наблюдения (только для отчёта)."""
    failures: List[str] = field(default_factory=list)
    observations: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_invariants(z: RationalFunction, derived_dim: int, dim: Optional[int] = None,
                     strict: bool = True) -> InvariantReport:
    """
    Проверяет результат.

    Жёсткие условия: степень 0, предел 1 на бесконечности, все полюса
    рациональны и не превосходят размерности коммутанта.
    Наблюдения: числитель обращается в нуль при s = 0, ω > 0, степень z - 1
    равна -1, неподвижные точки имеют вещественную часть в [0, dim - 1].

    Raises:
        InvariantViolation: при strict=True и нарушении жёсткого условия.
    """
    report = InvariantReport()
    if z.degree() != 0:
        report.failures.append(f"степень {z.degree()} вместо 0")
    elif z.limit_at_infinity() != 1:
        report.failures.append(f"предел на бесконечности {format_rational(z.limit_at_infinity())} вместо 1")
    for pole, multiplicity in z.poles():
        if pole is None:
            report.failures.append(f"нерациональный полюс кратности {multiplicity}")
        elif pole > derived_dim:
            report.failures.append(f"полюс {format_rational(pole)} больше dim[g,g] = {derived_dim}")

    if not report.failures:
        omega = omega_invariant(z)
        report.observations["vanishes_at_zero"] = z.coefficients()["num"][0] == 0
        report.observations["omega_positive"] = omega > 0
        report.observations["degree_minus_one"] = z == 1 or (z - 1).degree() == -1
        if dim is not None:
            points = fixed_points(z)
            report.observations["fixed_points_in_strip"] = all(-1e-9 <= p.real <= dim - 1 + 1e-9 for p in points)
        for key, value in report.observations.items():
            if not value:
                logger.warning(f"Report-only observation {key} does not hold for {z}")

    if report.failures:
        message = "; ".join(report.failures)
        logger.error(f"Invariant check failed for {z}: {message}")
        if strict:
            raise InvariantViolation(message)
    return report


def product_law_check(first: NilpotentLieAlgebra, second: NilpotentLieAlgebra,
                      config: Optional[EngineConfig] = None) -> bool:
    """ζ(g₁ ⊕ g₂) = ζ(g₁)·ζ(g₂) и ω(g₁ ⊕ g₂) = ω(g₁) + ω(g₂)."""
    config = config or EngineConfig()
    left = topological_rep_zeta(first, config)
    right = topological_rep_zeta(second, config)
    combined = topological_rep_zeta(direct_sum(first, second), config)
    holds = combined.zeta == left.zeta * right.zeta and combined.omega == left.omega + right.omega
    if not holds:
        logger.error(f"Product law fails for {first.name} + {second.name}: "
                     f"{combined.zeta} vs {left.zeta * right.zeta}")
    return holds


def eps_ratio(base: ZetaResult, extended: ZetaResult) -> Optional[object]:
    """ω(g[ε]) / ω(g) (наблюдается значение 3/2); None при ω(g) = 0."""
    if not base.omega:
        return None
    ratio = QQ.convert(extended.omega) / QQ.convert(base.omega)
    if ratio != QQ(3, 2):
        logger.warning(f"omega ratio for {extended.name} is {format_rational(ratio)}, not 3/2")
    return ratio


if __name__ == '__main__':
    from src.data_ingestion.preset_catalog import preset

    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(name)s - %(message)s')
    for example in ("L_{3,2}", "L_{4,3}", "L_{6,26}"):
        result = topological_rep_zeta(preset(example))
        print(f"{example}: {result.zeta}, omega = {format_rational(result.omega)}")
