"""
Точная рациональная полиэдральная геометрия: конусы, полуоткрытые конусы,
многогранники, веера, триангуляции, индексы и смешанные объёмы.

Векторы хранятся как кортежи целых чисел Python. Переход между H- и
V-представлениями выполняет cddlib (pycddlib) в точной рациональной арифметике.
"""
import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, List, Optional, Sequence, Tuple

import cdd
from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from src.core.exact import int_matrix, integer_rank, primitive_vector, smith_normal_form

logger = logging.getLogger(__name__)

Vector = Tuple[int, ...]

RELATIONS = ("ge", "gt", "eq", "le", "lt")


def dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _neg(v: Sequence[int]) -> Vector:
    return tuple(-x for x in v)


def _unit(dim: int, index: int) -> Vector:
    return tuple(1 if i == index else 0 for i in range(dim))


def grlex_key(exponent: Sequence[int]) -> tuple:
    return (sum(exponent), tuple(exponent))


def _integer_vector(values: Iterable) -> Vector:
    """Примитивный целый вектор, пропорциональный рациональному."""
    values = list(values)
    scale = 1
    for v in values:
        scale = math.lcm(scale, int(v.denominator))
    return primitive_vector(int(v.numerator) * (scale // int(v.denominator)) for v in values)


def _qq_matrix(rows: Sequence[Sequence[int]], dim: int) -> DomainMatrix:
    return DomainMatrix([[QQ(int(x)) for x in row] for row in rows], (len(rows), dim), QQ)


def _canonical_basis(vectors: Sequence[Vector], dim: int) -> List[Vector]:
    """Базис линейной оболочки: примитивные строки приведённой ступенчатой формы."""
    if not vectors:
        return []
    reduced, pivots = _qq_matrix(vectors, dim).rref()
    return sorted(_integer_vector(row) for row in reduced.to_list()[:len(pivots)])


def _project_out(rays: Sequence[Vector], basis: Sequence[Vector], dim: int) -> List[Vector]:
    """Ортогональные проекции лучей на дополнение к span(basis), без нулевых и повторов."""
    if not basis:
        return sorted(set(rays))
    span = _qq_matrix(basis, dim)
    gram_inverse = span.matmul(span.transpose()).inv()
    projected = set()
    for r in rays:
        column = _qq_matrix([[x] for x in r], 1)
        residual = column - span.transpose().matmul(gram_inverse.matmul(span.matmul(column)))
        vector = _integer_vector(entry for [entry] in residual.to_list())
        if any(vector):
            projected.add(vector)
    return sorted(projected)


def double_description(dim: int, equations: Sequence[Sequence[int]] = (),
                       inequalities: Sequence[Sequence[int]] = ()) -> tuple:
    """
    Переводит H-представление {x: E x = 0, A x ≥ 0} в V-представление.

    Перечисление выполняет cddlib в точной рациональной арифметике
    (number_type="fraction"); результат приводится к каноническому виду.

    Returns:
        (lineality, rays): базис пространства линейности (примитивные строки
        приведённой ступенчатой формы) и примитивные экстремальные лучи,
        ортогональные пространству линейности; оба списка отсортированы.
    """
    equations = [tuple(int(x) for x in e) for e in equations]
    inequalities = [tuple(int(x) for x in a) for a in inequalities]
    for row in equations + inequalities:
        if len(row) != dim:
            raise ValueError(f"Ограничение {row} не соответствует размерности {dim}")
    if dim == 0:
        return [], []
    if not any(any(row) for row in equations + inequalities):
        return sorted(_unit(dim, i) for i in range(dim)), []

    # cddlib хранит строку [b, a] как неравенство b + a·x ≥ 0
    if inequalities:
        matrix = cdd.Matrix([(0,) + a for a in inequalities], number_type="fraction")
        if equations:
            matrix.extend([(0,) + e for e in equations], linear=True)
    else:
        matrix = cdd.Matrix([(0,) + e for e in equations], linear=True, number_type="fraction")
    matrix.rep_type = cdd.RepType.INEQUALITY
    generators = cdd.Polyhedron(matrix).get_generators()

    lineality, rays = [], []
    for i in range(generators.row_size):
        row = generators[i]
        if row[0] != 0:
            # вершина: для конуса это начало координат
            continue
        vector = _integer_vector(row[1:])
        if not any(vector):
            continue
        if i in generators.lin_set:
            lineality.append(vector)
        else:
            rays.append(vector)
    lineality = _canonical_basis(lineality, dim)
    return lineality, _project_out(rays, lineality, dim)


class Cone:
    """
    Рациональный полиэдральный конус в R^dim.

    Хранит одно из представлений (H или V) и лениво вычисляет другое.
    Используйте фабрики from_inequalities и from_generators.
    """

    def __init__(self, dim: int, equations=(), inequalities=(), rays=None, lineality=None):
        self.ambient_dim = dim
        self._equations = [tuple(e) for e in equations]
        self._inequalities = [tuple(a) for a in inequalities]
        self._has_hrep = rays is None
        self._generators = None if rays is None else ([tuple(r) for r in rays], [tuple(l) for l in (lineality or ())])

    @classmethod
    def from_inequalities(cls, dim: int, inequalities=(), equations=()) -> "Cone":
        return cls(dim, equations=equations, inequalities=inequalities)

    @classmethod
    def from_generators(cls, dim: int, rays=(), lineality=()) -> "Cone":
        return cls(dim, rays=list(rays), lineality=list(lineality))

    @classmethod
    def orthant(cls, dim: int) -> "Cone":
        return cls.from_inequalities(dim, [_unit(dim, i) for i in range(dim)])

    @cached_property
    def _hrep(self) -> tuple:
        if self._has_hrep:
            return self._equations, self._inequalities
        rays, lineality = self._generators
        dual_lineality, dual_rays = double_description(self.ambient_dim, lineality, rays)
        return dual_lineality, dual_rays

    @cached_property
    def _vrep(self) -> tuple:
        equations, inequalities = self._hrep
        return double_description(self.ambient_dim, equations, inequalities)

    @property
    def rays(self) -> List[Vector]:
        """Примитивные экстремальные лучи (по модулю линейности)."""
        return self._vrep[1]

    @property
    def lineality(self) -> List[Vector]:
        return self._vrep[0]

    @cached_property
    def _facet_rep(self) -> tuple:
        return double_description(self.ambient_dim, self.lineality, self.rays)

    @property
    def facets(self) -> List[Vector]:
        """Неприводимые внутренние нормали фасет (по модулю уравнений)."""
        return self._facet_rep[1]

    @property
    def equations(self) -> List[Vector]:
        """Базис уравнений линейной оболочки конуса."""
        return self._facet_rep[0]

    @cached_property
    def dim(self) -> int:
        return integer_rank(list(self.rays) + list(self.lineality))

    @property
    def is_pointed(self) -> bool:
        return not self.lineality

    def contains(self, point: Sequence) -> bool:
        equations, inequalities = self._hrep
        return all(dot(e, point) == 0 for e in equations) and all(dot(a, point) >= 0 for a in inequalities)

    def relative_interior_point(self) -> Vector:
        """Сумма лучей: точка относительной внутренности (ноль для подпространства)."""
        point = [0] * self.ambient_dim
        for r in self.rays:
            point = [x + y for x, y in zip(point, r)]
        return tuple(point)

    def intersect(self, other: "Cone") -> "Cone":
        e1, a1 = self._hrep
        e2, a2 = other._hrep
        return Cone.from_inequalities(self.ambient_dim, list(a1) + list(a2), list(e1) + list(e2))

    def __eq__(self, other):
        if not isinstance(other, Cone) or other.ambient_dim != self.ambient_dim:
            return NotImplemented
        if sorted(self.rays) != sorted(other.rays):
            return False
        span = integer_rank(self.lineality)
        return span == integer_rank(other.lineality) == integer_rank(list(self.lineality) + list(other.lineality))

    def __hash__(self):
        return hash((self.ambient_dim, tuple(self.rays), len(self.lineality)))

    def __repr__(self):
        return f"Cone(dim={self.ambient_dim}, rays={self.rays}, lineality={self.lineality})"


def dual_cone(cone: Cone) -> Cone:
    """Двойственный конус C^* = {y: ⟨x, y⟩ ≥ 0 для всех x ∈ C}."""
    return Cone.from_inequalities(cone.ambient_dim, inequalities=cone.rays, equations=cone.lineality)


@dataclass(frozen=True)
class HalfOpenCone:
    """
    Полуоткрытый конус {x: E x = 0, A x ≥ 0, B x > 0}.

    Пустой полуоткрытый конус допустим и имеет размерность -1.
    """
    ambient_dim: int
    equations: Tuple[Vector, ...] = ()
    inequalities: Tuple[Vector, ...] = ()
    strict: Tuple[Vector, ...] = ()

    def __post_init__(self):
        for name in ("equations", "inequalities", "strict"):
            rows = tuple(tuple(int(x) for x in row) for row in getattr(self, name))
            if any(len(row) != self.ambient_dim for row in rows):
                raise ValueError(f"Неверная длина строки в {name}: ожидается {self.ambient_dim}")
            object.__setattr__(self, name, rows)

    @classmethod
    def from_cone(cls, cone: Cone) -> "HalfOpenCone":
        equations, inequalities = cone._hrep
        return cls(cone.ambient_dim, tuple(equations), tuple(inequalities))

    @cached_property
    def closure(self) -> Cone:
        return Cone.from_inequalities(self.ambient_dim, self.inequalities + self.strict, self.equations)

    @property
    def open_facets(self) -> Tuple[Vector, ...]:
        return self.strict

    def is_empty(self) -> bool:
        rays = self.closure.rays
        return any(all(dot(b, r) <= 0 for r in rays) for b in self.strict)

    @property
    def dim(self) -> int:
        return -1 if self.is_empty() else self.closure.dim

    def contains(self, point: Sequence) -> bool:
        return (all(dot(e, point) == 0 for e in self.equations)
                and all(dot(a, point) >= 0 for a in self.inequalities)
                and all(dot(b, point) > 0 for b in self.strict))

    def interior_point(self) -> Vector:
        """
        Целая точка относительной внутренности замыкания.

        Raises:
            ValueError: если конус пуст.
        """
        if self.is_empty():
            raise ValueError("Пустой полуоткрытый конус не имеет внутренних точек")
        return self.closure.relative_interior_point()

    def with_constraint(self, vector: Sequence[int], relation: str) -> "HalfOpenCone":
        """
        Пересечение с полупространством или гиперплоскостью ⟨vector, x⟩ relation 0.

        Args:
            relation: одно из "ge", "gt", "eq", "le", "lt".
        """
        vector = tuple(int(x) for x in vector)
        if relation == "eq":
            return HalfOpenCone(self.ambient_dim, self.equations + (vector,), self.inequalities, self.strict)
        if relation in ("le", "lt"):
            vector, relation = _neg(vector), {"le": "ge", "lt": "gt"}[relation]
        if relation == "ge":
            return HalfOpenCone(self.ambient_dim, self.equations, self.inequalities + (vector,), self.strict)
        if relation == "gt":
            return HalfOpenCone(self.ambient_dim, self.equations, self.inequalities, self.strict + (vector,))
        raise ValueError(f"Неизвестное отношение: {relation}")

    def sign_on(self, vector: Sequence[int]) -> Optional[int]:
        """Знак ⟨vector, x⟩, если он постоянен на непустом конусе, иначе None."""
        if self.with_constraint(vector, "le").is_empty():
            return 1
        if self.with_constraint(vector, "ge").is_empty():
            return -1
        if self.with_constraint(vector, "gt").is_empty() and self.with_constraint(vector, "lt").is_empty():
            return 0
        return None

    def split(self, vector: Sequence[int]) -> List["HalfOpenCone"]:
        """Разбиение на непустые части {⟨v,x⟩ > 0}, {= 0}, {< 0}."""
        parts = [self.with_constraint(vector, rel) for rel in ("gt", "eq", "lt")]
        return [part for part in parts if not part.is_empty()]

    def intersect(self, other: "HalfOpenCone") -> "HalfOpenCone":
        return HalfOpenCone(self.ambient_dim, self.equations + other.equations,
                            self.inequalities + other.inequalities, self.strict + other.strict)

    def embed(self, extra: int) -> "HalfOpenCone":
        """Вложение в R^{dim+extra}: новые координаты не ограничены."""
        pad = (0,) * extra
        return HalfOpenCone(self.ambient_dim + extra,
                            tuple(r + pad for r in self.equations),
                            tuple(r + pad for r in self.inequalities),
                            tuple(r + pad for r in self.strict))

    def describe(self) -> str:
        parts = [f"{list(e)}·x = 0" for e in self.equations]
        parts += [f"{list(a)}·x ≥ 0" for a in self.inequalities]
        parts += [f"{list(b)}·x > 0" for b in self.strict]
        return "{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class Polytope:
    """Выпуклый решётчатый многогранник, заданный своими вершинами."""
    ambient_dim: int
    vertices: Tuple[Vector, ...]

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]], dim: Optional[int] = None) -> "Polytope":
        points = sorted({tuple(int(x) for x in p) for p in points})
        if not points:
            raise ValueError("Многогранник должен содержать хотя бы одну точку")
        dim = len(points[0]) if dim is None else dim
        if len(points) == 1:
            return cls(dim, tuple(points))
        cone = Cone.from_generators(dim + 1, [p + (1,) for p in points])
        vertices = sorted(tuple(r[:-1]) for r in cone.rays)
        return cls(dim, tuple(vertices))

    @cached_property
    def dimension(self) -> int:
        base = self.vertices[0]
        return integer_rank([tuple(a - b for a, b in zip(v, base)) for v in self.vertices[1:]])

    def minkowski_sum(self, other: "Polytope") -> "Polytope":
        return Polytope.from_points(
            (tuple(a + b for a, b in zip(u, v)) for u in self.vertices for v in other.vertices),
            self.ambient_dim)

    def scaled(self, factor: int) -> "Polytope":
        return Polytope(self.ambient_dim, tuple(tuple(factor * x for x in v) for v in self.vertices))

    def min_value(self, omega: Sequence) -> object:
        return min(dot(v, omega) for v in self.vertices)

    def face(self, omega: Sequence) -> "Polytope":
        """Грань, на которой ⟨·, ω⟩ минимально."""
        minimum = self.min_value(omega)
        return Polytope(self.ambient_dim, tuple(v for v in self.vertices if dot(v, omega) == minimum))


@dataclass
class Fan:
    """Конечный набор попарно непересекающихся полуоткрытых конусов."""
    ambient_dim: int
    cells: List[HalfOpenCone] = field(default_factory=list)

    def locate(self, point: Sequence[int]) -> List[int]:
        """Номера ячеек, содержащих точку (для разбиения - не более одной)."""
        return [i for i, cell in enumerate(self.cells) if cell.contains(point)]

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)


def partition_boundary_orthant(n: int) -> Fan:
    """
    Разбиение границы ∂R^n_{≥0} на 2^n - 1 полуоткрытых частей
    {ω_i = 0 для i ∈ Z, ω_j > 0 для j ∉ Z}, Z ≠ ∅.
    """
    cells = []
    for size in range(1, n + 1):
        for zeros in itertools.combinations(range(n), size):
            cells.append(HalfOpenCone(
                n,
                equations=tuple(_unit(n, i) for i in zeros),
                strict=tuple(_unit(n, j) for j in range(n) if j not in zeros)))
    return Fan(n, cells)


def refine_by_normal_fans(piece: HalfOpenCone, polytopes: Sequence[Polytope]) -> List[tuple]:
    """
    Разбивает полуоткрытый конус так, что на каждой части у каждого
    многогранника фиксирована минимизирующая вершина.

    Для вершин a < b (grlex) ничья ⟨a-b, ω⟩ = 0 отдаётся вершине a.

    Returns:
        Список (ячейка, кортеж выбранных вершин по одному на многогранник).
    """
    cells = [] if piece.is_empty() else [piece]
    for polytope in polytopes:
        vertices = sorted(polytope.vertices, key=grlex_key)
        for a, b in itertools.combinations(vertices, 2):
            gamma = tuple(x - y for x, y in zip(a, b))
            refined = []
            for cell in cells:
                low = cell.with_constraint(gamma, "le")
                high = cell.with_constraint(gamma, "gt")
                refined.extend(part for part in (low, high) if not part.is_empty())
            cells = refined
    result = []
    for cell in cells:
        point = cell.interior_point()
        chosen = tuple(_chosen_vertex(p, point) for p in polytopes)
        result.append((cell, chosen))
    logger.debug(f"Refined piece into {len(result)} cells over {len(polytopes)} polytopes")
    return result


def _chosen_vertex(polytope: Polytope, omega: Sequence[int]) -> Vector:
    vertices = sorted(polytope.vertices, key=grlex_key)
    return min(vertices, key=lambda v: dot(v, omega))


def _pulling(rays: List[Vector], facets: List[Vector], dim: int) -> List[tuple]:
    if len(rays) == dim:
        return [tuple(rays)]
    apex = rays[0]
    simplices = []
    seen = set()
    for eta in facets:
        if dot(eta, apex) <= 0:
            continue
        face = [r for r in rays if dot(eta, r) == 0]
        key = frozenset(face)
        if key in seen or integer_rank(face) != dim - 1:
            continue
        seen.add(key)
        for simplex in _pulling(face, facets, dim - 1):
            simplices.append((apex,) + simplex)
    return simplices


def triangulate_cone(cone: Cone, seed: int = 0) -> List[tuple]:
    """
    Притягивающая (pulling) триангуляция острого конуса без новых лучей.
    seed задаёт циклический сдвиг порядка притягиваемых лучей.

    Returns:
        Список симплициальных конусов, каждый - кортеж лучей.
    """
    if not cone.is_pointed:
        raise ValueError("Триангуляция определена только для острых конусов")
    rays = sorted(cone.rays)
    if not rays:
        return [()]
    shift = seed % len(rays)
    rays = rays[shift:] + rays[:shift]
    return _pulling(rays, list(cone.facets), cone.dim)


def triangulate_halfopen(cone: HalfOpenCone, seed: int = 0) -> List[HalfOpenCone]:
    """
    Разбиение полуоткрытого конуса на попарно непересекающиеся симплициальные
    полуоткрытые конусы.

    Внутренняя фасета симплекса с внутренней нормалью η открыта, если
    ⟨η, v⟩ < 0 для общего вектора v внутри конуса.

    Args:
        seed: Выбор общего вектора; при разных seed разбиения разные,
            но их объединение то же самое.
    """
    if cone.is_empty():
        return []
    closure = cone.closure
    simplices = triangulate_cone(closure, seed)
    if len(simplices) == 1:
        return [cone]
    rays = sorted(closure.rays)
    simplex_cones = [Cone.from_generators(cone.ambient_dim, simplex) for simplex in simplices]
    for attempt in itertools.count():
        base = 2 + seed + attempt
        vector = [0] * cone.ambient_dim
        for i, r in enumerate(rays):
            weight = base ** i
            vector = [x + weight * y for x, y in zip(vector, r)]
        if all(dot(eta, vector) != 0 for sc in simplex_cones for eta in sc.facets):
            break
        if attempt > 64:
            raise RuntimeError("Не удалось подобрать общий вектор для триангуляции")
    pieces = []
    for sc in simplex_cones:
        closed = tuple(eta for eta in sc.facets if dot(eta, vector) > 0)
        opened = tuple(eta for eta in sc.facets if dot(eta, vector) < 0)
        piece = HalfOpenCone(cone.ambient_dim, tuple(sc.equations), closed, opened + cone.strict)
        if not piece.is_empty():
            pieces.append(piece)
    return pieces


def cone_index(rays: Sequence[Sequence[int]]) -> int:
    """
    Индекс решётки, порождённой примитивными лучами симплициального конуса,
    в насыщении Z^n ∩ span.

    Raises:
        ValueError: если лучи линейно зависимы.
    """
    rays = [tuple(r) for r in rays]
    if not rays:
        return 1
    diag, _, _ = smith_normal_form(rays)
    nonzero = [d for d in diag if d]
    if len(nonzero) < len(rays):
        raise ValueError(f"Лучи {rays} линейно зависимы")
    return math.prod(nonzero)


def _determinant(rows: Sequence[Sequence[int]]) -> int:
    return int(DomainMatrix([[ZZ(int(x)) for x in r] for r in rows], (len(rows), len(rows)), ZZ).det())


def _lattice_coordinates(polytope: Polytope) -> List[Vector]:
    """Координаты вершин в аффинной решётке многогранника (полная размерность)."""
    base = polytope.vertices[0]
    diffs = [tuple(a - b for a, b in zip(v, base)) for v in polytope.vertices]
    k = polytope.dimension
    _, _, right = smith_normal_form([d for d in diffs if any(d)])
    t = [[int(x) for x in row] for row in right.to_list()]
    coords = []
    for d in diffs:
        image = [sum(d[i] * t[i][j] for i in range(len(d))) for j in range(len(t[0]))]
        coords.append(tuple(image[:k]))
    return coords


def normalized_volume(polytope: Polytope) -> int:
    """
    Нормализованный объём (d! · vol) в аффинной решётке многогранника,
    где d - его размерность. Для точки равен 1.
    """
    k = polytope.dimension
    if k == 0:
        return 1
    coords = _lattice_coordinates(polytope)
    lifted = Cone.from_generators(k + 1, [c + (1,) for c in coords])
    return sum(abs(_determinant(simplex)) for simplex in triangulate_cone(lifted))


def _ambient_volume(polytope: Polytope, dim: int) -> int:
    return normalized_volume(polytope) if polytope.dimension == dim else 0


def mixed_volume(polytopes: Sequence[Polytope]) -> int:
    """
    Смешанный объём d многогранников в R^d (нормирован так, что
    MV(P, ..., P) = normalized_volume(P) для полномерного P).
    """
    d = len(polytopes)
    if d == 0:
        return 1
    if any(p.ambient_dim != d for p in polytopes):
        raise ValueError("Число многогранников должно совпадать с размерностью пространства")
    total = 0
    for size in range(1, d + 1):
        for subset in itertools.combinations(range(d), size):
            summed = polytopes[subset[0]]
            for j in subset[1:]:
                summed = summed.minkowski_sum(polytopes[j])
            total += (-1) ** (d - size) * _ambient_volume(summed, d)
    value, remainder = divmod(total, math.factorial(d))
    if remainder:
        raise ArithmeticError(f"Смешанный объём не целый: {total}/{math.factorial(d)}")
    return value


def mixed_volumes(polytopes: Sequence[Polytope]) -> dict:
    """
    Таблица смешанных объёмов MV(P_1^{m_1}, ..., P_k^{m_k}) по всем
    кратностям m_i ≥ 0 с суммой d (d - размерность пространства).
    """
    if not polytopes:
        return {(): 1}
    d = polytopes[0].ambient_dim
    table = {}
    for multiplicities in compositions(d, len(polytopes), minimum=0):
        repeated = [p for p, m in zip(polytopes, multiplicities) for _ in range(m)]
        table[multiplicities] = mixed_volume(repeated)
    return table


def compositions(total: int, parts: int, minimum: int = 1):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(minimum, total - minimum * (parts - 1) + 1):
        for rest in compositions(total - first, parts - 1, minimum):
            yield (first,) + rest


def count_lattice_points(cone: HalfOpenCone, bound: int) -> int:
    """Число целых точек конуса в кубе [-bound, bound]^n (перебором)."""
    rng = range(-bound, bound + 1)
    return sum(1 for point in itertools.product(rng, repeat=cone.ambient_dim) if cone.contains(point))
