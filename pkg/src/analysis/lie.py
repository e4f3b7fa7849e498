"""
Нильпотентные алгебры Ли над Q: проверка тождеств, адаптированный базис,
матрицы коммутаторов R(Y) и S(Y), множества пфаффианов и миноров,
конструкторы (прямая сумма, двойственные числа, абелева алгебра).
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from src.core.exact import pfaffian, rank_over_function_field
from src.core.exceptions import AlgebraValidationError
from src.core.laurent import LaurentPoly, grlex_key, make_monic, polynomial_ring

logger = logging.getLogger(__name__)

# {(i, j): {k: c}} при i < j, индексы с нуля
BracketTable = Dict[Tuple[int, int], Dict[int, object]]


def _clean_brackets(dim: int, brackets) -> BracketTable:
    table: BracketTable = {}
    for (i, j), image in brackets.items():
        if not (0 <= i < dim and 0 <= j < dim):
            raise AlgebraValidationError(f"Индексы [{i + 1},{j + 1}] вне диапазона 1..{dim}", "range", (i + 1, j + 1))
        if i == j:
            if any(QQ.convert(c) for c in image.values()):
                raise AlgebraValidationError(f"[e{i + 1},e{i + 1}] ≠ 0", "antisymmetry", (i + 1, i + 1))
            continue
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        row = table.setdefault((i, j), {})
        for k, c in image.items():
            if not 0 <= k < dim:
                raise AlgebraValidationError(f"Индекс e{k + 1} вне диапазона 1..{dim}", "range", (i + 1, j + 1, k + 1))
            value = row.get(k, QQ(0)) + sign * QQ.convert(c)
            if value:
                row[k] = value
            else:
                row.pop(k, None)
        if not row:
            del table[(i, j)]
    return table


@dataclass(frozen=True)
class NilpotentLieAlgebra:
    """
    Алгебра Ли над Q, заданная структурными константами
    [e_i, e_j] = Σ_k c_{ij}^k e_k (хранятся только пары i < j).

    Args:
        dim: Размерность h.
        brackets: Словарь {(i, j): {k: c}} с индексами от нуля.
        name: Необязательное имя.
    """
    dim: int
    brackets: BracketTable = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError(f"Размерность должна быть неотрицательной: {self.dim}")
        object.__setattr__(self, "brackets", _clean_brackets(self.dim, self.brackets))

    @classmethod
    def from_table(cls, table: Sequence[Sequence[Sequence]], name: str = "") -> "NilpotentLieAlgebra":
        """
        Строит алгебру по полной таблице c[i][j][k].

        Raises:
            AlgebraValidationError: если таблица не антисимметрична.
        """
        dim = len(table)
        brackets = {}
        for i in range(dim):
            for k in range(dim):
                if QQ.convert(table[i][i][k]):
                    raise AlgebraValidationError(f"[e{i + 1},e{i + 1}] ≠ 0", "antisymmetry", (i + 1, i + 1, k + 1))
            for j in range(i + 1, dim):
                for k in range(dim):
                    if QQ.convert(table[i][j][k]) != -QQ.convert(table[j][i][k]):
                        raise AlgebraValidationError(
                            f"c[{i + 1}][{j + 1}][{k + 1}] ≠ -c[{j + 1}][{i + 1}][{k + 1}]",
                            "antisymmetry", (i + 1, j + 1, k + 1))
                image = {k: table[i][j][k] for k in range(dim) if QQ.convert(table[i][j][k])}
                if image:
                    brackets[(i, j)] = image
        return cls(dim, brackets, name)

    def structure_constant(self, i: int, j: int, k: int):
        if i == j:
            return QQ(0)
        if i < j:
            return self.brackets.get((i, j), {}).get(k, QQ(0))
        return -self.brackets.get((j, i), {}).get(k, QQ(0))

    def bracket(self, u: Sequence, v: Sequence) -> List:
        """Скобка двух векторов, заданных координатами в базисе e."""
        result = [QQ(0)] * self.dim
        for (i, j), image in self.brackets.items():
            coeff = QQ.convert(u[i]) * QQ.convert(v[j]) - QQ.convert(u[j]) * QQ.convert(v[i])
            if coeff:
                for k, c in image.items():
                    result[k] += coeff * c
        return result

    def basis_vector(self, i: int) -> List:
        return [QQ(1) if k == i else QQ(0) for k in range(self.dim)]

    @property
    def is_abelian(self) -> bool:
        return not self.brackets

    def lower_central_series(self, limit: Optional[int] = None) -> List[List[List]]:
        """
        Нижний центральный ряд g = g^1 ⊃ g^2 ⊃ ... до нуля или до стабилизации.

        Returns:
            Список базисов (строки в ступенчатом виде) членов ряда.
        """
        current = _row_basis([self.basis_vector(i) for i in range(self.dim)], self.dim)
        series = [current]
        limit = limit or self.dim + 1
        for _ in range(limit):
            if not current:
                break
            products = [self.bracket(self.basis_vector(i), v) for i in range(self.dim) for v in current]
            following = _row_basis(products, self.dim)
            series.append(following)
            if len(following) == len(current):
                break
            current = following
        return series

    def derived_subalgebra(self) -> List[List]:
        products = [self.bracket(self.basis_vector(i), self.basis_vector(j))
                    for i, j in itertools.combinations(range(self.dim), 2)]
        return _row_basis(products, self.dim)

    @property
    def derived_dim(self) -> int:
        return len(self.derived_subalgebra())

    def nilpotency_class(self) -> int:
        """Ступень нильпотентности (0 для нулевой алгебры, 1 для абелевой)."""
        series = self.lower_central_series()
        if series[-1]:
            raise AlgebraValidationError(f"Алгебра {self.name or ''} не нильпотентна", "nilpotency")
        return len(series) - 1 if self.dim else 0

    def canonical_key(self) -> str:
        """Каноническая строка структурных констант (для ключей кэша)."""
        parts = [f"{i + 1},{j + 1}:" + ";".join(f"{k + 1}={image[k]}" for k in sorted(image))
                 for (i, j), image in sorted(self.brackets.items())]
        return f"dim={self.dim}|" + "|".join(parts)


def _row_basis(vectors: Sequence[Sequence], dim: int) -> List[List]:
    """Ненулевые строки приведённого ступенчатого вида (базис линейной оболочки)."""
    rows = [[QQ.convert(x) for x in v] for v in vectors if any(v)]
    if not rows or dim == 0:
        return []
    reduced, pivots = DomainMatrix(rows, (len(rows), dim), QQ).rref()
    entries = reduced.to_list()
    return [list(entries[r]) for r in range(len(pivots))]


def validate(algebra: NilpotentLieAlgebra) -> NilpotentLieAlgebra:
    """
    Проверяет нильпотентность и тождество Якоби (антисимметричность
    обеспечивается самим представлением структурных констант).

    Returns:
        Ту же алгебру, если все тождества выполнены.

    Raises:
        AlgebraValidationError: с указанием тождества и тройки индексов.
    """
    series = algebra.lower_central_series()
    if series[-1]:
        raise AlgebraValidationError(
            f"Нижний центральный ряд стабилизируется на размерности {len(series[-1])}", "nilpotency",
            tuple(len(term) for term in series))
    h = algebra.dim
    for i, j, k in itertools.combinations(range(h), 3):
        ei, ej, ek = algebra.basis_vector(i), algebra.basis_vector(j), algebra.basis_vector(k)
        jacobi = [a + b + c for a, b, c in zip(
            algebra.bracket(algebra.bracket(ei, ej), ek),
            algebra.bracket(algebra.bracket(ej, ek), ei),
            algebra.bracket(algebra.bracket(ek, ei), ej))]
        if any(jacobi):
            raise AlgebraValidationError(
                f"Тождество Якоби нарушено для (e{i + 1}, e{j + 1}, e{k + 1})", "jacobi", (i + 1, j + 1, k + 1))
    return algebra


@dataclass(frozen=True)
class AdaptedPresentation:
    """
    Базис, в котором производная подалгебра натянута на последние n векторов,
    и матрицы R(Y) (h×h) и S(Y) (h×n) линейных форм от Y_1..Y_n.
    """
    algebra: NilpotentLieAlgebra
    base_change: Tuple[Tuple, ...]
    derived_dim: int
    R: Tuple[Tuple, ...]
    S: Tuple[Tuple, ...]
    u: int
    v: int

    @property
    def poly_ring(self):
        return polynomial_ring(self.derived_dim)


def adapted_presentation(algebra: NilpotentLieAlgebra) -> AdaptedPresentation:
    """
    Строит адаптированный базис и матрицы R(Y), S(Y).

    Raises:
        ValueError: для абелевой алгебры (дзета-функция тождественно равна 1).
    """
    if algebra.is_abelian:
        raise ValueError("Адаптированное представление не определено для абелевой алгебры")
    h = algebra.dim
    derived = algebra.derived_subalgebra()
    n = len(derived)
    pivots = [next(c for c, x in enumerate(row) if x) for row in derived]
    complement = [algebra.basis_vector(c) for c in range(h) if c not in pivots]
    basis = complement + derived
    poly_ring = polynomial_ring(n)
    gens = poly_ring.gens

    def coordinates(vector):
        # строки derived в приведённом ступенчатом виде: координата = значение в опорном столбце
        return [vector[p] for p in pivots]

    def linear_form(vector):
        return sum((poly_ring(c) * y for c, y in zip(coordinates(vector), gens)), poly_ring.zero)

    R = [[linear_form(algebra.bracket(basis[i], basis[j])) for j in range(h)] for i in range(h)]
    S = [[linear_form(algebra.bracket(basis[i], derived[j])) for j in range(n)] for i in range(h)]
    rank_r = rank_over_function_field(R, n)
    rank_s = rank_over_function_field(S, n) if n else 0
    if rank_r % 2:
        raise ArithmeticError(f"Ранг кососимметричной матрицы нечётен: {rank_r}")
    presentation = AdaptedPresentation(
        algebra=algebra,
        base_change=tuple(tuple(row) for row in basis),
        derived_dim=n,
        R=tuple(tuple(row) for row in R),
        S=tuple(tuple(row) for row in S),
        u=rank_r // 2,
        v=rank_s,
    )
    logger.debug(f"Adapted presentation of {algebra.name or 'algebra'}: n={n}, u={presentation.u}, v={presentation.v}")
    return presentation


def _to_laurent(element, nvars: int) -> LaurentPoly:
    if not hasattr(element, "items"):
        return LaurentPoly.constant(nvars, element)
    return LaurentPoly(nvars, {tuple(m): c for m, c in element.items()})


def _dedup(polys: Sequence[LaurentPoly]) -> List[LaurentPoly]:
    """Удаляет нули и совпадения с точностью до скаляра; порядок канонический."""
    unique = {}
    for f in polys:
        if f.is_zero():
            continue
        unique.setdefault(make_monic(f), f)
    return sorted(unique.values(), key=lambda f: [grlex_key(e) for e, _ in f.terms_in_order()])


def pfaffian_sets(presentation: AdaptedPresentation) -> List[List[LaurentPoly]]:
    """
    F_0 = {1}, F_i - ненулевые пфаффианы главных 2i×2i подматриц R(Y), i ≤ u.
    """
    n = presentation.derived_dim
    h = len(presentation.R)
    sets = [[LaurentPoly.constant(n, 1)]]
    for i in range(1, presentation.u + 1):
        values = []
        for rows in itertools.combinations(range(h), 2 * i):
            sub = [[presentation.R[a][b] for b in rows] for a in rows]
            values.append(_to_laurent(pfaffian(sub), n))
        sets.append(_dedup(values))
    return sets


def minor_sets(presentation: AdaptedPresentation) -> List[List[LaurentPoly]]:
    """
    G_0 = {1}, G_j - ненулевые j×j миноры S(Y), j ≤ v.
    """
    n = presentation.derived_dim
    h = len(presentation.S)
    domain = presentation.poly_ring.to_domain()
    sets = [[LaurentPoly.constant(n, 1)]]
    for j in range(1, presentation.v + 1):
        values = []
        for rows in itertools.combinations(range(h), j):
            for cols in itertools.combinations(range(n), j):
                sub = [[presentation.S[a][b] for b in cols] for a in rows]
                values.append(_to_laurent(DomainMatrix(sub, (j, j), domain).det(), n))
        sets.append(_dedup(values))
    return sets


# --- конструкторы ---

def abelian(dim: int) -> NilpotentLieAlgebra:
    return NilpotentLieAlgebra(dim, {}, f"abelian:{dim}")


def direct_sum(first: NilpotentLieAlgebra, second: NilpotentLieAlgebra) -> NilpotentLieAlgebra:
    """Прямая сумма: блочные структурные константы, базис второй алгебры сдвинут."""
    offset = first.dim
    brackets = {key: dict(image) for key, image in first.brackets.items()}
    for (i, j), image in second.brackets.items():
        brackets[(i + offset, j + offset)] = {k + offset: c for k, c in image.items()}
    name = f"{first.name or 'g'}+{second.name or 'g'}"
    return NilpotentLieAlgebra(first.dim + second.dim, brackets, name)


def dual_number_extension(algebra: NilpotentLieAlgebra) -> NilpotentLieAlgebra:
    """
    g[ε] = g ⊗ Q[ε]/(ε²) как алгебра Ли над Q размерности 2h с базисом
    e_1..e_h, εe_1..εe_h.
    """
    h = algebra.dim
    brackets = {}
    for (i, j), image in algebra.brackets.items():
        brackets[(i, j)] = dict(image)
        shifted = {k + h: c for k, c in image.items()}
        brackets[(i, j + h)] = shifted
        # [εe_i, e_j] = ε[e_i, e_j] = -[e_j, εe_i]
        brackets[(j, i + h)] = {k: -c for k, c in shifted.items()}
    return NilpotentLieAlgebra(2 * h, brackets, f"{algebra.name or 'g'}[eps]")


def change_basis(algebra: NilpotentLieAlgebra, basis: Sequence[Sequence]) -> NilpotentLieAlgebra:
    """
    Та же алгебра в новом базисе b_i = Σ_k basis[i][k]·e_k.

    Датум (и его вес) зависит от выбора базиса, дзета-функция - нет.

    Raises:
        ValueError: если basis не задаёт базис.
    """
    h = algebra.dim
    rows = [[QQ.convert(x) for x in row] for row in basis]
    if len(rows) != h or any(len(row) != h for row in rows):
        raise ValueError(f"Ожидается матрица {h}×{h}")
    matrix = DomainMatrix(rows, (h, h), QQ)
    if h and matrix.rank() < h:
        raise ValueError("Векторы не образуют базис")
    inverse = matrix.inv().to_list() if h else []
    brackets = {}
    for i, j in itertools.combinations(range(h), 2):
        image = algebra.bracket(rows[i], rows[j])
        coordinates = [sum((image[k] * inverse[k][m] for k in range(h)), QQ(0)) for m in range(h)]
        nonzero = {m: c for m, c in enumerate(coordinates) if c}
        if nonzero:
            brackets[(i, j)] = nonzero
    return NilpotentLieAlgebra(h, brackets, algebra.name)
