"""
Данные представлений (representation data): построение по алгебре Ли,
вес, балансировка, проверка регулярности, упрощение и расщепление-редукция.

Датум состоит из:
    - области: список полуоткрытых конусов в R^n (изначально - части границы ортанта);
    - множеств многочленов Лорана F̂ (каждое множество - идеал моноидной алгебры);
    - множителей ‖F̂_S ∪ y·F̂_T‖^{a·s+b} подынтегральной функции.
"""
import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import QQ

from src.analysis.lie import NilpotentLieAlgebra, adapted_presentation, minor_sets, pfaffian_sets
from src.core.exact import integer_rank
from src.core.exceptions import InvariantViolation, ReductionFailure
from src.core.idealtools import rank_drop_locus_empty, torus_zero_exists
from src.core.laurent import (
    Exponent,
    LaurentPoly,
    grlex_key,
    initial_form,
    is_integer_valued_on_cone,
    monomial_normalize,
    newton_polytope,
    underlying,
)
from src.core.polyhedra import HalfOpenCone, partition_boundary_orthant

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Factor:
    """
    Множитель ‖F̂_S ∪ y·F̂_T‖^{a·s+b}.

    Args:
        S_index: Номер множества без множителя y (или None).
        T_index: Номер множества, умножаемого на y (или None).
        exp: Пара (a, b) - показатель a·s + b.
    """
    S_index: Optional[int]
    T_index: Optional[int]
    exp: Tuple[int, int]

    def __post_init__(self):
        if self.S_index is None and self.T_index is None:
            raise ValueError("У множителя должно быть хотя бы одно множество")
        object.__setattr__(self, "exp", (int(self.exp[0]), int(self.exp[1])))

    @property
    def indices(self) -> Tuple[int, ...]:
        return tuple(i for i in (self.S_index, self.T_index) if i is not None)

    def reindexed(self, mapping: Dict[int, int]) -> "Factor":
        return Factor(
            None if self.S_index is None else mapping[self.S_index],
            None if self.T_index is None else mapping[self.T_index],
            self.exp,
        )


@dataclass(frozen=True)
class MonomialTwist:
    """Происхождение члена множества: f = c · X^{-twist} · underlying."""
    underlying: LaurentPoly
    twist: Exponent
    scalar: object


@dataclass(frozen=True)
class ReprDatum:
    """
    Датум представлений.

    Args:
        n: Число переменных.
        region: Полуоткрытые конусы, на которых определён датум.
        sets: Множества многочленов Лорана (без нулей).
        factors: Множители подынтегральной функции.
        depth: Сколько раз применялась редукция.
    """
    n: int
    region: Tuple[HalfOpenCone, ...]
    sets: Tuple[Tuple[LaurentPoly, ...], ...]
    factors: Tuple[Factor, ...]
    depth: int = 0

    def __post_init__(self):
        object.__setattr__(self, "region", tuple(self.region))
        object.__setattr__(self, "sets", tuple(tuple(members) for members in self.sets))
        object.__setattr__(self, "factors", tuple(self.factors))
        for index, members in enumerate(self.sets):
            for f in members:
                if f.is_zero():
                    raise ValueError(f"Множество {index} содержит нулевой многочлен")
                if f.nvars != self.n:
                    raise ValueError(f"Многочлен {f} не от {self.n} переменных")
        for factor in self.factors:
            for index in factor.indices:
                if not 0 <= index < len(self.sets):
                    raise ValueError(f"Множитель ссылается на несуществующее множество {index}")
                if not self.sets[index]:
                    raise ValueError(f"Множитель ссылается на пустое множество {index}")

    def referenced(self) -> List[int]:
        return sorted({i for factor in self.factors for i in factor.indices})

    def members(self) -> Iterator[Tuple[int, int, LaurentPoly]]:
        """(номер множества, позиция, многочлен) для множеств, на которые ссылаются множители."""
        for i in self.referenced():
            for position, f in enumerate(self.sets[i]):
                yield i, position, f

    def provenance(self, index: int) -> List[MonomialTwist]:
        result = []
        for f in self.sets[index]:
            g, twist = monomial_normalize(f)
            scalar = f.shift(twist).terms_in_order()[0][1]
            result.append(MonomialTwist(g, twist, scalar))
        return result

    def restrict(self, cell: HalfOpenCone) -> "ReprDatum":
        return replace(self, region=(cell,))

    def with_sets(self, sets) -> "ReprDatum":
        return replace(self, sets=tuple(tuple(members) for members in sets))

    def check_integrality(self):
        """
        Каждый член каждого множества целозначен на замыкании каждой части области.

        Raises:
            InvariantViolation: если условие нарушено.
        """
        for cell in self.region:
            for i, _, f in self.members():
                if not is_integer_valued_on_cone(f, cell):
                    raise InvariantViolation(f"Многочлен {f} множества {i} не целозначен на {cell.describe()}")

    def describe(self) -> str:
        sets = "; ".join(
            f"F{i}={{{', '.join(str(f) for f in self.sets[i])}}}" for i in self.referenced())
        region = " ∪ ".join(cell.describe() for cell in self.region)
        return f"depth={self.depth} region={region} {sets}"


@dataclass(frozen=True)
class BalancedPiece:
    """
    Ячейка, на которой начальная форма каждого члена постоянна.

    inits и phis индексированы так же, как sets датума: phis[i][k] - выбранная
    точка носителя начальной формы (наименьшая в порядке grlex).
    """
    cell: HalfOpenCone
    inits: Tuple[Tuple[LaurentPoly, ...], ...]
    phis: Tuple[Tuple[Exponent, ...], ...]
    face_dim: int
    _distinct: Tuple[LaurentPoly, ...] = field(default=(), compare=False, repr=False)

    def distinct_inits(self) -> Tuple[LaurentPoly, ...]:
        """Различные (с точностью до монома и скаляра) немономиальные начальные формы."""
        if self._distinct:
            return self._distinct
        seen = {}
        for members in self.inits:
            for init in members:
                if init.is_monomial():
                    continue
                g = underlying(init)
                seen.setdefault(g, None)
        distinct = tuple(seen)
        object.__setattr__(self, "_distinct", distinct)
        return distinct

    def describe(self) -> str:
        forms = ", ".join(str(g) for g in self.distinct_inits()) or "-"
        return f"cell={self.cell.describe()} dim={self.cell.dim} face_dim={self.face_dim} inits=[{forms}]"


# --- построение ---

def construct_datum(algebra: NilpotentLieAlgebra) -> ReprDatum:
    """
    Датум представлений по нильпотентной алгебре Ли.

    Множества: {1}, F_1..F_u, G_1..G_v. Множители:
        |y|^{s-n-1};
        ‖F_{i-1} y‖^{s} · ‖F_i ∪ F_{i-1} y‖^{-s}, i = 2..u;
        ‖G_{j-1} y‖ · ‖G_j ∪ G_{j-1} y‖^{-1}, j = 1..v.

    Raises:
        ValueError: для абелевой алгебры.
    """
    presentation = adapted_presentation(algebra)
    n = presentation.derived_dim
    pfaffians = pfaffian_sets(presentation)
    minors = minor_sets(presentation)
    u, v = presentation.u, presentation.v

    sets = [(LaurentPoly.constant(n, 1),)]
    f_index = {0: 0}
    for i in range(1, u + 1):
        f_index[i] = len(sets)
        sets.append(tuple(pfaffians[i]))
    g_index = {0: 0}
    for j in range(1, v + 1):
        g_index[j] = len(sets)
        sets.append(tuple(minors[j]))

    factors = [Factor(None, 0, (1, -n - 1))]
    for i in range(2, u + 1):
        factors.append(Factor(None, f_index[i - 1], (1, 0)))
        factors.append(Factor(f_index[i], f_index[i - 1], (-1, 0)))
    for j in range(1, v + 1):
        factors.append(Factor(None, g_index[j - 1], (0, 1)))
        factors.append(Factor(g_index[j], g_index[j - 1], (0, -1)))

    region = tuple(partition_boundary_orthant(n))
    datum = ReprDatum(n, region, tuple(sets), tuple(factors))
    logger.info(f"Constructed datum for {algebra.name or 'algebra'}: n={n}, u={u}, v={v}, "
                f"{len(sets)} sets, {len(factors)} factors, weight {weight(datum)}")
    return datum


def weight(datum: ReprDatum) -> int:
    """Σ(|supp f| - 1) по различным (с точностью до монома) многочленам всех множеств."""
    distinct = {underlying(f) for members in datum.sets for f in members}
    return sum(len(g) - 1 for g in distinct)


# --- балансировка ---

def _vertex_differences(f: LaurentPoly) -> List[Exponent]:
    vertices = sorted(newton_polytope(f).vertices, key=grlex_key)
    return [tuple(a - b for a, b in zip(x, y)) for x, y in itertools.combinations(vertices, 2)]


def _balanced_cells(cell: HalfOpenCone, polys: Sequence[LaurentPoly]) -> List[HalfOpenCone]:
    cells = [] if cell.is_empty() else [cell]
    seen = set()
    for f in polys:
        for gamma in _vertex_differences(f):
            if gamma in seen:
                continue
            seen.add(gamma)
            refined = []
            for c in cells:
                if c.sign_on(gamma) is not None:
                    refined.append(c)
                else:
                    refined.extend(c.split(gamma))
            cells = refined
    return cells


def _piece(datum: ReprDatum, cell: HalfOpenCone) -> BalancedPiece:
    omega = cell.interior_point()
    inits, phis, directions = [], [], []
    referenced = set(datum.referenced())
    for i, members in enumerate(datum.sets):
        if i not in referenced:
            inits.append(())
            phis.append(())
            continue
        set_inits = tuple(initial_form(f, omega) for f in members)
        inits.append(set_inits)
        phis.append(tuple(min(g.support(), key=grlex_key) for g in set_inits))
        for g in set_inits:
            base = next(iter(g.support()))
            directions.extend(tuple(a - b for a, b in zip(e, base)) for e in g.support())
    face_dim = integer_rank(directions) if directions else 0
    return BalancedPiece(cell, tuple(inits), tuple(phis), face_dim)


def balance(datum: ReprDatum) -> List[Tuple[ReprDatum, BalancedPiece]]:
    """
    Разбивает область так, чтобы начальная форма каждого члена была постоянна.

    Returns:
        Список (датум, ограниченный на ячейку; уравновешенная часть).
    """
    polys = [f for _, _, f in datum.members() if not f.is_monomial()]
    result = []
    for cell in datum.region:
        for sub in _balanced_cells(cell, polys):
            result.append((datum.restrict(sub), _piece(datum, sub)))
    logger.debug(f"Balanced {len(datum.region)} region cells into {len(result)} pieces")
    return result


# --- регулярность ---

def find_witness(piece: BalancedPiece, n: int) -> Optional[Tuple[LaurentPoly, ...]]:
    """
    Минимальное подмножество G начальных форм, для которого множество
    {g = 0, миноры Якоби = 0} непусто в торе; None, если часть регулярна.
    """
    forms = piece.distinct_inits()
    empty = []
    for size in range(1, len(forms) + 1):
        for subset in itertools.combinations(forms, size):
            keys = set(subset)
            if any(e <= keys for e in empty):
                continue
            if not torus_zero_exists(list(subset), n):
                empty.append(keys)
                continue
            if not rank_drop_locus_empty(list(subset), n):
                return subset
    return None


def is_regular(piece: BalancedPiece, n: int) -> bool:
    return find_witness(piece, n) is None


# --- упрощение ---

def _in_dual(exponent: Sequence[int], region: Sequence[HalfOpenCone]) -> bool:
    monomial = LaurentPoly.monomial(exponent)
    return all(is_integer_valued_on_cone(monomial, cell) for cell in region)


def _quotient(numerator: LaurentPoly, denominator: LaurentPoly) -> Optional[LaurentPoly]:
    """Точное частное многочленов Лорана или None."""
    g_num, twist_num = monomial_normalize(numerator)
    g_den, twist_den = monomial_normalize(denominator)
    _, a = g_num.to_ring_element()
    _, b = g_den.to_ring_element(a.ring)
    q, r = a.div(b)
    if r:
        return None
    c_num = numerator.shift(twist_num).terms_in_order()[0][1]
    c_den = denominator.shift(twist_den).terms_in_order()[0][1]
    quotient = LaurentPoly.from_ring_element(q)
    shift = tuple(b_ - a_ for a_, b_ in zip(twist_num, twist_den))
    return quotient.shift(shift).scale(QQ.convert(c_num) / QQ.convert(c_den))


def _divides(f: LaurentPoly, g: LaurentPoly, region) -> bool:
    """g = q·f с q из моноидной алгебры области."""
    q = _quotient(g, f)
    return q is not None and all(_in_dual(e, region) for e in q.support())


def _simplify_set(members: List[LaurentPoly], region) -> List[LaurentPoly]:
    members = list(members)
    changed = True
    while changed:
        changed = False
        for a, b in itertools.permutations(range(len(members)), 2):
            if _divides(members[a], members[b], region):
                logger.debug(f"Discarding {members[b]}: divisible by {members[a]}")
                del members[b]
                changed = True
                break
        if changed:
            continue
        for a, b in itertools.permutations(range(len(members)), 2):
            f, g = members[a], members[b]
            candidate = _cancellation(f, g, region)
            if candidate is not None:
                logger.debug(f"Cancelling {g} against {f}: {candidate}")
                members[b] = candidate
                changed = True
                break
    return members


def _cancellation(f: LaurentPoly, g: LaurentPoly, region) -> Optional[LaurentPoly]:
    for e_f, c_f in f.terms_in_order():
        for e_g, c_g in g.terms_in_order():
            shift = tuple(x - y for x, y in zip(e_g, e_f))
            if not _in_dual(shift, region):
                continue
            reduced = g - f.shift(shift).scale(QQ.convert(c_g) / QQ.convert(c_f))
            if not reduced.is_zero() and len(reduced) < len(g):
                return reduced
    return None


def simplify(datum: ReprDatum) -> ReprDatum:
    """
    Упрощение: удаляет множества без ссылок, отбрасывает члены, делящиеся на другие
    члены того же множества в моноидной алгебре области, и сокращает члены,
    пока это уменьшает носитель. Идеалы множеств не меняются.
    """
    referenced = datum.referenced()
    mapping = {old: new for new, old in enumerate(referenced)}
    sets = [_simplify_set(datum.sets[i], datum.region) for i in referenced]
    factors = tuple(factor.reindexed(mapping) for factor in datum.factors)
    return replace(datum, sets=tuple(tuple(members) for members in sets), factors=factors)


# --- редукция ---

def _candidates(datum: ReprDatum, piece: BalancedPiece, witness: Sequence[LaurentPoly]):
    keys = set(witness)
    for i, members in enumerate(piece.inits):
        chosen = [(p, init) for p, init in enumerate(members)
                  if not init.is_monomial() and underlying(init) in keys]
        for (p, init_f), (q, init_g) in itertools.combinations(chosen, 2):
            for e_t, c_t in init_f.terms_in_order():
                for e_u, c_u in init_g.terms_in_order():
                    gamma = tuple(x - y for x, y in zip(e_t, e_u))
                    if not any(gamma):
                        continue
                    key = (sum(abs(x) for x in gamma), grlex_key(gamma), i, p, q)
                    yield key, (i, p, q, gamma, c_t, c_u)


def reduce_split(datum: ReprDatum, piece: BalancedPiece,
                 depth_bound: int = 16) -> Tuple[Optional[ReprDatum], Optional[ReprDatum]]:
    """
    Редукция нерегулярной части вдоль γ = exp(t) - exp(t').

    На {⟨γ,ω⟩ ≥ 0}: f ← f - (c_t/c_t')·X^γ·f'; на {⟨γ,ω⟩ < 0}: f' ← f' - (c_t'/c_t)·X^{-γ}·f.

    Returns:
        (d_plus, d_minus); пустые области заменяются на None.

    Raises:
        ReductionFailure: если глубина исчерпана или свидетель не содержит двух
            членов одного множества.
    """
    witness = find_witness(piece, datum.n)
    if witness is None:
        raise ValueError("Редукция применима только к нерегулярной части")
    description = piece.describe()
    if datum.depth >= depth_bound:
        raise ReductionFailure(f"Превышена глубина редукции {depth_bound}",
                               piece=description, witness=witness, depth=datum.depth)
    best = min(_candidates(datum, piece, witness), key=lambda item: item[0], default=None)
    if best is None:
        raise ReductionFailure("Никакое множество не содержит двух членов свидетеля",
                               piece=description, witness=witness, depth=datum.depth)
    i, p, q, gamma, c_t, c_u = best[1]
    f, g = datum.sets[i][p], datum.sets[i][q]
    ratio = QQ.convert(c_t) / QQ.convert(c_u)
    (cell,) = datum.region

    def branch(relation: str, position: int, new_poly: LaurentPoly) -> Optional[ReprDatum]:
        sub = cell.with_constraint(gamma, relation)
        if sub.is_empty():
            return None
        members = list(datum.sets[i])
        if new_poly.is_zero():
            del members[position]
        else:
            members[position] = new_poly
        sets = list(datum.sets)
        sets[i] = tuple(members)
        return replace(datum, region=(sub,), sets=tuple(sets), depth=datum.depth + 1)

    neg_gamma = tuple(-x for x in gamma)
    plus = branch("ge", p, f - g.shift(gamma).scale(ratio))
    minus = branch("lt", q, g - f.shift(neg_gamma).scale(QQ(1) / ratio))
    logger.debug(f"Reduced set {i} along gamma={gamma} at depth {datum.depth}")
    return plus, minus
