import numpy as np
import pytest

from src.analysis.repdatum import (
    Factor,
    ReprDatum,
    balance,
    construct_datum,
    find_witness,
    is_regular,
    reduce_split,
    simplify,
    weight,
)
from src.core.exceptions import InvariantViolation, ReductionFailure
from src.core.laurent import LaurentPoly, initial_form, underlying
from src.core.polyhedra import HalfOpenCone

t = LaurentPoly.variable(1, 0)
x = LaurentPoly.variable(2, 0)
y = LaurentPoly.variable(2, 1)

ORIGIN = HalfOpenCone(1, equations=((1,),))
RAY = HalfOpenCone(1, inequalities=((1,),))
ORTHANT = HalfOpenCone(2, inequalities=((1, 0), (0, 1)))


def _datum(n, region, *members):
    sets = [(LaurentPoly.constant(n, 1),)] + [tuple(m) for m in members]
    factors = [Factor(None, 0, (1, -n - 1))] + [Factor(None, i, (1, 0)) for i in range(1, len(sets))]
    return ReprDatum(n, region, sets, factors)


def test_heisenberg_datum(heisenberg):
    datum = construct_datum(heisenberg)
    assert datum.n == 1
    assert datum.sets == ((LaurentPoly.constant(1, 1),), (t,))
    assert datum.factors == (Factor(None, 0, (1, -2)),)
    assert weight(datum) == 0
    assert len(datum.region) == 1


def test_filiform_datum(catalog):
    datum = construct_datum(catalog.fetch_algebra("L_{4,3}"))
    assert datum.n == 2
    assert [len(members) for members in datum.sets] == [1, 2, 1]
    assert datum.factors == (Factor(None, 0, (1, -3)), Factor(None, 0, (0, 1)), Factor(2, 0, (0, -1)))
    assert len(datum.region) == 3
    assert weight(datum) == 0


def test_abelian_has_no_datum(catalog):
    with pytest.raises(ValueError):
        construct_datum(catalog.fetch_algebra("abelian:3"))


def test_factor_and_datum_validation():
    with pytest.raises(ValueError):
        Factor(None, None, (1, 0))
    with pytest.raises(ValueError):
        ReprDatum(1, (RAY,), ((LaurentPoly.zero(1),),), ())
    with pytest.raises(ValueError):
        ReprDatum(1, (RAY,), ((t,),), (Factor(None, 3, (1, 0)),))
    with pytest.raises(ValueError):
        ReprDatum(1, (RAY,), ((t,), ()), (Factor(1, None, (1, 0)),))
    with pytest.raises(ValueError):
        ReprDatum(1, (RAY,), ((x,),), ())


def test_weight_counts_distinct_supports():
    datum = _datum(2, (ORTHANT,), (1 + x + y, x + x ** 2 + x * y), (1 + x,))
    # 1+x+y twice up to a monomial, plus 1+x
    assert weight(datum) == 2 + 1


def test_balance_fixes_initial_forms():
    f = 1 + x + y
    datum = _datum(2, (ORTHANT,), (f,))
    pieces = balance(datum)
    assert len(pieces) > 1
    rng = np.random.default_rng(13)
    for point in rng.integers(0, 6, size=(60, 2)):
        point = tuple(int(v) for v in point)
        owners = [piece for sub, piece in pieces if sub.region[0].contains(point)]
        assert len(owners) == 1
        assert owners[0].inits[1][0] == initial_form(f, point)


def test_monomial_datum_is_regular(heisenberg):
    for sub, piece in balance(construct_datum(heisenberg)):
        assert piece.distinct_inits() == ()
        assert is_regular(piece, sub.n)


def test_smooth_piece_is_regular():
    (_, piece), = balance(_datum(2, (HalfOpenCone(2, equations=((1, 0), (0, 1))),), (1 + x + y,)))
    assert piece.face_dim == 2
    assert find_witness(piece, 2) is None


def test_witness_and_reduction():
    f, g = 1 + t, (1 + t) * (2 + t)
    (datum, piece), = balance(_datum(1, (ORIGIN,), (f, g)))
    witness = find_witness(piece, 1)
    assert set(witness) == {underlying(f), underlying(g)}

    plus, minus = reduce_split(datum, piece)
    assert minus is None
    assert plus.depth == 1
    assert plus.sets[1] == (-2 - 2 * t ** -1, g)

    with pytest.raises(ReductionFailure) as info:
        reduce_split(datum, piece, depth_bound=0)
    assert info.value.depth == 0


def test_reduction_needs_two_members_of_one_set():
    (datum, piece), = balance(_datum(1, (ORIGIN,), ((1 + t) ** 2,)))
    assert not is_regular(piece, 1)
    with pytest.raises(ReductionFailure):
        reduce_split(datum, piece)


def test_reduction_rejects_regular_piece(heisenberg):
    datum, piece = balance(construct_datum(heisenberg))[0]
    with pytest.raises(ValueError):
        reduce_split(datum, piece)


def test_simplify_drops_multiples_and_unreferenced_sets():
    datum = ReprDatum(1, (RAY,), ((LaurentPoly.constant(1, 1),), (1 + t,), (t, t ** 2)),
                      (Factor(None, 0, (1, -2)), Factor(2, None, (0, 1))))
    simplified = simplify(datum)
    assert simplified.sets == ((LaurentPoly.constant(1, 1),), (t,))
    assert simplified.factors == (Factor(None, 0, (1, -2)), Factor(1, None, (0, 1)))


def test_simplify_cancels_terms():
    simplified = simplify(_datum(1, (RAY,), (1 + t, 2 + t)))
    (member,) = simplified.sets[1]
    assert member.is_constant()


def test_simplify_uses_the_monoid_of_the_region():
    left = HalfOpenCone(1, inequalities=((-1,),))
    assert simplify(_datum(1, (left,), (t ** -1, t ** -2, t))).sets[1] == (t,)
    assert simplify(_datum(1, (RAY,), (t ** -1, t ** -2, t))).sets[1] == (t ** -2,)


def test_check_integrality():
    left = HalfOpenCone(1, inequalities=((-1,),))
    _datum(1, (left,), (t ** -1,)).check_integrality()
    with pytest.raises(InvariantViolation):
        _datum(1, (RAY,), (t ** -1,)).check_integrality()


def _non_regular_piece(datum):
    for sub, piece in balance(datum):
        if find_witness(piece, sub.n) is not None:
            return sub, piece
    raise AssertionError("all pieces are regular")


def test_reduction_branches_partition_the_region():
    f, g = 1 + x, y * (1 + x) * (2 + x)
    line = HalfOpenCone(2, equations=((1, 0),))
    datum, piece = _non_regular_piece(_datum(2, (line,), (f, g)))
    plus, minus = reduce_split(datum, piece)
    assert plus is not None and minus is not None
    (parent,) = datum.region
    rng = np.random.default_rng(17)
    for _ in range(500):
        point = [int(v) for v in rng.integers(-6, 7, size=2)]
        if rng.random() < 0.7:
            point[0] = 0
        owners = plus.region[0].contains(point) + minus.region[0].contains(point)
        assert owners == int(parent.contains(point))
    # граница ⟨γ,ω⟩ = 0 принадлежит ветви "≥"
    assert plus.region[0].contains((0, 0)) and not minus.region[0].contains((0, 0))


def _vanishing_pattern(sets, point, p):
    return tuple(all(member.evaluate_mod(point, p) == 0 for member in members) for members in sets)


def test_simplify_preserves_vanishing_over_a_prime_field():
    p = 65521
    f, h = 1 + x + y, x - y
    datum = _datum(2, (ORTHANT,), (f, f * (3 + x * y), h), (h * (1 + y), 2 + x))
    simplified = simplify(datum)
    assert len(simplified.sets) == len(datum.sets)
    assert sum(len(members) for members in simplified.sets) < sum(len(members) for members in datum.sets)

    rng = np.random.default_rng(19)
    half = pow(2, -1, p)
    points = [(p - half, p - half)]
    while len(points) < 20:
        u, v = (int(c) for c in rng.integers(1, p, size=2))
        if len(points) % 2:
            # точки на кривой 1 + x + y = 0
            v = (-1 - u) % p
            if v == 0:
                continue
        points.append((u, v))
    patterns = [_vanishing_pattern(datum.sets, point, p) for point in points]
    assert patterns == [_vanishing_pattern(simplified.sets, point, p) for point in points]
    assert patterns[0] == (False, True, False)
