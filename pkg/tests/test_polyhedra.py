import itertools
import math

import numpy as np
import pytest

from src.core.polyhedra import (
    Cone,
    Fan,
    HalfOpenCone,
    Polytope,
    compositions,
    cone_index,
    count_lattice_points,
    dot,
    double_description,
    dual_cone,
    mixed_volume,
    normalized_volume,
    partition_boundary_orthant,
    refine_by_normal_fans,
    triangulate_cone,
    triangulate_halfopen,
)

STANDARD_TRIANGLE = Polytope.from_points([(0, 0), (1, 0), (0, 1)])
UNIT_SQUARE = Polytope.from_points([(0, 0), (1, 0), (0, 1), (1, 1)])


def test_double_description_of_orthant():
    lineality, rays = double_description(2, inequalities=[(1, 0), (0, 1)])
    assert lineality == []
    assert rays == [(0, 1), (1, 0)]


def test_double_description_of_halfplane():
    assert double_description(2, inequalities=[(1, 0)]) == ([(0, 1)], [(1, 0)])
    # лучи ортогональны пространству линейности
    assert double_description(2, inequalities=[(1, -1)]) == ([(1, 1)], [(1, -1)])


def test_double_description_of_subspaces():
    assert double_description(3, equations=[(1, 1, 1)]) == ([(0, 1, -1), (1, 0, -1)], [])
    assert double_description(2) == ([(0, 1), (1, 0)], [])
    assert double_description(2, equations=[(1, 0), (0, 1)]) == ([], [])
    with pytest.raises(ValueError):
        double_description(2, inequalities=[(1, 0, 0)])


def test_double_description_is_exact_for_large_entries():
    big = 1000003
    cone = Cone.from_generators(2, [(big, 1), (1, big)])
    assert sorted(cone.facets) == [(-1, big), (big, -1)]
    assert cone.contains((big + 1, 2)) and not cone.contains((big + 1, 1))


def test_cone_facets_and_dimension():
    cone = Cone.from_generators(2, [(1, 0), (1, 1), (2, 1)])
    assert cone.rays == [(1, 0), (1, 1)]
    assert sorted(cone.facets) == [(0, 1), (1, -1)]
    assert cone.dim == 2 and cone.is_pointed
    assert cone.contains((3, 1)) and not cone.contains((1, 2))
    assert cone.relative_interior_point() == (2, 1)


def _rational_point(rng, dim, low=-20, high=20):
    """Случайная рациональная точка, домноженная на общий знаменатель."""
    numerators = rng.integers(low, high + 1, size=dim)
    denominators = rng.integers(1, 10, size=dim)
    common = math.lcm(*(int(d) for d in denominators))
    return [int(n) * (common // int(d)) for n, d in zip(numerators, denominators)]


@pytest.mark.parametrize("dim, samples, low", [
    (3, 200, 0),
    (3, 200, -3),
    pytest.param(4, 2000, -3, marks=pytest.mark.slow),
])
def test_dual_cone_is_an_involution(dim, samples, low):
    rng = np.random.default_rng(3 + dim)
    for _ in range(samples):
        generators = [tuple(int(v) for v in rng.integers(low, 4, size=dim)) for _ in range(dim + 1)]
        generators = [g for g in generators if any(g)] or [_unit_vector(dim)]
        cone = Cone.from_generators(dim, generators)
        assert dual_cone(dual_cone(cone)) == cone


def _unit_vector(dim):
    return (1,) + (0,) * (dim - 1)


def test_halfopen_cone_emptiness_and_contains():
    line = HalfOpenCone(1, strict=((1,), (-1,)))
    assert line.is_empty() and line.dim == -1
    quadrant = HalfOpenCone(2, inequalities=((1, 0),), strict=((0, 1),))
    assert quadrant.contains((0, 1)) and not quadrant.contains((1, 0))
    assert quadrant.interior_point() == (1, 1)
    with pytest.raises(ValueError):
        line.interior_point()


def test_split_and_sign():
    plane = HalfOpenCone(2)
    parts = plane.split((1, -1))
    assert [part.dim for part in parts] == [2, 1, 2]
    positive = HalfOpenCone(2, strict=((1, 0), (0, 1)))
    assert positive.sign_on((1, 1)) == 1
    assert positive.sign_on((-1, -2)) == -1
    assert positive.sign_on((1, -1)) is None
    assert positive.with_constraint((1, -1), "eq").sign_on((1, -1)) == 0


def test_embed_adds_free_coordinates():
    cone = HalfOpenCone(1, strict=((1,),)).embed(2)
    assert cone.ambient_dim == 3
    assert cone.contains((1, -5, 7)) and not cone.contains((0, 1, 1))


def test_partition_of_orthant_boundary_covers_exactly():
    fan = partition_boundary_orthant(3)
    assert len(fan) == 7
    rng = np.random.default_rng(5)
    for _ in range(10_000):
        point = _rational_point(rng, 3, low=1)
        zeros = rng.random(3) < 0.5
        point = [0 if zero else x for zero, x in zip(zeros, point)]
        located = fan.locate(point)
        if all(point):
            assert located == []
        else:
            assert len(located) == 1


def test_normal_fan_refinement_covers_the_plane_exactly():
    cells = refine_by_normal_fans(HalfOpenCone(2), [STANDARD_TRIANGLE, UNIT_SQUARE])
    fan = Fan(2, [cell for cell, _ in cells])
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        assert len(fan.locate(_rational_point(rng, 2))) == 1
    for point in itertools.product(range(-2, 3), repeat=2):
        assert len(fan.locate(point)) == 1


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_triangulation_preserves_lattice_points(seed):
    square_cone = Cone.from_generators(3, [(0, 0, 1), (1, 0, 1), (0, 1, 1), (1, 1, 1)])
    assert len(triangulate_cone(square_cone, seed)) == 2
    for cone in (HalfOpenCone.from_cone(square_cone),
                 HalfOpenCone.from_cone(square_cone).with_constraint((1, 0, 0), "gt")):
        pieces = triangulate_halfopen(cone, seed)
        expected = count_lattice_points(cone, 3)
        assert sum(count_lattice_points(piece, 3) for piece in pieces) == expected
        for point in itertools.product(range(-1, 3), repeat=3):
            assert sum(piece.contains(point) for piece in pieces) == int(cone.contains(point))


def test_cone_index():
    assert cone_index([(1, 0), (1, 2)]) == 2
    assert cone_index([(1, 0, 0), (0, 1, 0)]) == 1
    with pytest.raises(ValueError):
        cone_index([(1, 1), (2, 2)])


def test_normalized_volume():
    assert normalized_volume(STANDARD_TRIANGLE) == 1
    assert normalized_volume(UNIT_SQUARE) == 2
    assert normalized_volume(Polytope.from_points([(0, 0), (2, 0), (0, 2)])) == 4
    assert normalized_volume(Polytope.from_points([(0,), (3,)])) == 3
    assert normalized_volume(Polytope.from_points([(1, 1)])) == 1


def test_mixed_volume():
    assert mixed_volume([STANDARD_TRIANGLE, STANDARD_TRIANGLE]) == 1
    assert mixed_volume([UNIT_SQUARE, UNIT_SQUARE]) == 2
    horizontal = Polytope.from_points([(0, 0), (1, 0)])
    vertical = Polytope.from_points([(0, 0), (0, 1)])
    assert mixed_volume([horizontal, vertical]) == 1
    assert mixed_volume([horizontal, horizontal]) == 0


def test_refine_by_normal_fans_fixes_minimizing_vertex():
    cells = refine_by_normal_fans(HalfOpenCone(2), [STANDARD_TRIANGLE])
    full = [cell for cell, _ in cells if cell.dim == 2]
    assert len(full) == len(cells) == 6
    for cell, (vertex,) in cells:
        omega = cell.interior_point()
        assert dot(vertex, omega) == STANDARD_TRIANGLE.min_value(omega)


def test_compositions():
    assert list(compositions(3, 2)) == [(1, 2), (2, 1)]
    assert len(list(compositions(3, 2, minimum=0))) == 4
    assert list(compositions(0, 0)) == [()]
