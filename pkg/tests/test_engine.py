import json
import pickle

import pytest
from sympy import QQ

from src.analysis.engine import (
    EngineConfig,
    _evaluate_task,
    check_invariants,
    eps_ratio,
    fixed_points,
    omega_invariant,
    product_law_check,
    regular_pieces,
    topological_rep_zeta,
)
from src.analysis.lie import abelian, change_basis
from src.analysis.repdatum import construct_datum
from src.core.config import Settings
from src.core.exact import RationalFunction, parse_ratfun
from src.core.exceptions import InvariantViolation


@pytest.mark.parametrize("name, expected", [
    ("L_{3,2}", "s/(s-1)"),
    ("L_{4,3}", "s^2/(s-1)^2"),
    ("L_{5,4}", "2s/(2s-1)"),
    ("L_{5,5}", "(2s-1)s/(2(s-1)^2)"),
    ("L_{5,8}", "s/(s-2)"),
    ("L_{6,26}", "s/(s-3)"),
    ("L_{6,22}(1)", "s^2/(s-1)^2"),
])
def test_catalog_values(catalog, name, expected):
    algebra = catalog.fetch_algebra(name)
    result = topological_rep_zeta(algebra)
    assert result.zeta == parse_ratfun(expected)
    assert check_invariants(result.zeta, algebra.derived_dim, algebra.dim).ok


def test_heisenberg_result(heisenberg):
    result = topological_rep_zeta(heisenberg)
    assert result.omega == 1
    assert result.weight == 0
    assert result.reduction_count == 0
    assert result.to_json() == {"zeta": {"num": [0, 1], "den": [-1, 1]}, "omega": "1", "weight": 0}


def test_abelian_is_one():
    result = topological_rep_zeta(abelian(4))
    assert result.zeta == 1
    assert result.omega == 0


def test_trace_events(catalog):
    result = topological_rep_zeta(catalog.fetch_algebra("L_{4,3}"), EngineConfig(trace=True))
    events = {record["event"] for record in result.trace}
    assert {"datum", "regular", "contribution", "euler"} <= events
    assert not topological_rep_zeta(catalog.fetch_algebra("L_{4,3}")).trace


def test_modes_agree(catalog):
    algebra = catalog.fetch_algebra("L_{5,5}")
    expected = topological_rep_zeta(algebra).zeta
    assert topological_rep_zeta(algebra, EngineConfig(oracle_mode="crosscheck")).zeta == expected
    assert topological_rep_zeta(algebra, EngineConfig(jobs=2)).zeta == expected


@pytest.mark.parametrize("name", ["L_{4,3}", "L_{5,5}", "L_{5,8}"])
def test_worker_count_does_not_change_output(catalog, name):
    algebra = catalog.fetch_algebra(name)
    outputs = [json.dumps(topological_rep_zeta(algebra, EngineConfig(jobs=jobs)).to_json(), sort_keys=True)
               for jobs in (1, 4)]
    assert outputs[0] == outputs[1]


def test_worker_task_result_is_plain_data(heisenberg):
    datum = construct_datum(heisenberg)
    regular, _ = regular_pieces(datum, EngineConfig())
    sub, piece = next((sub, piece) for sub, piece in regular if piece.cell.dim == sub.n - piece.face_dim - 1)
    copied_sub, copied_piece = pickle.loads(pickle.dumps((sub, piece)))
    assert copied_piece.describe() == piece.describe()
    assert copied_sub.describe() == sub.describe()
    chi, payload, records = _evaluate_task((sub, piece, (), "off", (101,)))
    assert pickle.loads(pickle.dumps((chi, payload, records))) == (chi, payload, records)
    assert isinstance(chi, int)
    assert RationalFunction.from_json(payload).degree() <= 0


@pytest.mark.parametrize("first, second", [
    ("L_{3,2}", "L_{3,2}"),
    ("L_{3,2}", "abelian:2"),
    ("L_{4,3}", "abelian:2"),
    ("L_{5,4}", "abelian:2"),
    ("abelian:2", "abelian:3"),
    pytest.param("L_{3,2}", "L_{4,3}", marks=pytest.mark.slow),
    pytest.param("L_{4,3}", "L_{5,4}", marks=pytest.mark.slow),
    pytest.param("L_{5,8}", "L_{3,2}", marks=pytest.mark.slow),
    pytest.param("L_{5,5}", "L_{3,2}", marks=pytest.mark.slow),
    pytest.param("L_{4,3}", "L_{4,3}", marks=pytest.mark.slow),
    pytest.param("L_{6,26}", "L_{3,2}", marks=pytest.mark.slow),
])
def test_product_law(catalog, first, second):
    assert product_law_check(catalog.fetch_algebra(first), catalog.fetch_algebra(second))


def test_zeta_does_not_depend_on_basis(heisenberg):
    rescaled = change_basis(heisenberg, [[1, 0, 0], [1, 1, 0], [0, 0, 2]])
    assert topological_rep_zeta(rescaled).zeta == parse_ratfun("s/(s-1)")


def test_eps_ratio(catalog, heisenberg):
    base = topological_rep_zeta(heisenberg)
    extended = topological_rep_zeta(catalog.fetch_algebra("L_{3,2}[eps]"))
    assert extended.zeta == parse_ratfun("2s/(2s-3)")
    assert eps_ratio(base, extended) == QQ(3, 2)
    assert eps_ratio(topological_rep_zeta(abelian(2)), extended) is None


@pytest.mark.slow
def test_filiform_eps(catalog):
    result = topological_rep_zeta(catalog.fetch_algebra("L_{4,3}[eps]"))
    assert result.zeta == parse_ratfun("2(4s^2-6s+1)s/(2s-3)^3")
    assert result.zeta.to_plain() == "2*(4*s^2 - 6*s + 1)*s/(2*s - 3)^3"
    assert result.omega == QQ(3)


def test_omega_invariant():
    assert omega_invariant(parse_ratfun("s/(s-3)")) == 3
    assert omega_invariant(parse_ratfun("(2s-1)s/(2(s-1)^2)")) == QQ(3, 2)
    assert omega_invariant(RationalFunction.constant(1)) == 0
    with pytest.raises(ValueError):
        omega_invariant(parse_ratfun("s^2/(s-1)"))


def test_fixed_points():
    points = fixed_points(parse_ratfun("s/(s-1)"))
    assert [round(p.real, 9) for p in points] == [0, 2]
    assert fixed_points(RationalFunction.variable()) == []


def test_invariants_pass_with_observations():
    report = check_invariants(parse_ratfun("s/(s-1)"), 1, 3)
    assert report.ok
    assert report.observations == {
        "vanishes_at_zero": True,
        "omega_positive": True,
        "degree_minus_one": True,
        "fixed_points_in_strip": True,
    }


@pytest.mark.parametrize("text", ["s/(s-2)", "s^2/(s-1)", "2s/(s-1)", "s^2/(s^2-2)"])
def test_invariant_failures(text):
    z = parse_ratfun(text)
    assert not check_invariants(z, 1, strict=False).ok
    with pytest.raises(InvariantViolation):
        check_invariants(z, 1)


def test_engine_config():
    settings = Settings(depth_bound=4, oracle_mode="crosscheck", jobs=3)
    config = EngineConfig.from_settings(settings, jobs=None, depth_bound=7)
    assert (config.depth_bound, config.oracle_mode, config.jobs) == (7, "crosscheck", 3)
    assert config.cache_options() == {"depth_bound": 7}
    for bad in ({"depth_bound": -1}, {"oracle_mode": "never"}, {"jobs": 0}):
        with pytest.raises(ValueError):
            EngineConfig(**bad)
