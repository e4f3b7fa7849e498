import pytest

import src.analysis.euler as euler
from src.analysis.euler import (
    EulerCalculator,
    TorusSystem,
    euler_characteristic,
    is_nondegenerate,
    khovanskii_characteristic,
    pointcount_interpolation_oracle,
    split_torus_factor,
)
from src.core.exceptions import EulerMismatch
from src.core.laurent import LaurentPoly

t = LaurentPoly.variable(1, 0)
x = LaurentPoly.variable(2, 0)
y = LaurentPoly.variable(2, 1)


@pytest.mark.parametrize("system, expected", [
    (TorusSystem(0), 1),
    (TorusSystem(1), 0),
    (TorusSystem(1, (1 + t,)), 1),
    (TorusSystem(1, (t,)), 0),
    (TorusSystem(1, (), (1 + t,)), -1),
    (TorusSystem(1, ((1 + t) * (2 + t),)), 2),
    (TorusSystem(1, ((1 + t) ** 2,)), 1),
    (TorusSystem(2, (1 + x + y,)), -1),
    (TorusSystem(2, (1 + x + y,), (1 + x,)), -1),
    (TorusSystem(2, (1 + x + y, 1 + 2 * x + 3 * y)), 1),
    (TorusSystem(2, (1 + x * y,)), 0),
])
def test_characteristic(system, expected):
    assert euler_characteristic(system) == expected


def test_paths_are_recorded():
    records = []
    euler_characteristic(TorusSystem(1, ((1 + t) * (2 + t),)), records=records)
    assert records[-1]["path"] == "khovanskii"
    assert records[-1]["chi"] == 2

    records = []
    euler_characteristic(TorusSystem(2, (1 + x + y,)), records=records)
    assert records[-1]["path"] == "elimination"

    records = []
    euler_characteristic(TorusSystem(1, ((1 + t) ** 2,)), records=records)
    assert records[-1]["path"] == "oracle"


def test_oracle_only_mode():
    records = []
    assert euler_characteristic(TorusSystem(2, (1 + x + y,)), oracle_mode="only", records=records) == -1
    assert [r["path"] for r in records] == ["oracle"]


def test_crosscheck_agrees():
    assert euler_characteristic(TorusSystem(2, (1 + x + y, 1 + 2 * x + 3 * y)), oracle_mode="crosscheck") == 1


def test_crosscheck_mismatch(monkeypatch):
    monkeypatch.setattr(euler, "khovanskii_characteristic", lambda polys, d: 5)
    with pytest.raises(EulerMismatch):
        EulerCalculator("crosscheck").characteristic(TorusSystem(1, ((1 + t) * (2 + t),)))


def test_oracle_counts():
    assert pointcount_interpolation_oracle(TorusSystem(2, (1 + x + y,))) == -1
    assert pointcount_interpolation_oracle(TorusSystem(1, (), (1 + t,))) == -1
    assert pointcount_interpolation_oracle(TorusSystem(1, (2 + 3 * t + t ** 2,)), primes=(5, 7)) == 2


def test_khovanskii():
    assert khovanskii_characteristic([1 + x + y], 2) == -1
    assert khovanskii_characteristic([1 + x + y, 1 + 2 * x + 3 * y], 2) == 1


def test_nondegeneracy():
    assert is_nondegenerate([1 + x + y], 2)
    assert is_nondegenerate([(1 + t) * (2 + t)], 1)
    assert not is_nondegenerate([(1 + t) ** 2], 1)


def test_split_torus_factor():
    compressed = split_torus_factor(TorusSystem(2, (1 + x * y,), (1 - x * y,)), 1)
    assert compressed.dim == 1
    assert len(compressed.vanishing[0]) == 2
    assert euler_characteristic(compressed) == 1
    with pytest.raises(ValueError):
        split_torus_factor(TorusSystem(2, (1 + x + y,)), 1)


def test_system_validation():
    with pytest.raises(ValueError):
        TorusSystem(1, (LaurentPoly.zero(1),))
    with pytest.raises(ValueError):
        TorusSystem(1, (x,))
    with pytest.raises(ValueError):
        EulerCalculator("sometimes")
