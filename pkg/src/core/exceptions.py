"""
Иерархия исключений проекта.

Все ошибки предметной области наследуются от ZetaError, чтобы CLI мог
отличать ожидаемые исходы (например, отказ редукции) от аварий.
"""
from typing import Any, Optional


class ZetaError(Exception):
    """Базовый класс для ошибок вычисления дзета-функций."""


class AlgebraValidationError(ZetaError, ValueError):
    """
    Структурные константы не задают нильпотентную алгебру Ли.

    Args:
        message: Описание нарушенного тождества.
        identity: "antisymmetry", "jacobi" или "nilpotency".
        where: Индексы (1-based), на которых тождество нарушено.
    """

    def __init__(self, message: str, identity: str = "", where: tuple = ()):
        super().__init__(message)
        self.identity = identity
        self.where = tuple(where)


class AlgebraParseError(ZetaError, ValueError):
    """Ошибка разбора входного JSON-файла (с позицией, если она известна)."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        if line is not None:
            message = f"{message} (строка {line}, столбец {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ReductionFailure(ZetaError):
    """
    Шаг редукции невозможен: либо нет множества с двумя членами свидетеля,
    либо превышена граница глубины. Это документированный исход, а не авария.
    """

    def __init__(self, message: str, piece: Any = None, witness: Any = None, depth: int = 0):
        super().__init__(message)
        self.piece = piece
        self.witness = witness
        self.depth = depth


class OracleInconclusive(ZetaError):
    """Числа точек над конечными полями не интерполируются многочленом."""


class EulerMismatch(ZetaError):
    """Комбинаторная эйлерова характеристика расходится с оракулом."""


class InvariantViolation(ZetaError, AssertionError):
    """Жёсткая проверка результата (степень, предел, полюса) не прошла."""
