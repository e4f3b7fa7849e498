"""
Чтение и запись алгебр Ли в JSON-формате:

    {"name": "H", "dim": 3, "brackets": {"[1,2]": {"3": "1"}}}

Индексы с единицы, в ключах скобок i < j; незаданные скобки равны нулю.
"""
import json
import logging
import os
import re
from typing import Union

from src.analysis.lie import NilpotentLieAlgebra, validate
from src.core.exact import format_rational, parse_rational
from src.core.exceptions import AlgebraParseError

logger = logging.getLogger(__name__)

BRACKET_KEY = re.compile(r"^\s*\[\s*(\d+)\s*,\s*(\d+)\s*\]\s*$")


def _load_json(source: Union[str, os.PathLike]) -> dict:
    text = str(source)
    if os.path.exists(text):
        with open(text, encoding="utf-8") as handle:
            text = handle.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise AlgebraParseError(f"Некорректный JSON: {e.msg}", e.lineno, e.colno) from e


def algebra_from_dict(data: dict, check: bool = True) -> NilpotentLieAlgebra:
    """
    Строит алгебру из уже разобранного JSON-объекта.

    Raises:
        AlgebraParseError: нарушение схемы.
        AlgebraValidationError: структурные константы не задают нильпотентную алгебру Ли.
    """
    if not isinstance(data, dict):
        raise AlgebraParseError("Ожидается JSON-объект с полями name, dim, brackets")
    if "dim" not in data:
        raise AlgebraParseError("Отсутствует поле 'dim'")
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise AlgebraParseError(f"Поле 'dim' должно быть неотрицательным целым числом, получено {dim!r}")
    raw = data.get("brackets", {})
    if not isinstance(raw, dict):
        raise AlgebraParseError("Поле 'brackets' должно быть объектом")

    brackets = {}
    for key, image in raw.items():
        match = BRACKET_KEY.match(key)
        if not match:
            raise AlgebraParseError(f"Некорректный ключ скобки {key!r}, ожидается '[i,j]'")
        i, j = int(match.group(1)), int(match.group(2))
        if not 1 <= i < j <= dim:
            raise AlgebraParseError(f"Ключ {key!r}: требуется 1 <= i < j <= {dim}")
        if not isinstance(image, dict):
            raise AlgebraParseError(f"Значение скобки {key!r} должно быть объектом {{индекс: число}}")
        row = {}
        for index, value in image.items():
            if not str(index).isdigit() or not 1 <= int(index) <= dim:
                raise AlgebraParseError(f"Скобка {key!r}: индекс {index!r} вне диапазона 1..{dim}")
            try:
                row[int(index) - 1] = parse_rational(value)
            except ValueError as e:
                raise AlgebraParseError(f"Скобка {key!r}: {e}") from e
        brackets[(i - 1, j - 1)] = row

    algebra = NilpotentLieAlgebra(dim, brackets, data.get("name", ""))
    return validate(algebra) if check else algebra


def parse_algebra_file(source: Union[str, os.PathLike]) -> NilpotentLieAlgebra:
    """
    Разбирает алгебру из пути к файлу или из JSON-текста и проверяет её.

    Args:
        source: Путь к файлу или строка с JSON.

    Returns:
        Проверенная NilpotentLieAlgebra.
    """
    algebra = algebra_from_dict(_load_json(source))
    logger.debug(f"Parsed algebra {algebra.name or '<unnamed>'} of dimension {algebra.dim}")
    return algebra


def algebra_to_dict(algebra: NilpotentLieAlgebra) -> dict:
    return {
        "name": algebra.name,
        "dim": algebra.dim,
        "brackets": {
            f"[{i + 1},{j + 1}]": {str(k + 1): format_rational(c) for k, c in sorted(image.items())}
            for (i, j), image in sorted(algebra.brackets.items())
        },
    }


def emit_algebra_file(algebra: NilpotentLieAlgebra, path: str = None) -> str:
    """
    Сериализует алгебру в JSON (и записывает в файл, если задан путь).

    Returns:
        JSON-текст.
    """
    text = json.dumps(algebra_to_dict(algebra), ensure_ascii=False, indent=2)
    if path:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
        logger.info(f"Algebra {algebra.name} written to {path}")
    return text
