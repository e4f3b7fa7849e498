import json
import logging
import os
import re
from functools import lru_cache

from src.analysis.lie import NilpotentLieAlgebra, abelian, direct_sum, dual_number_extension, validate
from src.core.data_source import AlgebraSource
from src.data_ingestion.json_algebra_file import algebra_from_dict

logger = logging.getLogger(__name__)

DEFAULT_PRESETS_PATH = os.path.join(os.path.dirname(__file__), "..", "..", "data", "presets.json")

ABELIAN_PATTERN = re.compile(r"^abelian:(\d+)$")
EPS_SUFFIX = "[eps]"


class PresetCatalog(AlgebraSource):
    """
    Каталог именованных алгебр из data/presets.json.

    Помимо имён каталога понимает выражения:
        "abelian:5"          - абелева алгебра размерности 5;
        "L_{4,3}[eps]"       - расширение двойственными числами (суффикс повторяем);
        "L_{3,2} + L_{3,2}"  - прямая сумма.
    """

    def __init__(self, presets_path: str = DEFAULT_PRESETS_PATH):
        self.presets_path = os.path.normpath(presets_path)
        self._entries, self._aliases, self.note = _load_catalog(self.presets_path)
        logger.debug(f"Loaded {len(self._entries)} presets from {self.presets_path}")

    def _canonical(self, name: str) -> str:
        return self._aliases.get(name, name)

    def fetch_algebra(self, name: str) -> NilpotentLieAlgebra:
        name = name.strip()
        if "+" in name:
            parts = [self.fetch_algebra(part) for part in _split_sum(name)]
            result = parts[0]
            for part in parts[1:]:
                result = direct_sum(result, part)
            return validate(result)
        if name.endswith(EPS_SUFFIX):
            return validate(dual_number_extension(self.fetch_algebra(name[: -len(EPS_SUFFIX)])))
        match = ABELIAN_PATTERN.match(name)
        if match:
            return abelian(int(match.group(1)))
        canonical = self._canonical(name)
        if canonical not in self._entries:
            raise KeyError(f"Неизвестная алгебра: {name}")
        algebra = algebra_from_dict(self._entries[canonical])
        if canonical != name:
            logger.info(f"Preset {name} is an alias of {canonical}")
        return algebra

    def get_available_names(self) -> list[str]:
        return list(self._entries) + sorted(self._aliases)

    def get_info(self, name: str) -> dict:
        algebra = self.fetch_algebra(name)
        info = {
            "name": name,
            "dim": algebra.dim,
            "derived_dim": algebra.derived_dim,
            "class": algebra.nilpotency_class(),
        }
        canonical = self._canonical(name)
        if canonical != name:
            info["alias_of"] = canonical
        return info


def _split_sum(expression: str) -> list:
    parts = [part.strip() for part in expression.split("+")]
    if any(not part for part in parts):
        raise KeyError(f"Некорректное выражение прямой суммы: {expression}")
    return parts


@lru_cache(maxsize=8)
def _load_catalog(path: str) -> tuple:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    entries = {entry["name"]: entry for entry in data.get("algebras", [])}
    aliases = dict(data.get("aliases", {}))
    for alias, target in aliases.items():
        if target not in entries:
            raise ValueError(f"Псевдоним {alias} ссылается на неизвестную алгебру {target}")
    return entries, aliases, data.get("note", "")


def preset(name: str) -> NilpotentLieAlgebra:
    """Алгебра из каталога по умолчанию."""
    return PresetCatalog().fetch_algebra(name)
