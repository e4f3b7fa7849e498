"""
Регрессионный корпус: загрузка data/corpus.json, фильтрация, параллельный
прогон и сводные таблицы (pandas).
"""
import dataclasses
import json
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List, Optional, Union

import pandas as pd
from sympy import QQ

from src.analysis.engine import EngineConfig, check_invariants, omega_invariant, topological_rep_zeta
from src.core.data_manager import ResultManager
from src.core.exact import RationalFunction, format_rational, parse_rational, parse_ratfun
from src.core.exceptions import ReductionFailure, ZetaError
from src.data_ingestion.json_algebra_file import algebra_from_dict
from src.data_ingestion.preset_catalog import DEFAULT_PRESETS_PATH, PresetCatalog

logger = logging.getLogger(__name__)

DEFAULT_CORPUS_PATH = os.path.join(os.path.dirname(__file__), "..", "..", "data", "corpus.json")

REPORT_COLUMNS = ["name", "dim", "weight", "expected", "computed", "status", "seconds", "omega"]
STATUSES = ("pass", "mismatch", "failure", "error", "reference")
EPS_SUFFIX = "[eps]"


@dataclass(frozen=True)
class CorpusEntry:
    """
    Строка корпуса.

    Args:
        name: Имя строки таблицы.
        algebra: Имя/выражение каталога, JSON-объект алгебры или None для справочных строк.
        expected_zeta: Ожидаемая дзета-функция.
        dim: Размерность алгебры.
        expected_weight: Ожидаемый вес (сравнивается только для отчёта).
        derived_dim: Размерность коммутанта, если известна.
        source: Откуда взята строка.
        slow: Тяжёлая строка (запускается только по запросу).
    """
    name: str
    algebra: Union[str, dict, None]
    expected_zeta: RationalFunction
    dim: int
    expected_weight: Optional[int] = None
    derived_dim: Optional[int] = None
    source: str = ""
    slow: bool = False

    def __post_init__(self):
        if not self.name:
            raise ValueError("Строка корпуса без имени")
        if self.dim < 0:
            raise ValueError(f"Отрицательная размерность в строке {self.name}")

    @property
    def is_reference(self) -> bool:
        return self.algebra is None

    @classmethod
    def from_dict(cls, data: dict) -> "CorpusEntry":
        return cls(
            name=data["name"],
            algebra=data.get("algebra"),
            expected_zeta=parse_ratfun(data["expected_zeta"]),
            dim=int(data["dim"]),
            expected_weight=data.get("expected_weight"),
            derived_dim=data.get("derived_dim"),
            source=data.get("source", ""),
            slow=bool(data.get("slow", False)),
        )

    def to_payload(self) -> dict:
        """Запись из встроенных типов для передачи в процесс-обработчик."""
        payload = {item.name: getattr(self, item.name) for item in dataclasses.fields(self)}
        payload["expected_zeta"] = self.expected_zeta.to_json()
        return payload

    @classmethod
    def from_payload(cls, payload: dict) -> "CorpusEntry":
        return cls(**{**payload, "expected_zeta": RationalFunction.from_json(payload["expected_zeta"])})


def load_corpus(path: str = DEFAULT_CORPUS_PATH) -> List[CorpusEntry]:
    """Читает файл корпуса; некорректная строка - ошибка всего файла."""
    with open(os.path.normpath(path), encoding="utf-8") as handle:
        data = json.load(handle)
    entries = [CorpusEntry.from_dict(item) for item in data.get("entries", [])]
    logger.info(f"Loaded {len(entries)} corpus entries from {path}")
    return entries


def filter_entries(entries: Iterable[CorpusEntry], name: Optional[str] = None, dim: Optional[int] = None,
                   weight: Optional[int] = None, include_slow: bool = False,
                   include_reference: bool = True) -> List[CorpusEntry]:
    """
    Отбор строк. name - подстрока имени; weight сравнивается с ожидаемым весом.
    """
    selected = []
    for entry in entries:
        if name is not None and name not in entry.name:
            continue
        if dim is not None and entry.dim != dim:
            continue
        if weight is not None and entry.expected_weight != weight:
            continue
        if entry.slow and not include_slow:
            continue
        if entry.is_reference and not include_reference:
            continue
        selected.append(entry)
    return selected


def _row(entry: CorpusEntry, **values) -> dict:
    row = {"name": entry.name, "dim": entry.dim, "weight": entry.expected_weight,
           "expected": entry.expected_zeta.to_plain(), "computed": None, "status": "error",
           "seconds": 0.0, "omega": None}
    row.update(values)
    return row


def _check_reference(entry: CorpusEntry) -> dict:
    bound = entry.derived_dim if entry.derived_dim is not None else entry.dim
    report = check_invariants(entry.expected_zeta, bound, entry.dim, strict=False)
    if not report.ok:
        logger.error(f"Reference row {entry.name} fails invariant checks: {report.failures}")
        return _row(entry, status="failure")
    omega = format_rational(omega_invariant(entry.expected_zeta))
    return _row(entry, status="reference", omega=omega)


def _run_entry(task: tuple) -> dict:
    """Обработка одной строки; выполняется в процессе-обработчике."""
    payload, config, presets_path, cache_dir = task
    entry = CorpusEntry.from_payload(payload)
    if entry.is_reference:
        return _check_reference(entry)
    start = time.perf_counter()
    try:
        if isinstance(entry.algebra, dict):
            algebra = algebra_from_dict(entry.algebra)
        else:
            algebra = PresetCatalog(presets_path).fetch_algebra(entry.algebra)
        if cache_dir is not None:
            result = ResultManager(config, cache_dir).get_result(algebra)
        else:
            result = topological_rep_zeta(algebra, config)
    except ReductionFailure as e:
        logger.error(f"Reduction failed for {entry.name}: {e}")
        return _row(entry, status="failure", seconds=time.perf_counter() - start)
    except (ZetaError, KeyError, ValueError) as e:
        logger.error(f"Error while computing {entry.name}: {e}")
        return _row(entry, status="error", seconds=time.perf_counter() - start)

    seconds = time.perf_counter() - start
    values = dict(weight=result.weight, computed=result.zeta.to_plain(), seconds=seconds,
                  omega=format_rational(result.omega))
    report = check_invariants(result.zeta, algebra.derived_dim, algebra.dim, strict=False)
    if not report.ok:
        return _row(entry, status="failure", **values)
    if result.zeta != entry.expected_zeta:
        logger.error(f"{entry.name}: expected {entry.expected_zeta}, computed {result.zeta}")
        return _row(entry, status="mismatch", **values)
    if entry.expected_weight is not None and result.weight != entry.expected_weight:
        logger.info(f"{entry.name}: weight {result.weight} differs from tabulated {entry.expected_weight}")
    logger.info(f"Corpus entry {entry.name} passed in {seconds:.2f}s")
    return _row(entry, status="pass", **values)


class CorpusRunner:
    """
    Прогоняет строки корпуса через движок и собирает отчёт.

    Строки выполняются параллельно (до jobs процессов); каждая строка
    считается в одном процессе, порядок строк отчёта совпадает с порядком
    входа.
    """

    def __init__(self, config: Optional[EngineConfig] = None, jobs: int = 1,
                 presets_path: str = DEFAULT_PRESETS_PATH, cache_dir: Optional[str] = None):
        """
        Args:
            config: Параметры движка (внутри строки используется один процесс).
            jobs: Число строк, считаемых одновременно.
            presets_path: Каталог алгебр.
            cache_dir: Директория Parquet-кэша результатов; None - без кэша.
        """
        if jobs < 1:
            raise ValueError(f"Число процессов должно быть положительным: {jobs}")
        self.config = dataclasses.replace(config or EngineConfig(), jobs=1, trace=False)
        self.jobs = jobs
        self.presets_path = presets_path
        self.cache_dir = cache_dir

    def run(self, entries: Iterable[CorpusEntry]) -> pd.DataFrame:
        """
        Returns:
            DataFrame со столбцами REPORT_COLUMNS, по строке на запись корпуса.
        """
        tasks = [(entry.to_payload(), self.config, self.presets_path, self.cache_dir) for entry in entries]
        start = time.perf_counter()
        if self.jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=self.jobs) as executor:
                rows = list(executor.map(_run_entry, tasks))
        else:
            rows = [_run_entry(task) for task in tasks]
        report = pd.DataFrame(rows, columns=REPORT_COLUMNS)
        counts = report["status"].value_counts().to_dict()
        logger.info(f"Corpus run finished in {time.perf_counter() - start:.2f}s: {counts}")
        return report


def summarize(report: pd.DataFrame, by: str = "dim") -> pd.DataFrame:
    """Число строк каждого статуса и суммарное время по группам ("dim" или "weight")."""
    if by not in ("dim", "weight"):
        raise ValueError(f"Группировка возможна только по dim или weight: {by}")
    counts = pd.crosstab(report[by], report["status"]).reindex(columns=list(STATUSES), fill_value=0)
    counts["seconds"] = report.groupby(by)["seconds"].sum()
    return counts


def passed(report: pd.DataFrame) -> bool:
    """True, если нет строк со статусами mismatch/failure/error."""
    return bool(report["status"].isin(["pass", "reference"]).all())


def omega_ratios(report: pd.DataFrame) -> pd.DataFrame:
    """
    Отношения ω(L[eps]) / ω(L) для пар, у которых обе строки в отчёте имеют ω.
    Ожидаемое наблюдение - 3/2; отклонения только логируются.
    """
    omegas = {row.name: row.omega for row in report.itertuples() if row.omega is not None}
    rows = []
    for name, extended in omegas.items():
        if not name.endswith(EPS_SUFFIX):
            continue
        base = omegas.get(name[: -len(EPS_SUFFIX)])
        if base is None or parse_rational(base) == 0:
            continue
        ratio = parse_rational(extended) / parse_rational(base)
        if ratio != QQ(3, 2):
            logger.warning(f"omega ratio for {name} is {format_rational(ratio)}, not 3/2")
        rows.append({"name": name, "base": name[: -len(EPS_SUFFIX)], "ratio": format_rational(ratio)})
    return pd.DataFrame(rows, columns=["name", "base", "ratio"])


def export_report(report: pd.DataFrame, path: str) -> None:
    """Сохраняет отчёт в CSV или Parquet (по расширению файла)."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    if path.endswith(".parquet"):
        report.to_parquet(path, index=False)
    else:
        report.to_csv(path, index=False)
    logger.info(f"Corpus report saved to {path}")


if __name__ == '__main__':
    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(name)s - %(message)s')

    selected = filter_entries(load_corpus(), dim=5)
    corpus_report = CorpusRunner().run(selected)
    print(corpus_report[["name", "expected", "computed", "status"]])
    print(summarize(corpus_report))
