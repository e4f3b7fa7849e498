import hashlib
import json
import logging
import os
from typing import Optional

import pandas as pd

from src.analysis.engine import EngineConfig, ZetaResult, topological_rep_zeta
from src.analysis.lie import NilpotentLieAlgebra
from src.core.config import DEFAULT_CACHE_DIR
from src.core.exact import RationalFunction, parse_rational

logger = logging.getLogger(__name__)

CACHE_COLUMNS = ["name", "num", "den", "omega", "weight", "piece_count", "reduction_count", "seconds"]


class ResultManager:
    """
    Отвечает за получение и кэширование вычисленных дзета-функций.
    Вычисляет результат через движок и сохраняет его в локальном кэше
    (Parquet файлы), чтобы повторные запуски корпуса не пересчитывали
    уже известные алгебры.
    """

    def __init__(self, config: Optional[EngineConfig] = None, cache_dir: str = DEFAULT_CACHE_DIR):
        """
        Инициализирует ResultManager.

        Args:
            config: Параметры движка (в ключ кэша входят только влияющие на результат).
            cache_dir: Директория для хранения кэшированных файлов.
        """
        self.config = config or EngineConfig()
        self.cache_dir = cache_dir
        os.makedirs(self.cache_dir, exist_ok=True)

    def _generate_cache_filename(self, algebra: NilpotentLieAlgebra) -> str:
        """
        Имя файла кэша: хэш канонических структурных констант и параметров движка.
        """
        options = json.dumps(self.config.cache_options(), sort_keys=True)
        unique_string = f"{algebra.canonical_key()}_{options}"
        hash_suffix = hashlib.sha256(unique_string.encode()).hexdigest()[:16]
        return os.path.join(self.cache_dir, f"zeta_{algebra.dim}_{hash_suffix}.parquet")

    def get_result(self, algebra: NilpotentLieAlgebra, force_refresh: bool = False) -> ZetaResult:
        """
        Возвращает дзета-функцию алгебры: из кэша или вычисляя заново.

        Args:
            algebra: Проверенная алгебра.
            force_refresh: Если True, результат пересчитывается даже при наличии кэша.

        Returns:
            ZetaResult (при чтении из кэша без журнала вычисления).
        """
        cache_filepath = self._generate_cache_filename(algebra)
        if not force_refresh and os.path.exists(cache_filepath):
            try:
                logger.info(f"Loading result for {algebra.name} from cache: {cache_filepath}")
                return self._from_frame(pd.read_parquet(cache_filepath))
            except Exception as e:
                logger.warning(f"Error reading from cache file {cache_filepath}: {e}. Recomputing.")
        return self._compute_and_cache(algebra, cache_filepath)

    def _compute_and_cache(self, algebra: NilpotentLieAlgebra, cache_filepath: str) -> ZetaResult:
        logger.info(f"Computing zeta function of {algebra.name}")
        result = topological_rep_zeta(algebra, self.config)
        try:
            self._to_frame(result).to_parquet(cache_filepath)
            logger.info(f"Result for {algebra.name} cached to {cache_filepath}")
        except Exception as e:
            logger.error(f"Error saving result to cache file {cache_filepath}: {e}")
        return result

    @staticmethod
    def _to_frame(result: ZetaResult) -> pd.DataFrame:
        data = result.zeta.to_json()
        return pd.DataFrame([{
            "name": result.name,
            "num": json.dumps(data["num"]),
            "den": json.dumps(data["den"]),
            "omega": result.to_json()["omega"],
            "weight": result.weight,
            "piece_count": result.piece_count,
            "reduction_count": result.reduction_count,
            "seconds": result.seconds,
        }], columns=CACHE_COLUMNS)

    @staticmethod
    def _from_frame(frame: pd.DataFrame) -> ZetaResult:
        if frame.empty or list(frame.columns) != CACHE_COLUMNS:
            raise ValueError("Неожиданная структура файла кэша")
        row = frame.iloc[0]
        zeta = RationalFunction.from_json({"num": json.loads(row["num"]), "den": json.loads(row["den"])})
        return ZetaResult(
            zeta=zeta,
            omega=parse_rational(row["omega"]),
            weight=int(row["weight"]),
            piece_count=int(row["piece_count"]),
            reduction_count=int(row["reduction_count"]),
            seconds=float(row["seconds"]),
            name=str(row["name"]),
        )

    def clear(self) -> int:
        """Удаляет все файлы кэша; возвращает их число."""
        removed = 0
        for filename in os.listdir(self.cache_dir):
            if filename.startswith("zeta_") and filename.endswith(".parquet"):
                os.remove(os.path.join(self.cache_dir, filename))
                removed += 1
        logger.info(f"Removed {removed} cached results from {self.cache_dir}")
        return removed


if __name__ == '__main__':
    from src.data_ingestion.preset_catalog import PresetCatalog

    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(name)s - %(message)s')

    catalog = PresetCatalog()
    manager = ResultManager()
    heisenberg = catalog.fetch_algebra("L_{3,2}")

    print("\n1. First computation (should compute):")
    print(manager.get_result(heisenberg).zeta)
    print("\n2. Second call (should load from cache):")
    print(manager.get_result(heisenberg).zeta)
    print("\n3. force_refresh=True (should recompute):")
    print(manager.get_result(heisenberg, force_refresh=True).zeta)
