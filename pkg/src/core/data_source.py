from abc import ABC, abstractmethod

from src.analysis.lie import NilpotentLieAlgebra


class AlgebraSource(ABC):
    """
    Абстрактный базовый класс для источников алгебр Ли.
    Определяет интерфейс для получения структурных констант по имени.
    """

    @abstractmethod
    def fetch_algebra(self, name: str) -> NilpotentLieAlgebra:
        """
        Возвращает проверенную алгебру по имени или выражению.

        Args:
            name: Имя алгебры (например, "L_{4,3}") или выражение конструктора,
                  если источник их поддерживает.

        Returns:
            NilpotentLieAlgebra, прошедшая validate.

        Raises:
            KeyError: если имя неизвестно источнику.
        """
        pass

    @abstractmethod
    def get_available_names(self) -> list[str]:
        """
        Возвращает список имён, известных источнику.
        """
        pass

    @abstractmethod
    def get_info(self, name: str) -> dict:
        """
        Возвращает справочную информацию об алгебре (размерность, ступень,
        размерность производной подалгебры, происхождение данных).
        """
        pass
