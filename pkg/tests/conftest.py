import pytest

from src.data_ingestion.preset_catalog import PresetCatalog


@pytest.fixture(scope="session")
def catalog():
    return PresetCatalog()


@pytest.fixture(scope="session")
def heisenberg(catalog):
    return catalog.fetch_algebra("L_{3,2}")


@pytest.fixture
def cache_dir(tmp_path):
    path = tmp_path / "cache"
    path.mkdir()
    return str(path)
