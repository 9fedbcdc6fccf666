"""
tests/conftest.py - 共用 fixtures
"""
import shutil
import tempfile
from pathlib import Path

import pytest

from app.services.planar_core import PlanarEmbedding

# Fixtures 檔案目錄
FIXTURES_DIR = Path(__file__).parent / "fixtures"


@pytest.fixture
def tmp_dir():
    """提供一個臨時目錄，測試結束後自動清除。"""
    d = tempfile.mkdtemp()
    yield Path(d)
    shutil.rmtree(d)


@pytest.fixture
def k4():
    """K4：中心 0，外圈 1-2-3；四個 3-面。"""
    return PlanarEmbedding(((1, 2, 3), (0, 3, 2), (0, 1, 3), (0, 2, 1)))


@pytest.fixture
def k3():
    return PlanarEmbedding(((1, 2), (2, 0), (0, 1)))


@pytest.fixture
def c4():
    """4-圈 0-1-2-3（二部圖）。"""
    return PlanarEmbedding(((1, 3), (2, 0), (3, 1), (0, 2)))


@pytest.fixture
def path2():
    """單一條邊 0-1。"""
    return PlanarEmbedding(((1,), (0,)))


@pytest.fixture
def path3():
    """路徑 0-1-2。"""
    return PlanarEmbedding(((1,), (0, 2), (1,)))


@pytest.fixture
def star3():
    """K1,3：中心 0，葉 1、2、3。"""
    return PlanarEmbedding(((1, 2, 3), (0,), (0,), (0,)))


@pytest.fixture
def k4_path():
    return FIXTURES_DIR / "K4.pg"


@pytest.fixture
def empty_ptc_path():
    return FIXTURES_DIR / "empty.ptc"
