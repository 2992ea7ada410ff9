from __future__ import annotations

import numpy as np
import pytest

import fixtures
from toric.pointconfig import PointConfig

SQRT2 = float(np.sqrt(2.0))


@pytest.fixture
def line() -> PointConfig:
    return fixtures.load_config(fixtures.fixture_path("line"))


@pytest.fixture
def five() -> PointConfig:
    return fixtures.load_config(fixtures.fixture_path("five_point"))


@pytest.fixture
def triangle() -> PointConfig:
    return fixtures.load_config(fixtures.fixture_path("triangle"))


@pytest.fixture
def a1() -> PointConfig:
    return fixtures.load_config(fixtures.fixture_path("a1"))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240607)
