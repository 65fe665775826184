from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from ridgesearch.core.circle_oracle import CircleModel, sample_circle

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def circle_model() -> CircleModel:
    return CircleModel(r=1.0, sigma=0.1)


@pytest.fixture(scope="session")
def circle_cloud(circle_model):
    return sample_circle(circle_model, 200, seed=0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def galaxy_slice() -> Path:
    return FIXTURES / "galaxy_slice.csv"
