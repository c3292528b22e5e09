import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from scalesq import Geometry

settings.register_profile(
    "fast",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("fast")


@pytest.fixture
def geom_small() -> Geometry:
    return Geometry(1, 256, 16.0)


@pytest.fixture
def geom_2d_small() -> Geometry:
    return Geometry(2, 64, 8.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
