import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci",
    max_examples=50,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_simplex(rng: np.random.Generator, n: int, floor: float = 0.0) -> np.ndarray:
    w = rng.random(n) + floor
    return w / w.sum()
