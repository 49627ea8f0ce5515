import numpy as np
import pytest

# two points whose unit-peak kernel value is exactly 0.5 at sigma = 1
HALF_GAP = np.sqrt(2.0 * np.log(2.0))


@pytest.fixture
def half_pair():
    return np.array([[0.0], [HALF_GAP]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_datasets(count, n_max=100, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(5, n_max + 1))
        d = int(rng.integers(1, 4))
        X = rng.normal(size=(n, d)) * rng.uniform(0.5, 2.0)
        sigma = float(rng.uniform(0.3, 2.0))
        out.append((X, sigma))
    return out
