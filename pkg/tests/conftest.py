import numpy as np
import pytest

from antsweep.tsp import City, DistanceMatrix, Instance


def make_instance(coords, name="test") -> Instance:
    cities = tuple(City(i, float(x), float(y)) for i, (x, y) in enumerate(coords))
    return Instance(name=name, n=len(cities), cities=cities)


def random_instance(seed, n, name=None) -> Instance:
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 100.0, size=(n, 2))
    return make_instance(pts, name=name or f"rand{n}_{seed}")


@pytest.fixture
def square4() -> Instance:
    # unit-ish square, side 10: optimal tour length 40
    return make_instance([(0, 0), (10, 0), (10, 10), (0, 10)], name="square4")


@pytest.fixture
def square4_dmat(square4) -> np.ndarray:
    return DistanceMatrix.from_instance(square4).d
