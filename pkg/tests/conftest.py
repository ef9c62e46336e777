import numpy as np
import pytest

from drmel import BasisSpec, TwoSampleData


@pytest.fixture
def rng():
    return np.random.default_rng(20240819)


def random_two_sample(rng, max_n0=50, max_n1=50, positive=False):
    n0 = int(rng.integers(2, max_n0 + 1))
    n1 = int(rng.integers(2, max_n1 + 1))
    if positive:
        x0 = rng.exponential(1.0, n0)
        x1 = rng.exponential(1.5, n1)
    else:
        x0 = rng.normal(0.0, 1.0, n0)
        x1 = rng.normal(0.3, 1.2, n1)
    return TwoSampleData(x0=x0, x1=x1)


def random_basis(rng):
    return BasisSpec.linear() if rng.random() < 0.5 else BasisSpec.quadratic()
