import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_direction(rng, n):
    return rng.normal(size=n) + 1j * rng.normal(size=n)
