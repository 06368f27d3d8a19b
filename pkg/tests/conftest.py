import numpy as np
import pytest

from polyproj import Polyhedron


@pytest.fixture
def orthant():
    """Nonpositive quadrant {h1 <= 0, h2 <= 0}."""
    return Polyhedron.from_arrays([[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20240519)
