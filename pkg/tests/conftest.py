import numpy as np
import pytest

from bandsense.geometry import RobotGeometry


@pytest.fixture
def geom():
    """The bench robot: 6.6 cm diameter, 7.6 cm band spacing, 15 bands."""
    return RobotGeometry(0.066, 0.076, 15)


@pytest.fixture
def geom2():
    return RobotGeometry(0.066, 0.076, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
