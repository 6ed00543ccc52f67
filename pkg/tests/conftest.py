import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from convexdiv.body import Ellipsoid, Polytope, RoundedPolygon, SmoothBody2D

settings.register_profile(
    "repro", derandomize=True, deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repro")


@pytest.fixture(scope="session")
def disk():
    return Ellipsoid.ball(2)


@pytest.fixture(scope="session")
def ellipse():
    return Ellipsoid.from_axes([2.0, 1.0])


@pytest.fixture(scope="session")
def trefoil():
    # h = 1 + 0.1 cos 3t
    return SmoothBody2D.from_fourier(1.0, [0.0, 0.0, 0.1])


@pytest.fixture(scope="session")
def square():
    return Polytope.cube(2)


@pytest.fixture(scope="session")
def hexagon():
    return Polytope.regular_polygon(6)


@pytest.fixture(scope="session")
def cube3():
    return Polytope.cube(3)


@pytest.fixture(scope="session")
def rounded_square():
    return RoundedPolygon([[1, 1], [-1, 1], [-1, -1], [1, -1]], 0.1)


def rotation(t):
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s], [s, c]])
