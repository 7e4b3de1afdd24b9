import numpy as np
import pytest

from renlab import models
from renlab.surfaces import BoundaryCurve, solve_minimal_graph


@pytest.fixture(scope="session")
def h3():
    return models.Hyperbolic3()


@pytest.fixture(scope="session")
def hm():
    return models.HorowitzMyers()


@pytest.fixture(scope="session")
def equator(h3):
    return solve_minimal_graph(h3, BoundaryCurve("sphere", np.pi / 2))


@pytest.fixture(scope="session")
def cap(h3):
    return solve_minimal_graph(h3, BoundaryCurve("sphere", np.pi / 3))


@pytest.fixture(scope="session")
def perturbed(h3):
    return solve_minimal_graph(h3, BoundaryCurve("sphere", np.pi / 3, 0.05, 2))


@pytest.fixture(scope="session")
def hm_slice(hm):
    return solve_minimal_graph(hm, BoundaryCurve("torus", 0.1, period=hm.theta_period))
