import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from novikov.jets import DecayWarning, Jet3

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def reference_history():
    from novikov.acceptance import reference_history as ref
    return ref()


@pytest.fixture(scope="session")
def short_history():
    """Reference data run to t = 0.2 on a coarser grid; quick to build."""
    from novikov.jets import SpaceGrid
    from novikov.solver import CauchyProblem, SolverConfig, run
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DecayWarning)
        return run(CauchyProblem.gaussian(0.5), SolverConfig(SpaceGrid(15.0, 1025), 2e-3, 0.2))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_jet(rng, n=1000, scale=1.0):
    t, x = rng.uniform(-2, 2, (2, n))
    return Jet3(t, x, *rng.uniform(-scale, scale, (7, n)))
