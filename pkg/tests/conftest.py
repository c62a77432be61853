import warnings

import numpy as np
import pytest

from hyperconnect.errors import ReducibleWarning, SlowConvergence
from hyperconnect.params import ParameterSet

# fixed reference set used across modules; beta_3 = -2.05
ALPHA3 = (0.3, 0.5, 0.7)
BETA3 = (1.4, 2.15)


@pytest.fixture
def p3():
    return ParameterSet(ALPHA3, BETA3)


@pytest.fixture
def p2():
    # beta_2 = -0.65
    return ParameterSet((0.3, 0.5), (1.45,))


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture(autouse=True)
def _quiet_expected_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ReducibleWarning)
        warnings.simplefilter("ignore", SlowConvergence)
        yield
