import math

import pytest

from rvpmodes.equilibria import gaussian_profile, juttner
from rvpmodes.spectral import ModeSpec, threshold_plasma


@pytest.fixture(scope="session")
def eq02():
    return juttner(0.2)


@pytest.fixture(scope="session")
def kappa_crit_02(eq02):
    return math.sqrt(threshold_plasma(eq02).kappa_crit_sq)


@pytest.fixture(scope="session")
def mode02(eq02):
    return ModeSpec(kappa=1.0, sigma=+1, equilibrium=eq02,
                    profile=gaussian_profile(1.0, 1.0))
