import numpy as np
import pytest

from stirap.hamiltonian import TransmonParams
from stirap.pulses import SequenceKind, build_sequence
from stirap.units import mhz_to_rad_ns

OMEGA01 = mhz_to_rad_ns(43.4)
OMEGA12 = mhz_to_rad_ns(38.2)
SIGMA = 45.0
T_SEP = -90.0


@pytest.fixture(scope="session")
def device_params():
    return TransmonParams()


@pytest.fixture(scope="session")
def stirap_sequence():
    return build_sequence(SequenceKind.STIRAP, omega01=OMEGA01, omega12=OMEGA12,
                          sigma=SIGMA, t_s=T_SEP)


@pytest.fixture()
def rng():
    return np.random.default_rng(20160212)
