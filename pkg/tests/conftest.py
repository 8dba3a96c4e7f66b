import math

import numpy as np
import pytest

from qutrit_kcbs.ngon import compatibility_angle

THETA5 = compatibility_angle(5)
TABLE_S2_N = (5, 7, 11, 17, 23, 31, 41, 51, 61, 81, 101, 121)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rho0():
    return np.diag([1.0, 0.0, 0.0]).astype(complex)
