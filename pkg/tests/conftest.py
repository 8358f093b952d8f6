"""Shared fixtures: standard media, profiles, and search rectangles."""

import warnings

import numpy as np
import pytest

from itep.determinant import determinant_function
from itep.medium import MediumField, restrict_to_ray
from itep.spectra import SearchRectangle

# Constant-index balls centered at the origin violate the n(0)=1 convention
# on purpose; the construction warns once, which is noise in a test run.
from itep.medium import NonUnitOriginIndexWarning

warnings.filterwarnings("ignore", category=NonUnitOriginIndexWarning)

EZ = np.array([0.0, 0.0, 1.0])
EX = np.array([1.0, 0.0, 0.0])


@pytest.fixture(scope="session")
def ball4():
    return MediumField.uniform_ball([0.0, 0.0, 0.0], 1.0, 4.0)


@pytest.fixture(scope="session")
def profile4(ball4):
    return restrict_to_ray(ball4, EZ)


@pytest.fixture(scope="session")
def det4(profile4):
    return determinant_function(0, profile4, 1.0)


@pytest.fixture(scope="session")
def background():
    return MediumField.background()


@pytest.fixture(scope="session")
def profile1(background):
    return restrict_to_ray(background, EZ)


@pytest.fixture(scope="session")
def two_balls():
    return MediumField.union_of_balls(
        [([2.0, 0.0, 0.0], 1.0, 2.25), ([5.0, 0.0, 0.0], 1.0, 2.25)]
    )


@pytest.fixture(scope="session")
def thin_rect():
    return SearchRectangle(0.5, 25.0, -0.25, 0.25)


def oracle_det4(k):
    """Closed-form determinant for the n0=4 unit ball at l=0.

    Substitutes y(r) = sin(2kr)/(2k) and j_0(kr) = sin(kr)/(kr) into the
    interface determinant at r = 1, written out independently of the
    library code:  D = -j_0(k) y'(1) + j_0(k) y(1) + k j_0'(k) y(1).
    Simplifies to sin^3(k)/k but kept in raw substituted form as an
    independent oracle.
    """
    k = complex(k)
    if k == 0:
        return 0.0
    j0 = np.sin(k) / k
    j0p = (np.cos(k) * k - np.sin(k)) / k**2
    y = np.sin(2 * k) / (2 * k)
    yp = np.cos(2 * k)
    return -j0 * yp + j0 * y + k * j0p * y
