import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gesturebot.ik import BmaParams, solve_ik
from gesturebot.kinematics import DEFAULT_LIMITS, LinkLengths, Pose9, fk_array


@pytest.fixture(scope="session")
def links():
    return LinkLengths()


@pytest.fixture(scope="session")
def limits():
    return DEFAULT_LIMITS


def random_valid_angles(rng, n=None):
    size = (n, 8) if n is not None else 8
    return rng.uniform(DEFAULT_LIMITS.lower, DEFAULT_LIMITS.upper, size)


@pytest.fixture(scope="session")
def solve_batch():
    """100 solves of FK-generated targets with default parameters.

    Shared by the acceptance criteria on solve quality, monotonicity and
    the round-trip property; computing it once keeps the suite fast.
    """
    rng = np.random.default_rng(42)
    runs = []
    for trial in range(100):
        theta = random_valid_angles(rng)
        target = Pose9.from_array(fk_array(theta))
        report = solve_ik(target, BmaParams(rng_seed=1000 + trial))
        runs.append((theta, target, report))
    return runs
