import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from horocurv.surfaces import preset


@pytest.fixture(scope="session")
def flat():
    return preset("flat")


@pytest.fixture(scope="session")
def hyp():
    return preset("hyperbolic")


@pytest.fixture(scope="session")
def hyp2():
    return preset("hyperbolic-a", a=2.0)


@pytest.fixture(scope="session")
def bump():
    return preset("gaussian-bump")
