import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cplxdyn import Hamiltonian, rational

SCENARIOS = Path(__file__).parent.parent / "scenarios"


@pytest.fixture(scope="session")
def quartic():
    return Hamiltonian(2, rational([0, 0, 0, 0, -1]), 1.0)


@pytest.fixture(scope="session")
def two_pole():
    # V(x) = x / (1 + x^2)
    return rational([0, 1], [1, 0, 1])


@pytest.fixture(scope="session")
def two_pole_pt():
    # V(x) = i x / (1 + x^2)
    return rational([0, 1j], [1, 0, 1])
