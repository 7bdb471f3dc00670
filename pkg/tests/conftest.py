import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lprl import ConstructionCache, ExpLadder


@pytest.fixture(scope="session")
def ladder02():
    return ExpLadder(0.0, 2.0)


@pytest.fixture(scope="session")
def cache02(ladder02):
    """One shared (a=0, q=2) cache; nodes are pure so sharing is safe."""
    return ConstructionCache(ladder02)
