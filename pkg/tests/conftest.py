import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import tile_distances  # noqa: E402


@pytest.fixture(scope="session")
def eight_unit():
    return tile_distances(3, 3, weighted=False)


@pytest.fixture(scope="session")
def eight_weighted():
    return tile_distances(3, 3, weighted=True)


@pytest.fixture(scope="session")
def eight_unit_blank_last():
    return tile_distances(3, 3, weighted=False, blank_first=False)
