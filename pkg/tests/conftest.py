from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from painleve_instantons.transseries import table_build

BIG_P = 120
BIG_M = 250


@pytest.fixture(scope="session")
def big_table():
    """Real table covering the m = 250 diagnostic sequences at 120 digits."""
    return table_build(2 * BIG_M + 2, 6, "real", BIG_P)
