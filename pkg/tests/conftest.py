import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # makes `oracle` importable

from sawlab.fixtures import fixture_corpus  # noqa: E402


@pytest.fixture(scope="session")
def corpus():
    """The constructed pattern-bearing polygon corpus (built once)."""
    return fixture_corpus()
