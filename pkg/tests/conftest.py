from pathlib import Path

import pytest

from purebudget.protocols import load_registry
from purebudget.search import SearchSpace

DATA_DIR = Path(__file__).parent / "data"
ANCHOR_REGISTRY = DATA_DIR / "jansen_r4_anchored.json"


@pytest.fixture(scope="session")
def registry():
    return load_registry(ANCHOR_REGISTRY)


@pytest.fixture(scope="session")
def space(registry):
    return SearchSpace(registry)


@pytest.fixture(scope="session")
def bbpssw(registry):
    return registry.get("bbpssw")


@pytest.fixture(scope="session")
def jansen_r4(registry):
    return registry.get("r4-anchored")
