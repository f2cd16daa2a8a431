from __future__ import annotations

from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def wordnet_dir() -> Path:
    return FIXTURES / "wordnet"


@pytest.fixture(scope="session")
def zeroshot_dir() -> Path:
    return FIXTURES / "zeroshot"
