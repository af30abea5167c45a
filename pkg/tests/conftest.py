from pathlib import Path

import pytest

from ssiarch.kb import builtin_kb


@pytest.fixture(scope="session")
def kb():
    return builtin_kb()


@pytest.fixture(scope="session")
def datadir():
    return Path(__file__).resolve().parent.parent / "samples"
