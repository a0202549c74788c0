import os

import pytest


DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")


@pytest.fixture
def data_file():
    def _path(name):
        return os.path.join(DATA_DIR, name)

    return _path


@pytest.fixture
def golden():
    def _read(name):
        with open(os.path.join(GOLDEN_DIR, name), "r", encoding="utf-8") as f:
            return f.read()

    return _read
