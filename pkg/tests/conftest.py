import json
import os

import numpy as np
import pytest


DATA = os.path.join(os.path.dirname(__file__), "data")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(autouse=True)
def singleThread(monkeypatch):
    monkeypatch.setenv("POLYENSEMBLE_THREADS", "1")


@pytest.fixture(scope="session")
def specialReference():
    with open(os.path.join(DATA, "special_reference.json")) as handle:
        return json.load(handle)
