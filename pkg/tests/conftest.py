import random

import pytest

from baitline import LoopbackTransport, Runtime, Store, StubProvider
from baitline.simulate import DEFAULT_PERSONA


@pytest.fixture
def store(tmp_path):
    return Store(tmp_path / "log.jsonl")


@pytest.fixture
def transport():
    return LoopbackTransport()


@pytest.fixture
def runtime(store, transport):
    rt = Runtime(store, transport, StubProvider(seed=7))
    rt.ensure_persona(DEFAULT_PERSONA)
    return rt


@pytest.fixture
def rng():
    return random.Random(0xBA17)
