import functools

import pytest

from weylvol import build_root_system


@functools.lru_cache(maxsize=None)
def rs_of(label):
    return build_root_system(label)


@pytest.fixture
def A1():
    return rs_of("A1")


@pytest.fixture
def A2():
    return rs_of("A2")


@pytest.fixture
def B2():
    return rs_of("B2")


@pytest.fixture
def G2():
    return rs_of("G2")
