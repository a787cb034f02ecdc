import os

import pytest

from bankit.core import nabla, parse_ban

DATA = os.path.join(os.path.dirname(__file__), "..", "data")


def case_table_sign(ban, x, j, i):
    """Independent case-split oracle for the punctual influence sign."""
    unstable_here = i in ban.unstable_set(x)
    flipped = x.flip(j)
    unstable_there = i in ban.unstable_set(flipped)
    if j != i:
        if unstable_here and unstable_there:
            return 0
        if unstable_here and not unstable_there:
            return -nabla(x, i) * nabla(x, j)
        if not unstable_here and unstable_there:
            return nabla(x, i) * nabla(x, j)
        return 0
    if unstable_here and unstable_there:
        return -1
    if not unstable_here and not unstable_there:
        return 1
    return 0


def load(name):
    with open(os.path.join(DATA, name), "r", encoding="utf-8") as fh:
        return parse_ban(fh.read())


@pytest.fixture(scope="session")
def ban5():
    return load("sample5.ban")


@pytest.fixture(scope="session")
def ban4():
    return load("sample4.ban")


@pytest.fixture(scope="session")
def sample5_path():
    return os.path.join(DATA, "sample5.ban")


@pytest.fixture(scope="session")
def sample4_path():
    return os.path.join(DATA, "sample4.ban")
