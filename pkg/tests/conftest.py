import random

import pytest

from decflow.graph import build


@pytest.fixture
def triangle():
    return build([(1, 2, 1.0), (2, 3, 2.0), (1, 3, 3.0)])


@pytest.fixture
def rng():
    return random.Random(12345)


def path_graph(n, w=1.0):
    return build([(i, i + 1, w) for i in range(1, n)])


def cycle_graph(n, w=1.0):
    return build([(i, i % n + 1, w) for i in range(1, n + 1)])


def clique(vertices, w=1.0):
    vs = list(vertices)
    return [(a, b, w) for i, a in enumerate(vs) for b in vs[i + 1:]]
