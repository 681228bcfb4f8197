"""
测试共享夹具
"""

import numpy as np
import pytest

from lift_graph.base_graph import load_instance
from lift_graph.lift import LiftState
from models import BaseInstance
from settings import settings


@pytest.fixture
def k5() -> BaseInstance:
    return load_instance(settings.fixture_path("k5"))


@pytest.fixture
def k7() -> BaseInstance:
    return load_instance(settings.fixture_path("k7"))


@pytest.fixture
def circulant9() -> BaseInstance:
    return load_instance(settings.fixture_path("circulant9"))


@pytest.fixture
def bipartite8() -> BaseInstance:
    """H1 ∪ H2 为二部图的 4-正则算例"""
    return BaseInstance(
        k=8,
        edges=[(i, (i + 1) % 8) for i in range(8)] + [(0, 3), (3, 6), (6, 1), (1, 4), (4, 7), (7, 2), (2, 5), (5, 0)],
        h1_order=list(range(8)),
        h2_order=[0, 3, 6, 1, 4, 7, 2, 5],
        name="bipartite8",
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def complete_lift(k7) -> LiftState:
    """n = 1 且全部揭示的 K7 提升：任意顶点顺序都是路径"""
    lift = LiftState.from_instance(k7, 1, np.random.default_rng(0))
    lift.finalize()
    return lift
