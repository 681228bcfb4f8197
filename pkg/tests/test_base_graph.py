import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from lift_graph.base_graph import (
    directed_h1,
    dump_instance,
    extra_edges,
    h2_neighbors,
    load_instance,
    parse_instance,
    random_instance,
    residual_graph,
    union_subgraph,
    validate,
)
from lift_graph.errors import InstanceFormatError
from lift_graph.oracle import odd_cycle_bruteforce
from models import BaseInstance

K5_TEXT = """
# K5
k 5
edges
0 1
0 2
0 3
0 4
1 2
1 3
1 4
2 3
2 4
3 4
h1 0 1 2 3 4
h2 2 4 1 3 0
"""


class TestParse:
    def test_h2_is_rotated_to_h1_start(self):
        inst = parse_instance(K5_TEXT, name="k5")
        assert inst.h2_order == [0, 2, 4, 1, 3]
        assert inst.name == "k5"

    @pytest.mark.parametrize(
        "text",
        [
            "k 5\nedges\n0 1\nh1 0 1 2 3 4\n",
            "k five\n",
            "k 5\nedges\n0 1 2\nh1 0 1 2 3 4\nh2 0 2 4 1 3\n",
            "k 5\nedges\n0 9\nh1 0 1 2 3 4\nh2 0 2 4 1 3\n",
            "k 5\nh1 0 1 2 3\nh2 0 2 4 1 3\n",
            "k 5\nwhat is this\n",
        ],
    )
    def test_format_errors(self, text):
        with pytest.raises(InstanceFormatError):
            parse_instance(text)

    def test_missing_file(self, tmp_path):
        with pytest.raises(InstanceFormatError):
            load_instance(str(tmp_path / "nope.txt"))

    def test_dump_then_parse(self, k7):
        again = parse_instance(dump_instance(k7), name=k7.name)
        assert again == k7


class TestValidate:
    def test_k7_passes(self, k7):
        report = validate(k7)
        assert report.passed
        assert report.min_degree == 6

    def test_k5_needs_override(self, k5):
        report = validate(k5)
        assert report.min_degree == 4
        assert not report.min_degree_ok
        assert report.hamilton_ok and report.non_bipartite_ok
        assert not report.passed
        assert validate(k5, allow_min_degree=4).passed

    def test_shared_edge_between_cycles(self, k5):
        inst = BaseInstance(k=5, edges=k5.edges, h1_order=k5.h1_order, h2_order=[0, 1, 3, 2, 4])
        report = validate(inst, allow_min_degree=4)
        assert not report.hamilton_ok
        assert "共享边" in report.hamilton_detail

    def test_missing_cycle_edge(self, k5):
        edges = [e for e in k5.edges if e != (0, 2)]
        inst = BaseInstance(k=5, edges=edges, h1_order=k5.h1_order, h2_order=k5.h2_order)
        report = validate(inst, allow_min_degree=3)
        assert not report.hamilton_ok
        assert "(0, 2)" in report.hamilton_detail

    def test_bipartite_union(self, bipartite8):
        report = validate(bipartite8, allow_min_degree=4)
        assert report.hamilton_ok
        assert not report.non_bipartite_ok
        assert not report.passed
        assert not odd_cycle_bruteforce(union_subgraph(bipartite8))


def test_directed_h1_orientations(k7):
    fwd = directed_h1(k7)
    rev = directed_h1(k7, reverse=True)
    for v in range(7):
        assert fwd.succ[v] == (v + 1) % 7
        assert rev.succ[v] == fwd.pred[v]
        assert fwd.pred[fwd.succ[v]] == v


def test_h2_neighbors(k7):
    nbrs = h2_neighbors(k7)
    assert set(nbrs[0]) == {2, 5}
    assert all(len(set(pair)) == 2 for pair in nbrs.values())


def test_extra_edges(k7, circulant9):
    assert extra_edges(k7)[0] == (0, 3)
    assert len(extra_edges(k7)) == 7
    assert extra_edges(circulant9)[0] == (0, 4)
    assert len(extra_edges(circulant9)) == 9


def test_residual_graph_drops_h1(k7):
    g1 = residual_graph(k7)
    assert g1.number_of_edges() == 21 - 7
    assert not any(g1.has_edge(u, v) for u, v in k7.h1_edges())
    assert min(d for _, d in g1.degree()) == 4


def test_random_instance_rejects_small_k():
    with pytest.raises(ValueError):
        random_instance(5, np.random.default_rng(0))


@hyp_settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(6, 11))
def test_random_instance_is_valid(seed, k):
    inst = random_instance(k, np.random.default_rng(seed))
    assert inst.k == k
    assert validate(inst).passed
    assert inst.h2_order[0] == inst.h1_order[0]
