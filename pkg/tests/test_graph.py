import pytest

from decflow.graph import GraphError, Hypergraph, bounded_ball, build, delete_edge, increase_weight
from decflow.oracles import oracle_dijkstra

from conftest import cycle_graph, path_graph


def test_build_symmetrizes():
    g = build([(1, 2, 1)])
    assert g.edges == {(1, 2): 1.0, (2, 1): 1.0}


def test_build_isolated_vertices():
    g = build([], vertices=[1, 2, 3])
    assert g.n == 3 and g.m == 0


def test_build_triangle_records(triangle):
    assert len(triangle.edges) == 6
    assert triangle.version == 0


@pytest.mark.parametrize("edges", [
    [(1, 1, 1.0)],
    [(1, 2, 0.0)],
    [(1, 2, -1.0)],
    [(1, 2, 1.0), (2, 1, 1.0)],
])
def test_build_rejects_bad_input(edges):
    with pytest.raises(GraphError):
        build(edges)


def test_delete_leaves_path(triangle):
    delete_edge(triangle, 1, 2)
    assert not triangle.has_edge(1, 2) and not triangle.has_edge(2, 1)
    assert triangle.has_edge(1, 3) and triangle.has_edge(3, 2)


def test_delete_then_query_errors(triangle):
    delete_edge(triangle, 1, 2)
    with pytest.raises(GraphError):
        triangle.weight(1, 2)
    with pytest.raises(GraphError):
        delete_edge(triangle, 2, 1)


def test_delete_all_of_k3(triangle):
    for u, v in [(1, 2), (2, 3), (1, 3)]:
        delete_edge(triangle, u, v)
    assert triangle.version == 3
    assert triangle.edges == {}


def test_increase_sets_both_records(triangle):
    increase_weight(triangle, 1, 2, 5)
    assert triangle.weight(1, 2) == triangle.weight(2, 1) == 5


def test_decrease_rejected(triangle):
    increase_weight(triangle, 1, 2, 5)
    with pytest.raises(GraphError):
        increase_weight(triangle, 1, 2, 3)


def test_equal_weight_bumps_version(triangle):
    increase_weight(triangle, 1, 2, 1)
    assert triangle.weight(1, 2) == 1
    assert triangle.version == 1


def test_replay_matches_current(triangle):
    increase_weight(triangle, 1, 2, 4)
    delete_edge(triangle, 2, 3)
    assert triangle.replay().edges == triangle.edges
    assert triangle.replay(upto=1).edges == {**triangle.edges, (2, 3): 2.0, (3, 2): 2.0}


def test_ball_on_path():
    g = path_graph(3)
    assert bounded_ball(g.adj, {1}, 1) == {1: 0.0, 2: 1.0}
    assert bounded_ball(g.adj, {1}, 0) == {1: 0.0}


def test_ball_on_cycle_matches_dijkstra():
    g = cycle_graph(5)
    ball = g.bounded_ball({1}, 2)
    assert len(ball) == 5
    dist = oracle_dijkstra(g, {1})
    assert all(ball[v] == dist[v] <= 2 for v in ball)


def test_hypergraph_views():
    h = Hypergraph({1, 2, 3, 4}, [{1, 2, 3}, {3, 4}])
    assert h.size == 5
    assert h.neighbors()[3] == {1, 2, 4}
    assert h.induced({1, 4}).hyperedges == [frozenset({1}), frozenset({4})]
    with pytest.raises(GraphError):
        Hypergraph({1}, [{1, 2}])
