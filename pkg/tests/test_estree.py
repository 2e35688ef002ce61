import math
import random

import pytest

from decflow.estree import es_delete, es_increase, es_init, es_threshold_subpath
from decflow.graph import GraphError, bounded_ball
from decflow.suites import random_graph

from conftest import cycle_graph, path_graph

INF = math.inf


def test_levels_on_path():
    t = es_init(path_graph(3), {1}, depth=10)
    assert [t.dist(v) for v in (1, 2, 3)] == [0, 1, 2]


def test_depth_cutoff():
    t = es_init(path_graph(3), {1}, depth=1)
    assert t.dist(2) == 1 and t.dist(3) == INF


def test_random_levels_match_capped_dijkstra():
    rng = random.Random(3)
    g = random_graph(rng, 30, 30, (1, 5))
    t = es_init(g, {0}, depth=8)
    ball = bounded_ball(g.adj, {0}, 8)
    assert t.ball() == pytest.approx(ball)


def test_delete_tree_edge_disconnects_tail():
    t = es_init(path_graph(3), {1})
    es_delete(t, 1, 2)
    assert t.dist(2) == INF and t.dist(3) == INF


def test_delete_non_tree_edge_keeps_levels():
    t = es_init(cycle_graph(4), {1})
    before = dict(t.level)
    # 1-2-3 and 1-4-3 tie at vertex 3; the edge not used by 3's parent is non-tree
    p = t.parent[3]
    other = 4 if p == 2 else 2
    es_delete(t, other, 3)
    assert t.level == before


def test_increase_moves_levels():
    t = es_init(cycle_graph(4), {1})
    es_increase(t, 1, 2, 5)
    assert t.dist(2) == 3 and t.dist(3) == 2


def test_random_deletions_match_dijkstra():
    rng = random.Random(7)
    g = random_graph(rng, 25, 40, (1, 4))
    t = es_init(g, {0, 5}, depth=12)
    for _ in range(50):
        u, v, _w = rng.choice(g.undirected_edges())
        g.delete_edge(u, v)
        es_delete(t, u, v)
        assert t.ball() == pytest.approx(bounded_ball(g.adj, {0, 5}, 12))


def _path_with_sigma(values):
    g = path_graph(len(values) + 1)
    sigma = {}
    for i, s in enumerate(values, 1):
        sigma[(i, i + 1)] = sigma[(i + 1, i)] = s
    return es_init(g, {1}, steadiness=sigma), len(values) + 1


def test_threshold_all_steady():
    t, last = _path_with_sigma([5, 5, 5])
    assert es_threshold_subpath(t, last, 4) == []
    assert es_threshold_subpath(t, last, 5) == [(1, 2), (2, 3), (3, 4)]


def test_threshold_mixed():
    t, last = _path_with_sigma([3, 1, 3])
    assert es_threshold_subpath(t, last, 2) == [(2, 3)]
    assert t.min_steadiness(last) == 1


def test_threshold_outside_ball():
    t = es_init(path_graph(3), {1}, depth=1)
    with pytest.raises(GraphError):
        es_threshold_subpath(t, 3, 1)


def test_multi_source_and_removal():
    t = es_init(path_graph(5), {1, 5})
    assert t.dist(3) == 2 and t.dist(4) == 1
    t.remove_source(5)
    assert t.dist(4) == 3 and t.dist(5) == 4


def test_empty_sources_rejected():
    with pytest.raises(GraphError):
        es_init(path_graph(2), set())
