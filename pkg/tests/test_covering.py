import math
import random

import pytest

from decflow.covering import (MES, SOURCE, Covering, EmulatorBall, ExactBall, LevelSpec, Schedule,
                              _core_node, default_schedule, layered_sssp, round_up)
from decflow.graph import GraphError, build
from decflow.oracles import oracle_dijkstra
from decflow.suites import random_graph

from conftest import clique, path_graph

INF = math.inf


def test_round_up_grid():
    assert round_up(4 + 3, 2) == 8
    assert round_up(5, 2) == 6
    assert round_up(3, 2) == 4
    assert round_up(4, 2) == 4
    assert round_up(0, 2) == 0
    assert round_up(INF, 2) == INF


def test_k5_single_core():
    g = build(clique(range(5)))
    cov = Covering(g, 1.0, 2, 0.1, 64.0)
    assert len(cov.cores) == 1
    (entry,) = cov.cores.values()
    # |ball(v, d_1)| = 5 > 5^(1/2), so the smallest admissible level is 1
    assert entry.level == 1
    assert cov.covered() == set(range(5))


def test_covering_recovers_after_core_deletion():
    edges = clique(range(5))
    g = build(edges)
    cov = Covering(g, 1.0, 2, 0.1, 64.0)
    for u, v, _ in edges:
        cov.apply(("d", u, v))
        assert cov.covered() == set(range(5))
    assert any(line.startswith("retire") for line in cov.trace)
    assert len(cov.cores) >= 2


def test_covering_fixed_point():
    g = build(clique(range(5)) + [(4, 5, 1.0), (5, 6, 1.0)])
    cov = Covering(g, 1.0, 2, 0.1, 64.0)
    spawned = cov.next_id
    cov.apply(("i", 5, 6, 1.0))
    cov.apply(("i", 5, 6, 1.0))
    assert cov.next_id == spawned


def test_same_level_cores_disjoint_and_outer_budget():
    rng = random.Random(0)
    g = random_graph(rng, 20, 10, weights=(1, 2))
    cov = Covering(g, 1.0, 2, 0.1, 64.0, rng=random.Random(0))
    by_level = {}
    for e in cov.cores.values():
        for other in by_level.get(e.level, []):
            assert not (other & e.rc.K)
        by_level.setdefault(e.level, []).append(set(e.rc.K))
    assert max(cov.outer_count.values()) <= cov.delta


def test_compressed_graph_edges():
    rng = random.Random(1)
    g = random_graph(rng, 15, 8, weights=(1, 2, 3))
    cov = Covering(g, 1.0, 2, 0.1, 64.0, rng=random.Random(1))
    q = cov.eps * cov.d
    edges = cov.compressed_edges()
    for (v, cid), wt in edges.items():
        e = cov.cores[cid]
        assert v in e.shell.ball()
        assert wt == round_up(cov.str * cov.d_level(e.level) + e.shell.dist(v), q)
    sets = cov.compressed_sets()
    for u in g.adj:
        near = oracle_dijkstra(g, {u})
        for v, dv in near.items():
            if dv <= cov.d:
                assert any(u in s and v in s for s in sets.values())


def test_vertex_outside_shells_isolated():
    g = build(clique(range(4)))
    cov = Covering(g, 1.0, 2, 0.1, 64.0)
    cov.cores.clear()
    assert cov.compressed_edges() == {}


def test_mes_init_and_cap():
    w = {SOURCE: {1: 2.0}, 1: {SOURCE: 2.0, 2: 3.0}, 2: {1: 3.0}}
    mes = MES(w, SOURCE, 4.0)
    assert mes.est[1] == 2.0 and mes.est[2] == INF
    mes2 = MES({SOURCE: {1: 2.0}, 1: {SOURCE: 2.0, 2: 1.0}, 2: {1: 1.0}}, SOURCE, 4.0)
    assert mes2.est[2] == 3.0
    mes2.raise_edges([(1, 2, 3.0)])
    assert mes2.est[2] == INF


def test_mes_insert_does_not_lower():
    w = {SOURCE: {1: 4.0}, 1: {SOURCE: 4.0}, 2: {}}
    mes = MES(w, SOURCE, 100.0)
    mes.est[2] = INF
    mes.insert(SOURCE, 1, 1.0)
    assert mes.est[1] == 4.0


def _emulator(g, S, D=50.0):
    cov = Covering(g, 1.0, 2, 0.1, 64.0)
    near = ExactBall(g, S, depth=2.0)
    return cov, near, EmulatorBall(g, S, D, cov, near)


def test_emulator_weights_on_grid():
    g = build([(0, 1, 1.0), (1, 2, 3.0), (2, 3, 1.0), (3, 4, 2.5)])
    cov, near, ball = _emulator(g, {0})
    q = ball.q
    for (x, y), wt in ball.weights.items():
        assert abs(wt / q - round(wt / q)) < 1e-9
        assert (wt == 0) == (x == SOURCE and y in ball.S)
    assert ball.weights[(1, 2)] == round_up(3.0, q)
    assert ball.weights[(SOURCE, 1)] == round_up(1.0, q)


def test_emulator_sync_drops_left_shell():
    g = build([(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
    cov, near, ball = _emulator(g, {0})
    (cid,) = cov.cores
    assert (3, _core_node(cid)) in ball.weights
    cov.apply(("d", 2, 3))
    near.apply(("d", 2, 3))
    del ball.adj[2][3], ball.adj[3][2]
    inserts, raises = ball.emulator_sync()
    assert (3, _core_node(cid), INF) in raises
    assert all(wt < INF for _, _, wt in inserts)


def _delete_all(g, parts, u, v):
    g.delete_edge(u, v)
    for p in parts:
        p.apply(("d", u, v))


def test_apxball_never_underestimates():
    # a small near ball pushes most vertices onto the emulator
    rng = random.Random(3)
    g = random_graph(rng, 25, 15, weights=(1, 2))
    S = {0}
    cov, near, ball = _emulator(g, S, D=INF)
    assert ball.estimate(0) == 0
    assert ball.estimate(10 ** 6) == INF
    prev = {v: ball.estimate(v) for v in g.adj}
    edges = g.undirected_edges()
    rng.shuffle(edges)
    for u, v, _ in edges[:15]:
        _delete_all(g, (cov, near, ball), u, v)
        dist = oracle_dijkstra(g, S)
        for x in ball.Vinit:
            est = ball.estimate(x)
            assert est >= prev[x] - 1e-9
            prev[x] = est
            assert est >= dist.get(x, INF) - 1e-9


def test_apxball_sandwich_at_driver_radius():
    rng = random.Random(4)
    g = random_graph(rng, 20, 12, weights=(1, 2, 5))
    S = {0}
    eps, k, str_ = 0.1, 2, 64.0
    cov = Covering(g, 1.0, k, eps, str_)
    near = ExactBall(g, S, depth=2 * (str_ / eps) ** k)
    ball = EmulatorBall(g, S, 40.0, cov, near)
    prev = {v: ball.estimate(v) for v in g.adj}
    edges = g.undirected_edges()
    rng.shuffle(edges)
    for u, v, _ in edges[:12]:
        _delete_all(g, (cov, near, ball), u, v)
        dist = oracle_dijkstra(g, S)
        for x in ball.Vinit:
            est = ball.estimate(x)
            assert est >= prev[x] - 1e-9
            prev[x] = est
            dx = dist.get(x, INF)
            if dx <= ball.D:
                assert dx - 1e-9 <= est <= (1 + 50 * eps) * dx + 1e-9


def test_layered_single_level_is_es():
    g = path_graph(6)
    L = layered_sssp(g, {1}, 0.1, levels=1)
    assert L.eps_final == 0
    assert L.estimates() == {v: v - 1 for v in range(1, 7)}
    L.delete(3, 4)
    assert L.estimate(5) == INF


def test_layered_all_sources():
    g = build(clique(range(5)))
    L = layered_sssp(g, set(range(5)), 0.1, levels=2)
    for u, v, _ in clique(range(5))[:6]:
        L.delete(u, v)
        assert set(L.estimates().values()) == {0}


def test_layered_random_sandwich():
    rng = random.Random(4)
    g = random_graph(rng, 40, 40, weights=(1, 2, 3))
    L = layered_sssp(g, {0}, 0.1, levels=2, rng=random.Random(4))
    edges = g.undirected_edges()
    rng.shuffle(edges)
    for u, v, w in edges[:40]:
        if rng.random() < 0.8:
            g.delete_edge(u, v)
            L.delete(u, v)
        else:
            g.increase_weight(u, v, w + 2)
            L.increase(u, v, w + 2)
        dist = oracle_dijkstra(g, {0})
        for x in g.adj:
            dx, est = dist.get(x, INF), L.estimate(x)
            if dx == INF:
                assert est == INF
            else:
                assert dx - 1e-9 <= est <= (1 + L.eps_final) * dx + 1e-9


def test_schedule_checks():
    s = default_schedule(100, 5, 0.1, 3)
    assert len(s.levels) == 2 and s.levels[0].d <= s.levels[1].d
    with pytest.raises(GraphError):
        Schedule([LevelSpec(2.0, 3, 0.1, 64.0), LevelSpec(1.0, 3, 0.1, 64.0)]).validate()
    with pytest.raises(GraphError):
        layered_sssp(path_graph(3), {1}, 0.1, levels=0)
