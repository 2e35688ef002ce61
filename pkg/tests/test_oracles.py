import math
import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from decflow.graph import build
from decflow.oracles import (OracleScaleError, flow_check, oracle_bfs_hops, oracle_dijkstra,
                             oracle_max_flow, oracle_mbcf, oracle_min_conductance,
                             oracle_min_vertex_cut, oracle_sparse_cut, oracle_vertex_weighted_dist)
from decflow.suites import flow_instance

from conftest import clique, cycle_graph, path_graph
from lp import lp_mbcf

INF = math.inf


def test_dijkstra_and_bfs():
    g = build([(1, 2, 2), (2, 3, 2), (1, 3, 5)])
    assert oracle_dijkstra(g, {1}) == {1: 0, 2: 2, 3: 4}
    assert oracle_bfs_hops(g.adj, 1) == {1: 0, 2: 1, 3: 1}
    assert oracle_dijkstra(build([], vertices=[1, 2]), {1}) == {1: 0}


def test_vertex_weighted():
    g = build([(0, 1, 1), (1, 2, 1), (0, 3, 1), (3, 2, 1)])
    assert oracle_vertex_weighted_dist(g, 0, 2, {1: 4, 3: 2}) == 2


def test_max_flow_two_routes():
    g = build([(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)], caps={1: 3, 2: 4})
    value, flow = oracle_max_flow(g, 0, 3)
    assert value == 7
    assert flow_check(g, 0, 3, flow)[2] == []


def test_max_flow_unbounded():
    g = build([(0, 1, 1)])
    assert oracle_max_flow(g, 0, 1)[0] == INF


def _scipy_vertex_maxflow(g, s, t):
    # split v into v_in = 2i, v_out = 2i + 1; integer capacities only
    verts = sorted(g.adj)
    pos = {v: i for i, v in enumerate(verts)}
    n = 2 * len(verts)
    big = 10 ** 6
    cap = np.zeros((n, n), dtype=np.int64)
    for v in verts:
        c = big if v in (s, t) else int(g.cap(v))
        cap[2 * pos[v], 2 * pos[v] + 1] = c
    for a, b in g.edges:
        cap[2 * pos[a] + 1, 2 * pos[b]] = big
    res = maximum_flow(csr_matrix(cap), 2 * pos[s] + 1, 2 * pos[t])
    return res.flow_value


def test_max_flow_matches_scipy():
    rng = random.Random(5)
    for _ in range(30):
        g, s, t = flow_instance(rng, rng.randint(4, 12), rng.randint(0, 10))
        assert oracle_max_flow(g, s, t)[0] == _scipy_vertex_maxflow(g, s, t)


def test_mbcf_by_hand():
    # cheap narrow route (cap 2, cost 1) and expensive wide route (cap 5, cost 3)
    g = build([(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)], caps={1: 2, 2: 5}, costs={1: 1, 2: 3})
    assert oracle_mbcf(g, 0, 3, 1)[0] == 1
    assert oracle_mbcf(g, 0, 3, 2)[0] == 2
    assert oracle_mbcf(g, 0, 3, 8)[0] == 4
    assert oracle_mbcf(g, 0, 3, 100)[0] == 7
    value, flow, spent = oracle_mbcf(g, 0, 3, 8)
    assert spent == 8 and isinstance(value, Fraction)


def test_mbcf_matches_lp():
    rng = random.Random(9)
    for _ in range(40):
        g, s, t = flow_instance(rng, rng.randint(4, 10), rng.randint(0, 8))
        budget = rng.choice([0, 3, 10, 25, 1000])
        value, flow, _ = oracle_mbcf(g, s, t, budget)
        assert float(value) == pytest.approx(lp_mbcf(g, s, t, budget), rel=1e-7, abs=1e-7)
        v2, cost, bad = flow_check(g, s, t, flow, budget)
        assert bad == [] and v2 == pytest.approx(float(value))


def test_mbcf_scale_limit():
    g = path_graph(5)
    with pytest.raises(OracleScaleError):
        oracle_mbcf(g, 1, 5, 1, max_n=3)


def test_flow_check_reports_violations():
    g = build([(0, 1, 1), (1, 2, 1)], caps={1: 1}, costs={1: 2})
    _, _, bad = flow_check(g, 0, 2, {(0, 1): 2.0, (1, 2): 1.5}, budget=1)
    assert any("conservation" in b for b in bad)
    assert any("capacity" in b for b in bad)
    assert any("budget" in b for b in bad)


def test_sparse_cut_on_dumbbell():
    g = build(clique(range(5)) + clique(range(5, 10)) + [(4, 5, 1)])
    kappa = {v: 2 for v in g.adj}
    ratio, L, S, R = oracle_sparse_cut(g.adj, set(g.adj), kappa)
    assert ratio == pytest.approx(2 / 4)
    assert len(S) == 1 and not (L & R)
    assert oracle_sparse_cut(build(clique(range(6))).adj, set(range(6)), kappa, threshold=0.5) is None


def test_min_vertex_cut_and_conductance():
    g = cycle_graph(6)
    assert oracle_min_vertex_cut(g.adj, 1, 4, {v: 1 for v in g.adj}) == 2
    assert oracle_min_conductance({0: {1: 1.0}, 1: {0: 1.0}})[0] == pytest.approx(1.0)
