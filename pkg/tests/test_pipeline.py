import math
import random

import pytest

from decflow.graph import build
from decflow.oracles import oracle_max_flow, oracle_mbcf
from decflow.pipeline import (FlowParams, capacity_fit, check_flow, excess_vector, fitted_violations,
                              halve, halve_repeat, mbcf, min_cost_flow, probe_count,
                              route_back_excess, route_excess_maxflow, theory_jmax)
from decflow.reductions import edge_split, flow_value
from decflow.suites import flow_instance

INF = math.inf


def two_routes():
    # cheap narrow route through 1 (cap 2, cost 1), expensive wide route through 2 (cap 5, cost 3)
    return build([(0, 1, 1), (1, 3, 1), (0, 2, 1), (2, 3, 1)], caps={1: 2, 2: 5}, costs={1: 1, 2: 3})


def test_halving_rule():
    assert halve({1: 8.0}, {1: 3.0}) == {1: 4.0}
    assert halve({1: 8.0}, {1: 5.0}) == {1: 8.0}
    assert halve({0: 8.0}, {}, skip=(0,)) == {0: 8.0}


def test_repeated_halving_respects_floor():
    assert halve_repeat({1: 64.0}, {1: 3.0}, {1: 1.0}) == {1: 4.0}
    assert halve_repeat({1: 64.0}, {1: 0.0}, {1: 8.0}) == {1: 8.0}


def test_theory_jmax():
    assert theory_jmax(10, 0.01) == math.floor(math.log(2 * 10 ** 11 / 0.01, 2 - 0.16))
    assert theory_jmax(10, 0.2) == math.floor(math.log(2 * 10 ** 11 / 0.2, 2))


def test_capacity_fit_invariants_and_opt():
    rng = random.Random(21)
    for _ in range(5):
        g, s, t = flow_instance(rng, 7, 6)
        budget = 20.0
        opt = float(oracle_mbcf(g, s, t, budget)[0])
        fit = capacity_fit(g, s, t, 0.05, budget, opt, random.Random(1))
        assert fitted_violations(g, fit.split, fit.caps, s, t, budget) == []
        assert all(fit.caps[v] <= fit.original_caps[v] for v in fit.caps)
        assert fit.jmax <= 12
        opt2 = float(oracle_mbcf(fit.graph, s, t, budget)[0])
        assert opt2 >= 0.9 * opt - 1e-9


def _split_path():
    g = build([(0, 1, 1), (1, 2, 1)], caps={1: 3})
    gs, split = edge_split(g, 0, 2)
    inv = {e: v for v, e in split.items()}
    return g, gs, split, inv


def test_route_back_identity():
    g, gs, split, inv = _split_path()
    a, b = inv[(0, 1)], inv[(1, 2)]
    flow = {(0, a): 2.0, (a, 1): 2.0, (1, b): 2.0, (b, 2): 2.0}
    assert route_back_excess(flow, split, 0, 2) == {(0, 1): 2.0, (1, 2): 2.0}


def test_route_back_stranded_unit():
    g, gs, split, inv = _split_path()
    a = inv[(0, 1)]
    assert route_back_excess({(0, a): 1.0}, split, 0, 2) == {}


def test_route_back_never_grows_inflow():
    rng = random.Random(4)
    for _ in range(20):
        g, s, t = flow_instance(rng, 8, 5)
        gs, split = edge_split(g, s, t)
        ghat = {(x, y): rng.random() * 3 for x in gs.adj for y in gs.adj[x] if rng.random() < 0.6}
        f = route_back_excess(ghat, split, s, t)
        assert all(val > 0 and y in g.adj[x] for (x, y), val in f.items())
        inn_g = {}
        for (x, y), val in ghat.items():
            inn_g[y] = inn_g.get(y, 0.0) + val
        inn_f = {}
        for (x, y), val in f.items():
            inn_f[y] = inn_f.get(y, 0.0) + val
        for v in g.adj:
            assert inn_f.get(v, 0.0) <= inn_g.get(v, 0.0) + 1e-9


def test_excess_vector():
    verts = [0, 1, 2]
    F, chi = excess_vector({(0, 1): 2.0, (1, 2): 2.0}, verts, 0, 2)
    assert F == 2.0 and all(x == 0 for x in chi.values())
    F, chi = excess_vector({}, verts, 0, 2)
    assert F == 0 and all(x == 0 for x in chi.values())
    rng = random.Random(0)
    for _ in range(20):
        flow = {(a, b): rng.random() for a in range(6) for b in range(6) if a != b and rng.random() < 0.4}
        F, chi = excess_vector(flow, range(6), 0, 5)
        assert abs(sum(chi.values())) <= 1e-9


def test_route_excess():
    g = build([(0, 1, 1), (1, 2, 1)])
    caps = {(0, 1): 1.0, (1, 2): 1.0}
    assert route_excess_maxflow(g, {0: 0.0, 1: 0.0, 2: 0.0}, caps) == {}
    assert route_excess_maxflow(g, {0: 0.0, 1: 1.0, 2: -1.0}, caps) == {(1, 2): 1.0}
    assert route_excess_maxflow(g, {0: 0.0, 1: 3.0, 2: -3.0}, caps) is None
    assert route_excess_maxflow(g, {0: 0.0, 1: 3.0, 2: -3.0}, caps, factor=4) == {(1, 2): 3.0}


def test_route_excess_random():
    rng = random.Random(3)
    for _ in range(20):
        g, s, t = flow_instance(rng, 8, 6)
        caps = {(a, b): float(rng.randint(1, 4)) for a, b, _ in g.undirected_edges()}
        verts = sorted(g.adj)
        a, b = rng.sample(verts, 2)
        chi = {v: 0.0 for v in verts}
        chi[a], chi[b] = 1.0, -1.0
        f = route_excess_maxflow(g, chi, caps, factor=2.0)
        assert f is not None
        net = {v: 0.0 for v in verts}
        for (x, y), val in f.items():
            net[x] += val
            net[y] -= val
            assert val <= 2 * caps[(min(x, y), max(x, y))] + 1e-9
        assert all(abs(net[v] - chi[v]) <= 1e-9 for v in verts)


def test_mbcf_zero_cost_is_max_flow():
    rng = random.Random(8)
    g, s, t = flow_instance(rng, 8, 6, cmax=0)
    res = mbcf(g, s, t, 0.05, 1e9, random.Random(0))
    opt = float(oracle_max_flow(g, s, t)[0])
    assert check_flow(g, res.flow, s, t, INF) == []
    assert res.value >= 0.5 * opt


def test_mbcf_zero_opt():
    g = build([(0, 1, 1), (1, 2, 1)], caps={1: 0.0})
    res = mbcf(g, 0, 2, 0.05, 10.0)
    assert res.flow == {} and res.value == 0


def test_mbcf_random_feasible():
    rng = random.Random(13)
    for _ in range(6):
        g, s, t = flow_instance(rng, rng.randint(5, 8), rng.randint(1, 5))
        budget = rng.choice([5.0, 20.0])
        res = mbcf(g, s, t, 0.05, budget, random.Random(rng.random()))
        assert check_flow(g, res.flow, s, t, budget) == []
        opt = float(oracle_mbcf(g, s, t, budget)[0])
        assert res.value >= 0.5 * opt
        assert res.value == pytest.approx(flow_value(res.flow, s))


def test_min_cost_single_route():
    g = build([(0, 1, 1), (1, 2, 1)], caps={1: 4}, costs={1: 2})
    res = min_cost_flow(g, 0, 2, 0.2, random.Random(0))
    assert res.cost == pytest.approx(2 * res.value)
    assert check_flow(g, res.flow, 0, 2, res.budget) == []


def test_min_cost_lands_between_knees():
    eps = 0.2
    g = two_routes()
    res = min_cost_flow(g, 0, 3, eps, random.Random(0))
    # knees: budget 2 (cheap route full) and budget 17 (both full)
    assert 2 <= res.budget <= 17 * (1 + eps)
    assert check_flow(g, res.flow, 0, 3, res.budget) == []
    assert res.value > 2


def test_probe_count():
    g = two_routes()
    assert probe_count(g, 0, 3, 0.2) == math.ceil(math.log(17, 1.2))
    assert probe_count(g, 0, 3, 0.5) == math.ceil(math.log(17, 1.5))
    assert probe_count(g, 0, 3, 0.5) < probe_count(g, 0, 3, 0.2)


def test_flow_params_modes():
    p = FlowParams(mode="theory").mwu()
    assert p.mode == "theory"
    assert FlowParams().mwu().delta_floor == 1e-3
