import random

import pytest

from decflow.graph import GraphError, build
from decflow.oracles import oracle_min_conductance
from decflow.robust_core import CoreParams, robust_core_delete, robust_core_init
from decflow.suites import robust_core_violations

from conftest import clique


def test_clique_phase_keeps_everything():
    g = build(clique(range(6)))
    rc = robust_core_init(g, set(range(6)), 1.0, rng=random.Random(0))
    assert rc.X == set(range(6)) and rc.K == set(range(6))
    W = rc.prune.W
    phi, _ = oracle_min_conductance({v: {u: float(c) for u, c in nb.items()} for v, nb in W.items()})
    assert phi >= rc.p.phi / 6


def test_singleton_core():
    g = build([(0, 1, 1), (1, 2, 1)])
    rc = robust_core_init(g, {1}, 1.0)
    assert robust_core_delete(rc, 0, 1) == []
    assert rc.K == {1}


def test_dumbbell_doubles_bridge():
    g = build(clique(range(5)) + clique(range(5, 10)) + [(0, 5, 1)])
    params = CoreParams(eps_wit=0.05)
    rc = robust_core_init(g, set(range(10)), 2.0, params=params, rng=random.Random(0))
    assert rc.doublings > 0
    assert max(rc.kappa[0], rc.kappa[5]) > 2
    assert any(line.startswith("double") for line in rc.trace)
    assert float(rc.kappa_total()) <= rc.budget()


def test_far_deletion_is_noop():
    g = build(clique(range(5)) + [(4, 100, 1000.0), (100, 101, 1.0)])
    rc = robust_core_init(g, set(range(5)), 1.0)
    assert 101 not in rc.B
    phase = rc.phase
    assert robust_core_delete(rc, 100, 101) == []
    assert rc.phase == phase and rc.K == set(range(5))


def test_disconnected_core_empties():
    edges = clique(range(6))
    g = build(edges)
    rc = robust_core_init(g, set(range(6)), 1.0, rng=random.Random(1))
    gone = []
    for u, v, _ in edges:
        g.delete_edge(u, v)
        gone += robust_core_delete(rc, u, v)
    assert rc.K == set() and rc.done
    assert sorted(gone) == list(range(6))
    assert any("scattered" in line for line in rc.trace)


def test_random_updates_keep_contract():
    rng = random.Random(2)
    for seed in range(3):
        edges = clique(range(8)) + [(i, 8 + i, 1.0) for i in range(8)] + \
            [(8 + i, 8 + (i + 1) % 8, 1.0) for i in range(8)]
        g = build(edges)
        rc = robust_core_init(g, set(range(8)), 1.0, rng=random.Random(seed))
        order = g.undirected_edges()
        rng.shuffle(order)
        for u, v, w in order[:25]:
            before = dict(rc.kappa)
            if rng.random() < 0.7:
                g.delete_edge(u, v)
                rc.delete(u, v)
            else:
                g.increase_weight(u, v, w + 1)
                rc.increase(u, v, w + 1)
            assert robust_core_violations(g, rc, before) == []


def test_kinit_must_be_close():
    g = build([(0, 1, 1), (1, 2, 5)])
    with pytest.raises(GraphError):
        robust_core_init(g, {0, 2}, 1.0)
    with pytest.raises(GraphError):
        robust_core_init(g, set(), 1.0)


def test_eps_cert():
    assert CoreParams(delta_scatter=0.25).eps_cert == 0.5
