"""Seeded acceptance suites shared by the test-suite and ``decflow verify``.

Each suite takes an iterable of seeds and returns a SuiteResult whose
``lines`` are stable text (fixed 9-decimal numbers) so reruns diff clean.
"""

from dataclasses import dataclass, field
import math
import random
import statistics
import time

import numpy as np

from decflow.covering import layered_sssp
from decflow.estree import ESTree
from decflow.expander import CapacityFn, Scattered, VertexCut, certify_core, embed_witness
from decflow.formats import fmt
from decflow.graph import build
from decflow.mwu import (MwuParams, check_pseudo_feasible, estimator_increments,
                         near_pseudo_opt_mbcf, track_ideal_flow)
from decflow.oracles import (flow_check, oracle_dijkstra, oracle_mbcf, oracle_min_conductance)
from decflow.pipeline import FlowParams, capacity_fit, check_flow, fitted_violations, min_cost_flow
from decflow.reductions import crude_approx_opt, map_flow_back, to_vertex_capacitated
from decflow.robust_core import CoreParams, RobustCore

INF = math.inf
TOL = 1e-9


@dataclass
class SuiteResult:
    name: str
    runs: int = 0
    failures: int = 0
    lines: list = field(default_factory=list)
    passed: bool = False
    seconds: float = 0.0

    def summary(self):
        state = "PASS" if self.passed else "FAIL"
        return f"{state} {self.name} runs={self.runs} failures={self.failures}"


# instance generators --------------------------------------------------------

def random_graph(rng, n, extra, weights=(1,), caps=None, costs=None):
    """Connected random graph: a random tree plus ``extra`` chords."""
    edges = set()
    for v in range(1, n):
        edges.add((rng.randrange(v), v))
    tries = 0
    while len(edges) < n - 1 + extra and tries < 50 * (extra + 1):
        tries += 1
        a, b = rng.sample(range(n), 2)
        if (a, b) not in edges and (b, a) not in edges:
            edges.add((a, b))
    return build([(a, b, rng.choice(weights)) for a, b in sorted(edges)], caps, costs,
                 vertices=range(n))


def flow_instance(rng, n, extra, cmax=5, capmax=10):
    """Vertex-capacitated instance with s = 0, t = n - 1 and no direct s-t edge."""
    edges = set()
    for v in range(1, n):
        edges.add((rng.randrange(1, v) if v == n - 1 else rng.randrange(v), v))
    for _ in range(extra):
        a, b = rng.sample(range(n), 2)
        if {a, b} == {0, n - 1}:
            continue
        edges.add((min(a, b), max(a, b)))
    caps = {v: float(rng.randint(1, capmax)) for v in range(n)}
    costs = {v: float(rng.randint(0, cmax)) for v in range(n)}
    costs[0] = costs[n - 1] = 0.0
    return build([(a, b, 1.0) for a, b in sorted(edges)], caps, costs), 0, n - 1


def _finish(res, t0, ok):
    res.seconds = time.time() - t0
    res.passed = ok
    return res


# 1. layered SSSP sandwich ---------------------------------------------------------

def suite_sssp_sandwich(seeds, eps=0.1, levels=2):
    res = SuiteResult("sssp-sandwich")
    t0 = time.time()
    worst = 1.0
    for seed in seeds:
        rng = random.Random(seed)
        n = rng.randint(20, 40)
        g = random_graph(rng, n, rng.randint(n // 2, n), weights=(1, 1, 2, 3))
        L = layered_sssp(g, [0], eps, levels=levels, rng=random.Random(seed))
        order = g.undirected_edges()
        rng.shuffle(order)
        steps = order[:rng.randint(30, 60)]
        bad = 0
        for i in range(len(steps) + 1):
            if i:
                u, v, w = steps[i - 1]
                if rng.random() < 0.8:
                    g.delete_edge(u, v)
                    L.delete(u, v)
                else:
                    g.increase_weight(u, v, w + rng.randint(1, 3))
                    L.increase(u, v, g.adj[u][v])
            dist = oracle_dijkstra(g, [0])
            for x in g.adj:
                d, e = dist.get(x, INF), L.estimate(x)
                if d == INF:
                    bad += e != INF
                    continue
                if e < d - TOL or e > (1 + L.eps_final) * d + TOL:
                    bad += 1
                if d > 0:
                    worst = max(worst, e / d)
        res.runs += 1
        if bad:
            res.failures += 1
            res.lines.append(f"seed {seed}: {bad} sandwich violations")
    res.lines.append(f"max observed stretch {fmt(worst)}")
    return _finish(res, t0, res.failures == 0)


# 2. ES-tree exactness ----------------------------------------------------------

def _capped(dist, depth):
    return {v: d for v, d in dist.items() if d <= depth + TOL}


def suite_es_exact(seeds):
    res = SuiteResult("es-exact")
    t0 = time.time()
    for seed in seeds:
        rng = random.Random(seed)
        n = rng.randint(5, 40)
        g = random_graph(rng, n, rng.randint(0, n), weights=(1, 2, 3, 5))
        S = rng.sample(range(n), rng.randint(1, 3))
        depth = rng.choice([INF, float(rng.randint(2, 12))])
        tree = ESTree(g.adj, S, depth)
        order = g.undirected_edges()
        rng.shuffle(order)
        bad = 0
        for i in range(len(order) + 1):
            if i:
                u, v, w = order[i - 1]
                if rng.random() < 0.7:
                    g.delete_edge(u, v)
                    tree.delete(u, v)
                else:
                    g.increase_weight(u, v, w + rng.randint(1, 4))
                    tree.increase(u, v, g.adj[u][v])
            want = _capped(oracle_dijkstra(g, S), depth)
            got = tree.ball()
            if want != got:
                bad += 1
        res.runs += 1
        if bad:
            res.failures += 1
            res.lines.append(f"seed {seed}: {bad} steps differ from bounded Dijkstra")
    return _finish(res, t0, res.failures == 0)


# 3. robust core ---------------------------------------------------------------

def robust_core_violations(g, rc, kappa_before):
    """Scattered, low-stretch, monotone-kappa and budget checks against BFS."""
    bad = []
    p, D = rc.p, rc.D
    Kinit = rc.K_init
    for v in sorted(Kinit - rc.K):
        dist = oracle_dijkstra(g, [v])
        near = sum(1 for x in Kinit if dist.get(x, INF) <= 2 * D + TOL)
        if near > (1 - p.delta_scatter) * len(Kinit) + TOL:
            bad.append(f"evicted {v} still sees {near} of {len(Kinit)} within 2D")
    for v in sorted(rc.K):
        dist = oracle_dijkstra(g, [v])
        for x in rc.K:
            if dist.get(x, INF) > p.str_core * D + TOL:
                bad.append(f"core pair ({v},{x}) farther than str*D")
    for v, k in kappa_before.items():
        if rc.kappa.get(v, 0) < k:
            bad.append(f"kappa({v}) decreased")
    if float(rc.kappa_total()) > rc.budget() + TOL:
        bad.append("total capacity over budget")
    return bad


def suite_robust_core(seeds):
    res = SuiteResult("robust-core")
    t0 = time.time()
    for seed in seeds:
        rng = random.Random(seed)
        n = rng.randint(20, 40)
        g = random_graph(rng, n, rng.randint(n // 2, 2 * n), weights=(1, 1, 1, 2, 3))
        c = rng.randrange(n)
        dist = oracle_dijkstra(g, [c])
        order = sorted(dist, key=lambda v: (dist[v], v))
        size = rng.randint(6, min(20, n))
        K = order[:size]
        D = max(2.0, 2 * max(dist[v] for v in K))
        rc = RobustCore(g, K, D, params=CoreParams(), rng=random.Random(seed))
        bad = robust_core_violations(g, rc, {})
        edges = g.undirected_edges()
        rng.shuffle(edges)
        for u, v, w in edges[:rng.randint(20, 50)]:
            before = dict(rc.kappa)
            if rng.random() < 0.75:
                g.delete_edge(u, v)
                rc.delete(u, v)
            else:
                g.increase_weight(u, v, w + 1)
                rc.increase(u, v, w + 1)
            bad += robust_core_violations(g, rc, before)
        res.runs += 1
        if bad:
            res.failures += 1
            res.lines.append(f"seed {seed}: {bad[0]} ({len(bad)} total)")
    return _finish(res, t0, res.failures == 0)


# 4. certify core -----------------------------------------------------------------

def suite_certify_core(seeds):
    res = SuiteResult("certify-core")
    t0 = time.time()
    branches = {"core": 0, "scattered": 0}
    for seed in seeds:
        rng = random.Random(seed)
        n = rng.randint(8, 40)
        g = random_graph(rng, n, rng.randint(0, n), weights=(1, 1, 2, 4))
        K = set(rng.sample(range(n), rng.randint(1, n)))
        d = float(rng.choice([0.5, 1, 2, 3]))
        eps = rng.choice([0.1, 0.25, 0.5])
        out = certify_core(g.adj, K, d, eps)
        bad = []
        if isinstance(out, Scattered):
            branches["scattered"] += 1
            for v in K:
                dist = oracle_dijkstra(g, [v])
                inside = sum(1 for x in K if dist.get(x, INF) <= d + TOL)
                if inside > (1 - eps / 2) * len(K) + TOL:
                    bad.append(f"ball of {v} holds {inside} of {len(K)}")
        else:
            branches["core"] += 1
            Kp = out.K
            lg = max(1.0, math.log2(n))
            if not Kp <= K or len(Kp) < (1 - eps) * len(K) - TOL:
                bad.append(f"core of size {len(Kp)} from {len(K)}")
            for v in Kp:
                dist = oracle_dijkstra(g, [v])
                if any(dist.get(x, INF) > 16 * d * lg + TOL for x in Kp):
                    bad.append(f"core diameter too large at {v}")
                    break
        res.runs += 1
        if bad:
            res.failures += 1
            res.lines.append(f"seed {seed}: {bad[0]}")
    res.lines.append(f"branches core={branches['core']} scattered={branches['scattered']}")
    return _finish(res, t0, res.failures == 0)


# 5. embed witness ---------------------------------------------------------------

def witness_violations(H, K, kappa, out, eps_wit, phi, rounds):
    bad = []
    K = set(K)
    if isinstance(out, VertexCut):
        lk = len(out.L & K)
        if not eps_wit * len(K) <= lk <= len(out.R & K):
            bad.append(f"cut balance |L&K|={lk}")
        if sum(kappa[v] for v in out.S) > 2 * lk:
            bad.append("cut not sparse")
        for e in H.hyperedges:
            if e & out.L and e & out.R:
                bad.append("hyperedge joins L and R")
                break
        return bad, "cut"
    X = out.X
    if not X <= K:
        bad.append("witness leaves K")
    load = out.embedding.congestion()
    for v, x in load.items():
        if x > rounds * kappa[v]:
            bad.append(f"congestion at {v}")
            break
    total = sum(w for nb in out.W.values() for w in nb.values()) / 2
    if total > rounds * len(K) / 2:
        bad.append("witness weight over bound")
    if 2 <= len(X) <= 12:
        phi_w, _ = oracle_min_conductance(out.W_multi)
        if phi_w < phi / 6 - TOL:
            bad.append(f"witness conductance {phi_w:.4f} below {phi / 6:.4f}")
    return bad, "witness"


def suite_embed_witness(seeds, eps_wit=0.1, phi=0.2):
    res = SuiteResult("embed-witness")
    t0 = time.time()
    branches = {"cut": 0, "witness": 0}
    for seed in seeds:
        rng = random.Random(seed)
        kind = rng.choice(["random", "dumbbell", "clique"])
        if kind == "dumbbell":
            a = rng.randint(3, 6)
            edges = [(i, j, 1) for i in range(a) for j in range(i + 1, a)]
            edges += [(a + i, a + j, 1) for i in range(a) for j in range(i + 1, a)]
            edges.append((0, a, 1))
            g = build(edges)
        elif kind == "clique":
            a = rng.randint(4, 9)
            g = build([(i, j, 1) for i in range(a) for j in range(i + 1, a)])
        else:
            n = rng.randint(6, 14)
            g = random_graph(rng, n, rng.randint(n // 2, 2 * n))
        H = g.hypergraph()
        V = sorted(g.adj)
        K = V if kind != "random" else sorted(rng.sample(V, rng.randint(2, len(V))))
        kap = {v: 2 for v in V}
        for v in rng.sample(V, len(V) // 3):
            kap[v] = rng.choice([2, 4])
        kappa = CapacityFn.of(kap)
        if max(kappa.kappa.values()) > kappa.total() / 2:
            kappa = CapacityFn.of({v: 2 for v in V})
        rounds = math.ceil(4 * math.log2(len(K))) if len(K) >= 2 else 0
        out = embed_witness(H, K, kappa, random.Random(seed), eps_wit=eps_wit, phi=phi)
        bad, branch = witness_violations(H, K, kappa, out, eps_wit, phi, rounds)
        branches[branch] += 1
        res.runs += 1
        if bad:
            res.failures += 1
            res.lines.append(f"seed {seed} ({kind}): {bad[0]}")
    res.lines.append(f"branches cut={branches['cut']} witness={branches['witness']}")
    return _finish(res, t0, res.failures == 0)


# 6. MWU feasibility -------------------------------------------------------------------

THEORY_EPS = 0.5


def suite_mwu_feasibility(seeds, modes=("practical", "theory")):
    res = SuiteResult("mwu-feasibility")
    t0 = time.time()
    for mode in modes:
        iters = []
        for seed in seeds:
            rng = random.Random(seed)
            if mode == "theory":
                g, s, t = flow_instance(rng, rng.randint(4, 5), rng.randint(0, 2))
                params = MwuParams(mode="theory", eps_max=THEORY_EPS)
                eps = THEORY_EPS
            else:
                g, s, t = flow_instance(rng, rng.randint(6, 10), rng.randint(2, 8))
                params = MwuParams(mode="practical", delta_floor=1e-3)
                eps = 0.2
            budget = rng.choice([5.0, 20.0, INF])
            out = near_pseudo_opt_mbcf(g, s, t, eps, budget, random.Random(seed), params)
            bad = check_pseudo_feasible(g, out.scaled(), s, t, budget, rel=1e-9)
            iters.append(out.iterations)
            res.runs += 1
            if bad or out.capped:
                res.failures += 1
                res.lines.append(f"{mode} seed {seed}: {bad[0] if bad else 'iteration cap'}")
        if iters:
            res.lines.append(f"{mode} median iterations {statistics.median(iters)}")
    return _finish(res, t0, res.failures == 0)


# 7. estimator statistics ----------------------------------------------------------------

def frozen_state(seed, iterations=None):
    """Run a few MWU iterations and return (path, sigma, Lambda, Upsilon, shift)."""
    rng = random.Random(seed)
    g, s, t = flow_instance(rng, rng.randint(6, 10), rng.randint(2, 8))
    params = MwuParams(mode="practical", delta_floor=1e-3,
                       max_iter=iterations if iterations is not None else rng.randint(0, 200))
    out = near_pseudo_opt_mbcf(g, s, t, 0.2, 20.0, random.Random(seed), params)
    from decflow.sssp_pi import SsspPi
    # rebuild the query structure on the frozen weights to read pi(s, t)
    w = {}
    for v in g.adj:
        if v in (s, t):
            w[v] = 0.0
        elif out.what is not None and v in out.what:
            w[v] = out.what[v]
        else:
            w[v] = INF
    pi = SsspPi(g, s, t, w, out.sigma, 0.2)
    path = pi.path_edges()
    lam = min(out.sigma[e] for e in path)
    return path, out.sigma, lam, out.upsilon, out.shift


def suite_estimator_unbiased(seeds, samples=100_000):
    res = SuiteResult("estimator-unbiased")
    t0 = time.time()
    for seed in seeds:
        path, sigma, lam, ups, shift = frozen_state(seed)
        gen = np.random.default_rng(seed)
        u = 1.0 - gen.random(samples)
        gammas = np.maximum(1, np.ceil(-np.log(u) / math.log(ups))).astype(np.int64)
        inc = estimator_increments(path, sigma, lam, ups, shift, gammas)
        ideal = {}
        for x, y in path:
            ideal[y] = ideal.get(y, 0.0) + ups ** (lam - shift)
        bad = []
        for v, arr in sorted(inc.items()):
            mean = float(arr.mean())
            se = float(arr.std(ddof=1)) / math.sqrt(samples)
            if abs(mean - ideal[v]) > 3 * se + 1e-12 * ideal[v]:
                bad.append(f"vertex {v}: mean {mean:.6g} vs {ideal[v]:.6g} (se {se:.3g})")
        spread = max(sigma[e] for e in path) - lam
        res.runs += 1
        res.lines.append(f"state {seed}: path {len(path)} edges, sigma spread {spread}")
        if bad:
            res.failures += 1
            res.lines.append(f"state {seed}: {bad[0]}")
    return _finish(res, t0, res.failures == 0)


COUPLING_EPS = 0.2
COUPLING_ZETA = 30.0
COUPLING_DELTA = 1e-3


def suite_estimator_coupling(seeds, need=0.99):
    res = SuiteResult("estimator-coupling")
    t0 = time.time()
    ok = 0
    for seed in seeds:
        rng = random.Random(seed)
        g, s, t = flow_instance(rng, 10, 10)
        params = MwuParams(mode="practical", zeta=COUPLING_ZETA, delta_floor=COUPLING_DELTA,
                           track=True)
        out = near_pseudo_opt_mbcf(g, s, t, COUPLING_EPS, 20.0, random.Random(seed), params)
        _, dev, _ = track_ideal_flow(out)
        worst = max(dev[v] / g.vertex_cap[v] for v in g.adj if v not in (s, t))
        res.runs += 1
        if worst <= 1:
            ok += 1
        else:
            res.failures += 1
            res.lines.append(f"seed {seed}: deviation {fmt(worst)} u(v)")
    frac = ok / res.runs if res.runs else 1.0
    res.lines.append(f"coupled in {ok} of {res.runs} runs ({fmt(frac)})")
    return _finish(res, t0, frac >= need)


# 8. capacity fitting -----------------------------------------------------------------

def suite_capacity_fit(seeds, eps=0.05, gate=0.9):
    res = SuiteResult("capacity-fit")
    t0 = time.time()
    ratios, rounds = [], []
    for seed in seeds:
        rng = random.Random(seed)
        g, s, t = flow_instance(rng, 7, 8)
        g2, s2, t2, b2, _ = to_vertex_capacitated(g, s, t, 20.0, None, min_edges=1)
        opt = float(oracle_mbcf(g2, s2, t2, b2)[0])
        fit = capacity_fit(g2, s2, t2, eps, b2, opt, random.Random(seed), FlowParams())
        bad = fitted_violations(g2, fit.split, fit.caps, s2, t2, b2)
        opt2 = float(oracle_mbcf(fit.graph, s2, t2, b2)[0])
        ratio = opt2 / opt if opt > 0 else 1.0
        ratios.append(ratio)
        rounds.append(fit.rounds)
        res.runs += 1
        if bad or ratio < gate:
            res.failures += 1
            res.lines.append(f"seed {seed}: {bad[0] if bad else 'ratio ' + fmt(ratio)}")
    if ratios:
        res.lines.append(f"min OPT ratio {fmt(min(ratios))}; rounds used {sorted(set(rounds))}")
    return _finish(res, t0, res.failures == 0)


# 9. end-to-end flow ---------------------------------------------------------------

def suite_end_to_end(seeds, eps=0.05, need=0.95, gate=0.5):
    res = SuiteResult("end-to-end-flow")
    t0 = time.time()
    good, infeasible, gaps = 0, 0, []
    for seed in seeds:
        rng = random.Random(seed)
        g, s, t = flow_instance(rng, rng.randint(5, 7), rng.randint(1, 3))
        out = min_cost_flow(g, s, t, eps, random.Random(seed), FlowParams())
        bad = check_flow(g, out.flow, s, t, out.budget)
        opt = float(oracle_mbcf(g, s, t, out.budget)[0])
        ratio = out.value / opt if opt > 0 else 1.0
        gaps.append(1 - ratio)
        res.runs += 1
        if bad:
            infeasible += 1
            res.lines.append(f"seed {seed}: infeasible ({bad[0]})")
        if ratio >= gate:
            good += 1
        else:
            res.lines.append(f"seed {seed}: value ratio {fmt(ratio)}")
    res.failures = infeasible + (res.runs - good)
    if gaps:
        res.lines.append(f"feasible {res.runs - infeasible}/{res.runs}; "
                         f"ratio >= {gate} in {good}/{res.runs}; median gap {fmt(statistics.median(gaps))}")
    return _finish(res, t0, infeasible == 0 and good >= need * res.runs)


# 10. reductions round trip ------------------------------------------------------------

def suite_reductions(seeds, eps=0.1):
    res = SuiteResult("reductions")
    t0 = time.time()
    for seed in seeds:
        rng = random.Random(seed)
        g, s, t = flow_instance(rng, 12, rng.randint(3, 15), cmax=rng.choice([0, 3, 8]))
        budget = rng.choice([0.0, 5.0, 20.0, 80.0, INF])
        opt = float(oracle_mbcf(g, s, t, budget)[0])
        ut = crude_approx_opt(g, s, t, budget)
        m = g.m
        bad = []
        if not opt / (2 * m * m) - TOL <= ut <= opt + TOL:
            bad.append(f"crude bracket fails: {ut} vs OPT {opt}")
        if opt > 0:
            g2, s2, t2, b2, rmap = to_vertex_capacitated(g, s, t, budget, eps, min_edges=1)
            _, f2, _ = oracle_mbcf(g2, s2, t2, b2)
            f = map_flow_back({e: float(x) for e, x in f2.items()}, g2, rmap)
            val, _, viol = flow_check(g, s, t, f, budget)
            if viol:
                bad.append(f"mapped flow infeasible: {viol[0]}")
            if val < (1 - eps) ** 2 * opt - TOL:
                bad.append(f"mapped value {val} below (1-eps)^2 OPT")
        res.runs += 1
        if bad:
            res.failures += 1
            res.lines.append(f"seed {seed}: {bad[0]}")
    return _finish(res, t0, res.failures == 0)


SUITES = {
    "sssp-sandwich": (suite_sssp_sandwich, 200),
    "es-exact": (suite_es_exact, 500),
    "robust-core": (suite_robust_core, 100),
    "certify-core": (suite_certify_core, 200),
    "embed-witness": (suite_embed_witness, 100),
    "mwu-feasibility": (suite_mwu_feasibility, 50),
    "estimator-unbiased": (suite_estimator_unbiased, 10),
    "estimator-coupling": (suite_estimator_coupling, 200),
    "capacity-fit": (suite_capacity_fit, 50),
    "end-to-end-flow": (suite_end_to_end, 50),
    "reductions": (suite_reductions, 100),
}


def run_suite(name, seeds=None):
    if name not in SUITES:
        raise KeyError(name)
    fn, count = SUITES[name]
    seeds = range(count) if seeds is None else seeds
    return fn(seeds)
