"""From pseudo-flows to exactly feasible bounded-cost flows.

``capacity_fit`` halves the capacity of every vertex the pseudo-flow
solver leaves at most half used, over a fixed number of rounds.  ``mbcf``
then solves the fitted instance once more, returns split-vertex excess to
where it came from, routes the remaining imbalance with an exact max-flow
and scales the sum into the capacities and the budget.  ``min_cost_flow``
searches the budget over powers of (1 + eps).
"""

from dataclasses import dataclass, field
import math
import random

from decflow.graph import GraphError, InvariantError
from decflow.maxflow import Dinic
from decflow.mwu import MwuParams, congestion, near_pseudo_opt_mbcf
from decflow.reductions import (copy_with_caps, crude_approx_opt, edge_split, flow_value,
                                map_flow_back, to_vertex_capacitated)

INF = math.inf
FIT = 18


@dataclass
class FlowParams:
    mode: str = "practical"
    mwu_eps: float = 0.5
    zeta: float = 10.0
    delta_floor: float = 1e-3
    fit_rounds: int = 8
    jmax_cap: int = 12
    early_stop: bool = True
    repeat_halving: bool = True
    max_iter: int = 2_000_000
    route_tries: int = 6
    log: object = None

    def __post_init__(self):
        if self.mode not in ("theory", "practical"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def mwu(self):
        return MwuParams(mode=self.mode, zeta=self.zeta, delta_floor=self.delta_floor,
                         max_iter=self.max_iter)


@dataclass
class FittedInstance:
    graph: object
    split: dict
    caps: dict
    original_caps: dict
    trace: list
    rounds: int
    jmax: int
    eps_prime: float


@dataclass
class FlowResult:
    flow: dict
    value: float
    cost: float
    budget: float
    feasible: bool
    unscaled_value: float = 0.0
    scale: float = 1.0
    guesses: int = 0
    mwu_calls: int = 0
    notes: list = field(default_factory=list)


# helpers ----------------------------------------------------------------------

def _cancel(flow, tol=0.0):
    """Cancel anti-parallel flow symmetrically; drop non-positive entries."""
    out = {}
    for (a, b), x in flow.items():
        if (a, b) in out or (b, a) in out:
            continue
        y = flow.get((b, a), 0.0)
        d = x - y
        if d > tol:
            out[(a, b)] = d
        elif -d > tol:
            out[(b, a)] = -d
    return out


def _aggregates(flow, vertices):
    inn = {v: 0.0 for v in vertices}
    out = {v: 0.0 for v in vertices}
    for (a, b), x in flow.items():
        out[a] += x
        inn[b] += x
    return inn, out


def flow_cost(g, flow, s, t):
    inn, _ = _aggregates(flow, g.adj)
    return sum(inn[v] * g.vertex_cost.get(v, 0.0) for v in g.adj if v not in (s, t))


def check_flow(g, flow, s, t, budget, rel=1e-9):
    """Violations of conservation, capacity and budget (terminals are free)."""
    inn, out = _aggregates(flow, g.adj)
    scale = max([1.0] + list(flow.values()))
    bad = []
    for (a, b), x in flow.items():
        if x < 0:
            bad.append(f"negative flow on ({a},{b})")
        if b not in g.adj.get(a, ()):
            bad.append(f"flow on missing edge ({a},{b})")
    for v in sorted(g.adj):
        if v in (s, t):
            continue
        if abs(inn[v] - out[v]) > rel * scale:
            bad.append(f"conservation at {v}")
        if inn[v] > g.vertex_cap.get(v, 0.0) * (1 + rel) + rel:
            bad.append(f"vertex {v} over capacity")
    cost = flow_cost(g, flow, s, t)
    if budget < INF and cost > budget * (1 + rel) + rel:
        bad.append("budget exceeded")
    return bad


def _pseudo(g, s, t, eps, budget, rng, params):
    """Pseudo-flow oracle: the MWU estimate, scaled into capacity and budget."""
    res = near_pseudo_opt_mbcf(g, s, t, eps, budget, rng, params.mwu())
    if params.log is not None:
        params.log(res.report())
    if params.mode == "theory":
        div = res.divisor
    else:
        # the stated divisor always suffices; the exact congestion is never larger
        div = congestion(g, res.flow, s, t, budget)
    if div <= 0:
        return {}, res
    return {e: x / div for e, x in res.flow.items()}, res


# capacity fitting ---------------------------------------------------------------

def theory_jmax(m, eps):
    """Number of halving rounds; base 2 stands in once 2 - 16 eps drops to 1."""
    base = 2 - 16 * eps if eps < 1 / 16 else 2.0
    return max(1, math.floor(math.log(2 * m ** 11 / eps, base)))


def halve(caps, inflow, skip=()):
    """u_{j+1}(v) = u_j(v)/2 when in(v) <= u_j(v)/2, else u_j(v)."""
    return {v: (c / 2 if v not in skip and inflow.get(v, 0.0) <= c / 2 else c)
            for v, c in caps.items()}


def fitted_violations(g, split, caps, s, t, budget):
    """Check u'' <= u', the 18 u(v) neighbourhood bound and the 18 C cost bound."""
    bad = []
    for v, c in caps.items():
        if v in g.adj and v not in (s, t) and c > g.vertex_cap.get(v, 0.0) * (1 + 1e-12):
            bad.append(f"capacity of {v} grew")
    nb = {v: [] for v in g.adj}
    for x, (a, b) in split.items():
        nb[a].append(x)
        nb[b].append(x)
    for v in sorted(g.adj):
        if v in (s, t):
            continue
        total = sum(caps[x] for x in nb[v])
        if total > FIT * g.vertex_cap.get(v, 0.0) * (1 + 1e-12):
            bad.append(f"neighbourhood of {v} holds {total:.9f} > {FIT} u")
    if budget < INF:
        total = sum(caps[x] * g.vertex_cost.get(x, 0.0)
                    for x in caps if x not in (s, t))
        if total > FIT * budget * (1 + 1e-12):
            bad.append(f"cost capacity {total:.9f} > {FIT} C")
    return bad


def halve_repeat(caps, inflow, floor, skip=()):
    """Apply the halving rule until it stops firing, never below floor[v]."""
    out = {}
    for v, c in caps.items():
        if v not in skip:
            x = inflow.get(v, 0.0)
            while x <= c / 2 and c / 2 >= floor[v]:
                c /= 2
        out[v] = c
    return out


def capacity_fit(g, s, t, eps, budget, ubar, rng=None, params=None, solver=None):
    params = params or FlowParams()
    rng = rng if rng is not None else random.Random(0)
    solver = solver or (lambda h, e: _pseudo(h, s, t, e, budget, rng, params)[0])
    gs, split = edge_split(g, s, t)
    m = max(g.m, 2)
    jmax = theory_jmax(m, eps)
    if params.mode == "practical":
        jmax = min(jmax, params.jmax_cap)
    if params.mode == "practical":
        eps_p = params.mwu_eps
        rounds_max = params.fit_rounds if params.early_stop else jmax + 1
    else:
        eps_p = eps / (20 * max(jmax, 1))
        rounds_max = jmax + 1
    caps = {v: min(c, 2 * ubar) for v, c in gs.vertex_cap.items()}
    floor = {v: c / 2 ** jmax for v, c in caps.items()}
    trace = []
    rounds = 0
    for _ in range(rounds_max):
        if params.mode == "practical" and params.early_stop and \
                not fitted_violations(g, split, caps, s, t, budget):
            break
        gj = copy_with_caps(gs, caps)
        flow = solver(gj, eps_p)
        inn, _ = _aggregates(flow, gj.adj)
        if params.mode == "practical" and params.repeat_halving:
            new = halve_repeat(caps, inn, floor, skip=(s, t))
        else:
            new = halve(caps, inn, skip=(s, t))
        trace.append(sorted(v for v in caps if new[v] < caps[v]))
        caps = new
        rounds += 1
    fit = FittedInstance(graph=copy_with_caps(gs, caps), split=split, caps=caps,
                         original_caps=dict(gs.vertex_cap), trace=trace, rounds=rounds,
                         jmax=jmax, eps_prime=eps_p)
    bad = fitted_violations(g, split, caps, s, t, budget)
    if bad:
        raise InvariantError(f"capacity fitting failed: {bad[0]}")
    return fit


# mapping back and excess ---------------------------------------------------------

def route_back_excess(flow, split, s=None, t=None):
    """Collapse a pseudo-flow on the split graph to a pseudo-flow on G.

    Excess at a split vertex is returned along its in-edges, from x first
    and then from y; a deficit (more estimated out- than in-flow) is
    trimmed from the out-edges in the same order.  Every edge only loses
    flow, so no in-flow grows.
    """
    g = _cancel(flow)
    out = {}
    for v, (x, y) in sorted(split.items()):
        fin = {x: g.get((x, v), 0.0), y: g.get((y, v), 0.0)}
        fout = {x: g.get((v, x), 0.0), y: g.get((v, y), 0.0)}
        ex = fin[x] + fin[y] - fout[x] - fout[y]
        if ex > 0:
            for a in (x, y):
                d = min(ex, fin[a])
                fin[a] -= d
                ex -= d
        elif ex < 0:
            ex = -ex
            for a in (x, y):
                d = min(ex, fout[a])
                fout[a] -= d
                ex -= d
        # after balancing, flow enters from one side and leaves on the other
        if fin[x] > 0 and fout[y] > 0:
            out[(x, y)] = out.get((x, y), 0.0) + min(fin[x], fout[y])
        if fin[y] > 0 and fout[x] > 0:
            out[(y, x)] = out.get((y, x), 0.0) + min(fin[y], fout[x])
    return _cancel(out)


def excess_vector(flow, vertices, s, t):
    inn, out = _aggregates(flow, vertices)
    F = inn[t] - out[t]
    chi = {}
    for v in vertices:
        if v == t:
            chi[v] = 0.0
        elif v == s:
            chi[v] = inn[v] - out[v] + F
        else:
            chi[v] = inn[v] - out[v]
    scale = max([1.0] + [abs(x) for x in flow.values()])
    if abs(sum(chi.values())) > 1e-9 * scale * max(1, len(chi)):
        raise InvariantError("excess vector does not sum to zero")
    return F, chi


def route_excess_maxflow(g, chi, edge_caps, factor=1.0):
    """Route demand chi (positive = surplus to send out) under factor * edge_caps.

    Returns the flow on directed edges, or None when the demand does not fit.
    """
    din = Dinic()
    src, snk = ("src",), ("snk",)
    arcs = []
    for (x, y), c in sorted(edge_caps.items()):
        arcs.append(((x, y), din.add_edge(x, y, factor * c)))
        arcs.append(((y, x), din.add_edge(y, x, factor * c)))
    need = 0.0
    for v in sorted(chi):
        if chi[v] > 0:
            din.add_edge(src, v, chi[v])
            need += chi[v]
        elif chi[v] < 0:
            din.add_edge(v, snk, -chi[v])
    got = din.max_flow(src, snk)
    if got < need - 1e-9 * max(1.0, need):
        return None
    flow = {}
    for e, i in arcs:
        x = din.flow(i)
        if x > 0:
            flow[e] = flow.get(e, 0.0) + x
    return _cancel(flow)


def combine_scale(g, flow, s, t, budget, eps, mode):
    """Scale factor for f-hat + f''': verbatim (1 - 80 eps) in theory mode,
    otherwise the largest factor in [0, 1] that fits capacities and budget."""
    if mode == "theory":
        return max(0.0, 1 - 80 * eps)
    inn, _ = _aggregates(flow, g.adj)
    lam = 1.0
    for v in g.adj:
        if v in (s, t) or inn[v] <= 0:
            continue
        lam = min(lam, g.vertex_cap.get(v, 0.0) / inn[v])
    cost = flow_cost(g, flow, s, t)
    if budget < INF and cost > 0:
        lam = min(lam, budget / cost)
    return lam * (1 - 1e-12)


# drivers ----------------------------------------------------------------------

def _core(g, s, t, eps, budget, rng, params, notes):
    """MBCF on a vertex-capacitated instance; returns (flow, unscaled value, calls, guesses)."""
    ut = crude_approx_opt(g, s, t, budget)
    if ut <= 0:
        return {}, 0.0, 0, 0
    m = max(g.m, 2)
    best = ({}, 0.0, 0.0)
    calls = 0
    guesses = 0
    if params.mode == "practical":
        # seed the guesses with one pseudo-flow estimate of the optimum
        gs, _ = edge_split(g, s, t)
        est, _ = _pseudo(gs, s, t, params.mwu_eps, budget, rng, params)
        calls += 1
        v0 = max(flow_value(est, s), ut)
        ubars = [v0]
    else:
        ubars = [ut * 2 * m * m / 2 ** k for k in range(int(math.log2(4 * m * m)) + 1)]
    for ubar in ubars:
        guesses += 1
        fit = capacity_fit(g, s, t, eps, budget, ubar, rng, params)
        calls += fit.rounds + 1
        ghat, _ = _pseudo(fit.graph, s, t, params.mwu_eps if params.mode == "practical" else eps,
                          budget, rng, params)
        fhat = route_back_excess(ghat, fit.split, s, t)
        F, chi = excess_vector(fhat, g.adj, s, t)
        ecaps = {fit.split[v]: eps * fit.caps[v] for v in fit.split}
        f3 = None
        factor = 1.0
        for _ in range(params.route_tries if params.mode == "practical" else 2):
            f3 = route_excess_maxflow(g, chi, ecaps, factor)
            if f3 is not None:
                break
            factor *= 2
        if f3 is None:
            raise InvariantError("excess demand is not routable within the relaxed capacities")
        if factor > 2:
            notes.append(f"excess routed at {factor:g}x relaxed capacities")
        total = dict(fhat)
        for e, x in f3.items():
            total[e] = total.get(e, 0.0) + x
        total = _cancel(total)
        lam = combine_scale(g, total, s, t, budget, eps, params.mode)
        flow = {e: x * lam for e, x in total.items() if x * lam > 0}
        bad = check_flow(g, flow, s, t, budget)
        if bad:
            raise InvariantError(f"combined flow infeasible: {bad[0]}")
        val = flow_value(flow, s)
        if val > best[1]:
            best = (flow, val, flow_value(total, s))
    return best[0], best[2], calls, guesses


def mbcf(g, s, t, eps, budget, rng=None, params=None):
    """Maximum bounded-cost flow: reduce, solve, map back, verify."""
    params = params or FlowParams()
    rng = rng if rng is not None else random.Random(0)
    notes = []
    try:
        g2, s2, t2, b2, rmap = to_vertex_capacitated(g, s, t, budget, None, min_edges=1)
    except GraphError as exc:
        if "disconnected" in str(exc):
            return FlowResult(flow={}, value=0.0, cost=0.0, budget=budget, feasible=True,
                              notes=["s and t are disconnected"])
        raise
    f2, raw, calls, guesses = _core(g2, s2, t2, eps, b2, rng, params, notes)
    flow = map_flow_back(f2, g2, rmap) if f2 else {}
    flow = {e: x for e, x in flow.items() if x > 0}
    bad = check_flow(g, flow, s, t, budget)
    if bad:
        raise InvariantError(f"mapped flow infeasible: {bad[0]}")
    value = flow_value(flow, s)
    res = FlowResult(flow=flow, value=value, cost=flow_cost(g, flow, s, t), budget=budget,
                     feasible=True, unscaled_value=raw * rmap.gamma_u, guesses=guesses,
                     mwu_calls=calls, notes=notes)
    return res


def probe_count(g, s, t, eps):
    total = sum(g.vertex_cap[v] * g.vertex_cost[v] for v in g.adj
                if v not in (s, t) and g.vertex_cap[v] < INF)
    if total <= 1:
        return 0
    return math.ceil(math.log(total, 1 + eps) - 1e-12)


def min_cost_flow(g, s, t, eps, rng=None, params=None):
    """Cheapest power-of-(1+eps) budget whose MBCF reaches (1 - eps) of the best value."""
    params = params or FlowParams()
    rng = rng if rng is not None else random.Random(0)
    K = probe_count(g, s, t, eps)
    cache = {}

    def run(k):
        if k not in cache:
            if params.log is not None:
                params.log(f"probe k={k} budget={(1 + eps) ** k:.9f}")
            cache[k] = mbcf(g, s, t, eps, (1 + eps) ** k, rng, params)
        return cache[k]

    top = run(K)
    best = top.value
    lo, hi = 0, K
    while lo < hi:
        mid = (lo + hi) // 2
        r = run(mid)
        best = max(best, r.value)
        if r.value >= (1 - eps) * best:
            hi = mid
        else:
            lo = mid + 1
    res = run(lo)
    if res.value < (1 - eps) * best:
        res = max(cache.values(), key=lambda r: r.value)
    res.notes = res.notes + [f"budget probes {len(cache)} of {K + 1}"]
    return res
