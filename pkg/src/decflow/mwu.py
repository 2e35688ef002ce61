"""Multiplicative-weights bounded-cost flow with a randomized flow estimator.

Each iteration takes the current shortest s-t path under the combined
weight w(x) + [phi]_(1+eps) c(x).  Instead of pushing Upsilon^Lambda units
along the whole path, only the edges whose steadiness falls under a random
threshold receive flow, scaled up by the inverse of their inclusion
probability.  Vertex weights and the cost multiplier then grow
exponentially in the estimated in-flow and cost.
"""

from dataclasses import dataclass
import math
import random

from decflow.graph import GraphError
from decflow.sssp_pi import SsspPi

INF = math.inf


@dataclass
class MwuParams:
    mode: str = "practical"
    zeta: float = 10.0
    delta_floor: float = 1e-6
    eps_max: float = None
    tau: int = None
    beta: int = 1
    max_iter: int = 2_000_000
    track: bool = False
    force_full: bool = False  # include every path edge at the ideal amount

    def __post_init__(self):
        if self.mode not in ("theory", "practical"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "practical" and self.zeta < 10:
            raise ValueError("practical zeta must be at least 10")
        if self.eps_max is None:
            self.eps_max = 1 / 768 if self.mode == "theory" else 0.5


@dataclass
class MwuResult:
    flow: dict
    inflow: dict
    cost: float
    iterations: int
    objective: float
    delta: float
    upsilon: float
    zeta: float
    tau: int
    shift: int
    clamps: int
    divisor: float
    mode: str
    capped: bool
    ideal: dict = None
    ideal_inflow: dict = None
    ideal_cost: float = None
    sink: object = None
    phi: float = 0.0
    what: dict = None
    sigma: dict = None

    def scaled(self):
        return scale_pseudo_flow(self.flow, self.divisor)

    def report(self):
        from decflow.formats import fmt
        value = sum(x for (a, b), x in self.flow.items() if b == self.sink) - \
            sum(x for (a, b), x in self.flow.items() if a == self.sink)
        return (f"mwu mode={self.mode} iterations={self.iterations} "
                f"objective={fmt(self.objective)} value={fmt(value / self.divisor)} "
                f"delta={fmt(self.delta)} upsilon={fmt(self.upsilon)} zeta={fmt(self.zeta)} "
                f"tau={self.tau} shift={self.shift} clamps={self.clamps}")


# constants ----------------------------------------------------------------

def default_tau(n):
    return max(1, math.ceil(10 * math.log2(max(n, 2))))


def upsilon_of(n, tau):
    return max(n, 2) ** (10 / tau)


def delta_of(m, eps, params):
    delta = max(m, 2) ** (-1 / eps)
    if params.mode == "practical":
        delta = max(delta, params.delta_floor)
    return delta


def zeta_of(n, eps, delta, params):
    if params.mode == "theory":
        return 3860 * math.log(max(n, 2)) * math.log((1 + eps) / delta, 1 + eps)
    return params.zeta


def scale_divisor(eps, delta):
    return (1 + 10 * eps) * math.log((1 + eps) / delta, 1 + eps)


def scale_pseudo_flow(flow, divisor):
    return {e: x / divisor for e, x in flow.items()}


def round_up_power(x, base):
    """Smallest power of ``base`` that is at least x (x > 0)."""
    k = math.ceil(math.log(x, base) - 1e-12)
    if base ** k < x:
        k += 1
    return k


# steadiness and sampling --------------------------------------------------

def raw_steadiness(g, y, budget, zeta, beta, upsilon, m, terminals):
    """floor(log_Upsilon(min{C/(m c(y)), u(y)/deg(y)} / (zeta beta))), or None."""
    u = g.vertex_cap.get(y, 0.0)
    c = g.vertex_cost.get(y, 0.0)
    if y in terminals and u <= 0:
        u = INF
    if y in terminals:
        c = 0.0
    cap_term = u / max(1, len(g.adj[y])) if u < INF else INF
    if c <= 0 or budget == INF:
        cost_term = INF
    elif budget <= 0:
        return None
    else:
        cost_term = budget / (m * c)
    arg = min(cap_term, cost_term)
    if arg == INF:
        return INF
    if arg <= 0:
        return None
    return math.floor(math.log(arg / (zeta * beta), upsilon) + 1e-12)


def assign_steadiness(g, budget, zeta, beta, upsilon, tau, terminals=(), shift=None):
    """Steadiness of every directed edge, clamped into [1, tau].

    ``shift`` is added before clamping; None picks the smallest shift that
    lifts every finite raw value to at least 1.  Returns (sigma, shift,
    clamps) where ``clamps`` counts the edges the clamp had to move.
    """
    m = g.m
    raw = {}
    for x in g.adj:
        for y in g.adj[x]:
            raw[(x, y)] = raw_steadiness(g, y, budget, zeta, beta, upsilon, m, set(terminals))
    finite = [r for r in raw.values() if r is not None and r < INF]
    if shift is None:
        shift = max(0, 1 - min(finite)) if finite else 0
    sigma = {}
    clamps = 0
    for e, r in raw.items():
        if r is None or r == INF:
            sigma[e] = tau
            continue
        v = r + shift
        if v < 1 or v > tau:
            clamps += 1
        sigma[e] = min(max(v, 1), tau)
    return sigma, shift, clamps


def sample_threshold(upsilon, rng):
    """gamma = ceil(X) with X ~ Exp(ln Upsilon), drawn by inverse CDF."""
    if upsilon <= 1:
        raise ValueError("Upsilon must exceed 1")
    u = 1.0 - rng.random()
    return max(1, math.ceil(-math.log(u) / math.log(upsilon)))


def included(sigma_e, lam, gamma):
    """Edge selection rule: P[included] = Upsilon^(lam - sigma_e) for sigma_e >= lam."""
    return sigma_e <= lam + gamma - 1


def estimator_increments(path, sigma, lam, upsilon, shift, gammas):
    """Per-sample in-flow increments into each head vertex of ``path``.

    ``gammas`` is a numpy integer array of sampled thresholds; returns a
    dict vertex -> numpy array of increments, one entry per sample.
    """
    import numpy as np
    gammas = np.asarray(gammas)
    out = {}
    for x, y in path:
        s = sigma[(x, y)]
        hit = s <= lam + gammas - 1
        amt = upsilon ** (s - shift)
        out[y] = out.get(y, 0) + np.where(hit, amt, 0.0)
    return out


# the main loop -------------------------------------------------------------

def near_pseudo_opt_mbcf(g, s, t, eps, budget, rng=None, params=None, tau=None):
    """Run the estimator MWU; returns an MwuResult holding the raw f-hat."""
    params = params or MwuParams()
    rng = rng if rng is not None else random.Random(0)
    if not 0 < eps <= params.eps_max:
        raise GraphError(f"eps must lie in (0, {params.eps_max:g}]")
    n, m = g.n, max(g.m, 1)
    tau = tau or params.tau or default_tau(n)
    ups = upsilon_of(n, tau)
    delta = delta_of(m, eps, params)
    zeta = zeta_of(n, eps, delta, params)
    beta = params.beta
    terminals = (s, t)
    shift = None if params.mode == "practical" else 0
    sigma, shift, clamps = assign_steadiness(g, budget, zeta, beta, ups, tau, terminals, shift)
    cost_on = 0 < budget < INF and any(g.vertex_cost.get(v, 0) > 0
                                       for v in g.adj if v not in terminals)
    u = {v: g.vertex_cap.get(v, 0.0) for v in g.adj}
    c = {v: (0.0 if v in terminals else g.vertex_cost.get(v, 0.0)) for v in g.adj}
    alive = {v for v in g.adj if v not in terminals and u[v] > 0
             and (budget > 0 or c[v] == 0)}
    what = {v: delta / u[v] for v in alive}
    phi = delta / budget if cost_on else 0.0
    base = 1 + eps
    k_phi = round_up_power(phi, base) if cost_on else None

    def combined(v):
        if v in terminals:
            return 0.0
        if v not in alive:
            return INF
        return what[v] + (base ** k_phi * c[v] if cost_on else 0.0)

    sssp = SsspPi(g, s, t, {v: combined(v) for v in g.adj}, sigma, eps)
    flow = {}
    inflow = {v: 0.0 for v in g.adj}
    cost = 0.0
    ideal = {} if params.track else None
    ideal_in = {v: 0.0 for v in g.adj} if params.track else None
    ideal_cost = 0.0
    potential = sum(u[v] * what[v] for v in alive) + (budget * phi if cost_on else 0.0)
    it = 0
    capped = False
    while potential < 1:
        if it >= params.max_iter:
            capped = True
            break
        if not sssp.connected():
            break
        if sssp.distance() <= 0:
            raise GraphError("s and t are joined by a path without capacitated vertices")
        it += 1
        lam = 1
        while not sssp.threshold_subpath(lam):
            lam += 1
        if params.force_full:
            # estimator switched off: the whole path gets the ideal amount
            picks = [(e, ups ** (lam - shift)) for e in sssp.path_edges()]
        else:
            gamma = sample_threshold(ups, rng)
            picks = [(e, ups ** (sigma[e] - shift)) for e in sssp.threshold_subpath(lam + gamma - 1)]
        chat = 0.0
        changed = set()
        for (x, y), amt in picks:
            flow[(x, y)] = flow.get((x, y), 0.0) + amt
            inflow[y] += amt
            if y in alive:
                old = what[y]
                what[y] = old * math.exp(eps * amt / u[y])
                potential += u[y] * (what[y] - old)
                changed.add(y)
            chat += c[y] * amt
        if params.track:
            amt = ups ** (lam - shift)
            for x, y in sssp.path_edges():
                ideal[(x, y)] = ideal.get((x, y), 0.0) + amt
                ideal_in[y] += amt
                ideal_cost += c[y] * amt
        cost += chat
        if cost_on and chat > 0:
            old = phi
            phi = phi * math.exp(eps * chat / budget)
            potential += budget * (phi - old)
            k = round_up_power(phi, base)
            if k != k_phi:
                k_phi = k
                changed.update(v for v in alive if c[v] > 0)
        for v in sorted(changed):
            sssp.increase_vertex_weight(v, combined(v))
    res = MwuResult(flow=flow, inflow=inflow, cost=cost, iterations=it, objective=potential,
                    delta=delta, upsilon=ups, zeta=zeta, tau=tau, shift=shift, clamps=clamps,
                    divisor=scale_divisor(eps, delta), mode=params.mode, capped=capped,
                    ideal=ideal, ideal_inflow=ideal_in,
                    ideal_cost=ideal_cost if params.track else None,
                    sink=t, phi=phi, what=what, sigma=sigma)
    return res


def track_ideal_flow(res):
    """The side-by-side ideal flow f and its per-vertex and cost deviation from f-hat."""
    if res.ideal is None:
        raise GraphError("run was made without the ideal tracker")
    dev = {v: abs(res.ideal_inflow[v] - res.inflow[v]) for v in res.inflow}
    return res.ideal, dev, abs(res.ideal_cost - res.cost)


def weight_law(res, g, eps, v):
    """delta/u(v) * exp(eps * in(v) / u(v)), the closed form of w-hat(v)."""
    u = g.vertex_cap[v]
    return res.delta / u * math.exp(eps * res.inflow[v] / u)


def cost_law(res, eps, budget):
    return res.delta / budget * math.exp(eps * res.cost / budget)


def pseudo_flow_aggregates(g, flow, s=None, t=None):
    """(in, out, cost) recomputed from scratch; s and t are never charged."""
    inn = {v: 0.0 for v in g.adj}
    out = {v: 0.0 for v in g.adj}
    for (x, y), f in flow.items():
        out[x] += f
        inn[y] += f
    cost = sum(inn[v] * g.vertex_cost.get(v, 0.0) for v in g.adj if v not in (s, t))
    return inn, out, cost


def check_pseudo_feasible(g, flow, s, t, budget, rel=1e-9):
    """Violations of capacity and cost for a pseudo-flow (terminals free)."""
    inn, _, cost = pseudo_flow_aggregates(g, flow, s, t)
    bad = []
    for v in sorted(g.adj):
        if v in (s, t):
            continue
        if inn[v] > g.vertex_cap.get(v, 0.0) * (1 + rel) + 1e-12:
            bad.append(f"vertex {v} in-flow {inn[v]:.9f} over capacity")
    if budget < INF and cost > budget * (1 + rel) + 1e-12:
        bad.append(f"cost {cost:.9f} over budget")
    return bad


def congestion(g, flow, s, t, budget):
    """Smallest factor that makes the pseudo-flow capacity- and cost-feasible."""
    inn, _, cost = pseudo_flow_aggregates(g, flow, s, t)
    worst = 0.0
    for v in g.adj:
        if v in (s, t) or inn[v] <= 0:
            continue
        cap = g.vertex_cap.get(v, 0.0)
        worst = max(worst, inn[v] / cap if cap > 0 else INF)
    if budget < INF and cost > 0:
        worst = max(worst, cost / budget if budget > 0 else INF)
    return worst
