"""Brute-force ground truth used by the tests.

Nothing here imports the main algorithmic modules: shortest paths, flows
and cuts are all reimplemented in the plainest possible form so that the
cross-checks are meaningful.  Flow oracles work in exact rationals.
"""

from collections import deque
from fractions import Fraction
from itertools import combinations
import heapq
import math

INF = math.inf


class OracleScaleError(ValueError):
    pass


def _adj_of(g):
    return g.adj if hasattr(g, "adj") else g


def oracle_dijkstra(g, sources):
    """Exact distances from a vertex set; unreachable vertices are absent."""
    adj = _adj_of(g)
    dist = {}
    frontier = [(0.0, s) for s in sources]
    heapq.heapify(frontier)
    while frontier:
        d, v = heapq.heappop(frontier)
        if v in dist:
            continue
        dist[v] = d
        for u in sorted(adj[v]):
            if u not in dist:
                heapq.heappush(frontier, (d + adj[v][u], u))
    return dist


def oracle_bfs_hops(adj, source):
    hops = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if u not in hops:
                hops[u] = hops[v] + 1
                queue.append(u)
    return hops


def oracle_vertex_weighted_dist(g, s, t, w):
    """Minimum over s-t paths of the summed vertex weights (s, t included)."""
    adj = _adj_of(g)
    dist = {s: w.get(s, 0.0)}
    frontier = [(dist[s], s)]
    seen = set()
    while frontier:
        d, v = heapq.heappop(frontier)
        if v in seen:
            continue
        seen.add(v)
        if v == t:
            return d
        for u in adj[v]:
            nd = d + w.get(u, 0.0)
            if nd < dist.get(u, INF):
                dist[u] = nd
                heapq.heappush(frontier, (nd, u))
    return INF


# exact flows ----------------------------------------------------------------

def _q(x):
    if x == INF:
        return None
    return Fraction(x)


class _Net:
    """Residual network with Fraction capacities; None means unbounded."""

    def __init__(self):
        self.head = []
        self.cap = []
        self.cost = []
        self.out = {}

    def arc(self, a, b, cap, cost=Fraction(0)):
        i = len(self.head)
        self.head += [b, a]
        self.cap += [cap, Fraction(0)]
        self.cost += [cost, -cost]
        self.out.setdefault(a, []).append(i)
        self.out.setdefault(b, []).append(i + 1)
        return i

    def flow_on(self, i):
        return self.cap[i ^ 1]

    def push(self, i, amount):
        if self.cap[i] is not None:
            self.cap[i] -= amount
        if self.cap[i ^ 1] is not None:
            self.cap[i ^ 1] += amount


def _split_network(g, s, t, charge_terminals):
    """Vertex-split network: v_in -> v_out carries u(v) at cost c(v)."""
    net = _Net()
    vin = {v: ("in", v) for v in g.adj}
    vout = {v: ("out", v) for v in g.adj}
    for v in sorted(g.adj):
        free = v in (s, t) and not charge_terminals
        cap = None if free else _q(g.vertex_cap.get(v, 0.0))
        cost = Fraction(0) if free else Fraction(g.vertex_cost.get(v, 0.0))
        net.arc(vin[v], vout[v], cap, cost)
    arcs = {}
    for u in sorted(g.adj):
        for v in sorted(g.adj[u]):
            cap = _q(g.edge_cap.get((u, v), INF))
            cost = Fraction(g.edge_cost.get((u, v), 0.0))
            arcs[(u, v)] = net.arc(vout[u], vin[v], cap, cost)
    return net, vin[s], vout[t], arcs


def oracle_max_flow(g, s, t, charge_terminals=False):
    """Exact vertex-capacitated max flow by shortest augmenting paths.

    Returns (value, flow) with flow a dict over directed edges.
    """
    net, src, snk, arcs = _split_network(g, s, t, charge_terminals)
    value = Fraction(0)
    while True:
        prev = {src: None}
        queue = deque([src])
        while queue and snk not in prev:
            a = queue.popleft()
            for i in net.out.get(a, ()):
                b = net.head[i]
                c = net.cap[i]
                if b not in prev and (c is None or c > 0):
                    prev[b] = i
                    queue.append(b)
        if snk not in prev:
            break
        path = []
        x = snk
        while prev[x] is not None:
            path.append(prev[x])
            x = net.head[prev[x] ^ 1]
        caps = [net.cap[i] for i in path if net.cap[i] is not None]
        if not caps:
            return INF, None
        amount = min(caps)
        for i in path:
            net.push(i, amount)
        value += amount
    flow = {e: net.flow_on(i) for e, i in arcs.items() if net.flow_on(i) > 0}
    return value, flow


def oracle_mbcf(g, s, t, budget, charge_terminals=False, max_n=120):
    """Exact maximum bounded-cost flow by successive shortest paths.

    Augments along cheapest residual paths (Dijkstra on reduced costs) and
    stops when the budget runs out, splitting the last augmentation.
    Returns (value, flow, cost) in exact rationals.
    """
    if g.n > max_n:
        raise OracleScaleError(f"oracle_mbcf limited to n <= {max_n}")
    net, src, snk, arcs = _split_network(g, s, t, charge_terminals)
    remaining = None if budget == INF else Fraction(budget)
    pot = {}
    value = Fraction(0)
    spent = Fraction(0)
    nodes = list(net.out)
    while True:
        dist = {src: Fraction(0)}
        prev = {src: None}
        heap = [(Fraction(0), 0, src)]
        tick = 1
        done = set()
        while heap:
            d, _, a = heapq.heappop(heap)
            if a in done:
                continue
            done.add(a)
            for i in net.out.get(a, ()):
                c = net.cap[i]
                if c is not None and c <= 0:
                    continue
                b = net.head[i]
                nd = d + net.cost[i] + pot.get(a, 0) - pot.get(b, 0)
                if b not in dist or nd < dist[b]:
                    dist[b] = nd
                    prev[b] = i
                    heapq.heappush(heap, (nd, tick, b))
                    tick += 1
        if snk not in done:
            break
        for a in nodes:
            if a in done:
                pot[a] = pot.get(a, 0) + dist[a]
        path = []
        x = snk
        while prev[x] is not None:
            path.append(prev[x])
            x = net.head[prev[x] ^ 1]
        unit = sum((net.cost[i] for i in path), Fraction(0))
        if unit > 0 and remaining is not None and remaining <= 0:
            break
        caps = [net.cap[i] for i in path if net.cap[i] is not None]
        amount = min(caps) if caps else None
        if unit > 0 and remaining is not None:
            afford = remaining / unit
            amount = afford if amount is None else min(amount, afford)
        if amount is None:
            return INF, None, None
        for i in path:
            net.push(i, amount)
        value += amount
        spent += amount * unit
        if remaining is not None:
            remaining -= amount * unit
    flow = {e: net.flow_on(i) for e, i in arcs.items() if net.flow_on(i) > 0}
    return value, flow, spent


def flow_check(g, s, t, flow, budget=INF, charge_terminals=False, tol=1e-9):
    """Return (value, cost, violations) for a flow given on directed edges."""
    inflow = {v: 0.0 for v in g.adj}
    outflow = {v: 0.0 for v in g.adj}
    cost = 0.0
    bad = []
    for (u, v), x in flow.items():
        if x < -tol:
            bad.append(f"negative flow on ({u},{v})")
        if v not in g.adj.get(u, ()):
            bad.append(f"flow on missing edge ({u},{v})")
            continue
        outflow[u] += x
        inflow[v] += x
        cap = g.edge_cap.get((u, v), INF)
        if x > cap * (1 + tol) + tol:
            bad.append(f"edge ({u},{v}) over capacity")
        cost += x * g.edge_cost.get((u, v), 0.0)
    value = outflow[s] - inflow[s]
    scale = max([1.0] + [abs(x) for x in flow.values()])
    for v in g.adj:
        if v not in (s, t) and abs(inflow[v] - outflow[v]) > tol * scale:
            bad.append(f"conservation at {v}")
    for v in g.adj:
        through = inflow[v]
        if charge_terminals and v == s:
            through += value
        if v in (s, t) and not charge_terminals:
            continue
        if through > g.vertex_cap.get(v, 0.0) * (1 + tol) + tol:
            bad.append(f"vertex {v} over capacity")
        cost += through * g.vertex_cost.get(v, 0.0)
    if cost > budget * (1 + tol) + tol:
        bad.append("budget exceeded")
    return value, cost, bad


# cuts -----------------------------------------------------------------------

def oracle_sparse_cut(adj, X, kappa, threshold=INF, max_n=16):
    """Exhaustive sparsest vertex cut (L, S, R).

    Minimises kappa(S) / |L & X| subject to 1 <= |L & X| <= |R & X| and no
    edge between L and R.  For a fixed L the best S is its neighbourhood,
    so enumerating L suffices.  Returns (ratio, L, S, R) or None when no
    cut has ratio below ``threshold``.
    """
    verts = sorted(adj)
    if len(verts) > max_n:
        raise OracleScaleError(f"oracle_sparse_cut limited to n <= {max_n}")
    X = set(X)
    if len(X) < 2:
        return None
    idx = {v: i for i, v in enumerate(verts)}
    nbmask = [0] * len(verts)
    for v in verts:
        for u in adj[v]:
            nbmask[idx[v]] |= 1 << idx[u]
    xmask = sum(1 << idx[v] for v in X)
    full = (1 << len(verts)) - 1
    best = None
    for L in range(1, full + 1):
        lx = bin(L & xmask).count("1")
        if lx == 0:
            continue
        N = 0
        rest = L
        while rest:
            low = rest & -rest
            N |= nbmask[low.bit_length() - 1]
            rest ^= low
        S = N & ~L
        R = full & ~L & ~S
        if lx > bin(R & xmask).count("1"):
            continue
        ks = sum(kappa.get(verts[i], 0.0) for i in range(len(verts)) if S >> i & 1)
        ratio = ks / lx
        if ratio < threshold and (best is None or ratio < best[0] - 1e-12):
            best = (ratio, L, S, R)
    if best is None:
        return None
    ratio, L, S, R = best
    unpack = lambda M: {verts[i] for i in range(len(verts)) if M >> i & 1}
    return ratio, unpack(L), unpack(S), unpack(R)


def oracle_min_conductance(wadj, max_n=16):
    """Exhaustive minimum conductance of a weighted graph {v: {u: w}}.

    conductance(A) = w(A, V-A) / min(vol A, vol V-A); isolated vertices
    count with zero volume.  Returns (phi, A) or (inf, None) for |V| < 2.
    """
    verts = sorted(wadj)
    if len(verts) > max_n:
        raise OracleScaleError(f"oracle_min_conductance limited to n <= {max_n}")
    if len(verts) < 2:
        return INF, None
    vol = {v: sum(wadj[v].values()) for v in verts}
    total = sum(vol.values())
    best = (INF, None)
    first, rest = verts[0], verts[1:]
    for k in range(0, len(rest) + 1):
        for comb in combinations(rest, k):
            A = {first, *comb}
            if len(A) == len(verts):
                continue
            va = sum(vol[v] for v in A)
            denom = min(va, total - va)
            cut = sum(w for v in A for u, w in wadj[v].items() if u not in A)
            if denom <= 0:
                phi = 0.0 if cut == 0 else INF
            else:
                phi = cut / denom
            if phi < best[0]:
                best = (phi, A)
    return best


def oracle_min_vertex_cut(adj, s, t, kappa):
    """Exhaustive minimum-weight s-t vertex separator (s, t non-adjacent)."""
    others = sorted(v for v in adj if v not in (s, t))
    if len(others) > 16:
        raise OracleScaleError("oracle_min_vertex_cut limited to 16 inner vertices")
    best = INF
    for k in range(len(others) + 1):
        for S in combinations(others, k):
            S = set(S)
            seen = {s}
            stack = [s]
            while stack:
                v = stack.pop()
                for u in adj[v]:
                    if u not in seen and u not in S:
                        seen.add(u)
                        stack.append(u)
            if t not in seen:
                best = min(best, sum(kappa[v] for v in S))
    return best
