"""Input normalizations for the shortest-path and flow layers.

``normalize`` rewrites a decremental graph into one that stays connected,
sees only deletions and has degree at most 3.  ``to_vertex_capacitated``
moves all capacities and costs of a mixed instance onto vertices, with
bounded ranges, using the crude optimum estimate ``crude_approx_opt``.
``edge_split`` subdivides every edge of a vertex-capacitated instance.
"""

from collections import deque
from dataclasses import dataclass, field
import math

from decflow.graph import DynGraph, GraphError, TOL, build

INF = math.inf


# degree / weight normalization ---------------------------------------------

class Normalized:
    """A bounded-degree, deletion-only, connected image of a decremental graph.

    Edge (u, v) of weight w gets geometric copies of weight w (1+eps)^j up
    to ``wmax`` (default: the largest initial weight, so a static graph keeps
    a single copy per edge); copies beyond the first are subdivided at a
    midpoint.  A weight increase deletes the copies that became too light.
    Vertices of degree above 3 become a path of connector vertices joined by
    edges of weight w_min/n^3, and all weights are multiplied by ``scale``
    so the smallest is 1.  Deletions that would disconnect the image are
    filtered out.
    """

    def __init__(self, g, eps, wmax=None):
        if not 0 < eps < 0.5:
            raise GraphError("eps must lie in (0, 1/2)")
        self.g = g.copy()
        self.eps = eps
        n = max(g.n, 2)
        weights = [w for _, _, w in g.undirected_edges()]
        wmin = min(weights, default=1.0)
        self.wmax = wmax if wmax is not None else max(weights, default=1.0)
        self.tiny = wmin / n ** 3
        self.filtered = []
        ids = iter(range(max(g.adj, default=-1) + 1, 1 << 62))
        self.copies = {}
        slots = {v: [] for v in g.adj}
        for u, v, w in g.undirected_edges():
            lst = []
            j = 0
            while True:
                cw = w * (1 + eps) ** j
                mid = None if j == 0 else next(ids)
                lst.append((cw, j, mid))
                slots[u].append(((u, v), j))
                slots[v].append(((u, v), j))
                if cw >= self.wmax * (1 - TOL):
                    break
                j += 1
            self.copies[(u, v)] = lst
        self.port = {}
        edges = []
        needs_chain = any(len(sl) > 3 for sl in slots.values())
        self.scale = 1.0 / self.tiny if needs_chain else 1.0 / wmin
        for v in sorted(g.adj):
            if len(slots[v]) <= 3:
                for slot in slots[v]:
                    self.port[(v,) + slot] = v
                continue
            chain = [v] + [next(ids) for _ in slots[v]]
            for a, b in zip(chain, chain[1:]):
                edges.append((a, b, self.tiny))
            for slot, p in zip(slots[v], chain[1:]):
                self.port[(v,) + slot] = p
        for (u, v), lst in self.copies.items():
            for cw, j, mid in lst:
                a, b = self.port[(u, (u, v), j)], self.port[(v, (u, v), j)]
                if mid is None:
                    edges.append((a, b, cw))
                else:
                    edges += [(a, mid, cw / 2), (mid, b, cw / 2)]
        self.h = build([(a, b, w * self.scale) for a, b, w in edges], vertices=g.adj)

    def _cut_edge(self, key, j, mid):
        a = self.port[(key[0], key, j)]
        if mid is None:
            return (a, self.port[(key[1], key, j)])
        return (mid, a)

    def _connected_without(self, removed):
        adj = self.h.adj
        start = next(iter(adj))
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen and frozenset((x, y)) not in removed:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == len(adj)

    def apply(self, op):
        """Forward one update of G; returns the deletions applied to H."""
        u, v = op[1], op[2]
        key = (u, v) if (u, v) in self.copies else (v, u)
        if key not in self.copies:
            raise GraphError(f"missing edge ({u},{v})")
        self.g.apply(op)
        if op[0] == "d":
            doomed = list(self.copies[key])
        else:
            doomed = [c for c in self.copies[key] if c[0] < op[3] * (1 - TOL)]
        cut = [self._cut_edge(key, j, mid) for _, j, mid in doomed]
        if cut and not self._connected_without({frozenset(e) for e in cut}):
            self.filtered.append(op)
            return []
        for c, e in zip(doomed, cut):
            self.h.delete_edge(*e)
            self.copies[key].remove(c)
        return [("d",) + e for e in cut]

    def image(self, v):
        return v

    def distance_map(self, hdist):
        """Translate H-distances back to G units."""
        return {v: hdist[v] / self.scale for v in self.g.adj if v in hdist}


def normalize(g, eps, wmax=None):
    norm = Normalized(g, eps, wmax)
    return norm.h, norm


# crude optimum ----------------------------------------------------------------

def _uf_find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _approx_items(g, s, t):
    """(c_approx, u_approx, x, y) per undirected edge, terminals charged nothing."""
    def ucap(v):
        return INF if v in (s, t) else g.vertex_cap.get(v, 0.0)

    def vcost(v):
        return 0.0 if v in (s, t) else g.vertex_cost.get(v, 0.0)

    items = []
    for x, y, _ in g.undirected_edges():
        ue = min(g.edge_cap.get((x, y), INF), g.edge_cap.get((y, x), INF))
        ce = max(g.edge_cost.get((x, y), 0.0), g.edge_cost.get((y, x), 0.0))
        items.append((max(ce, vcost(x), vcost(y)), min(ue, ucap(x), ucap(y)), x, y))
    items.sort(key=lambda it: (it[0], -it[1], it[2], it[3]))
    return items


def crude_approx_opt(g, s, t, budget):
    """Crude optimum estimate with OPT/2m^2 <= U~ <= OPT.

    Edges enter in order of c_approx; after each prefix the bottleneck of the
    maximum spanning forest path s -> t is recomputed by Kruskal.
    """
    items = _approx_items(g, s, t)
    m = max(g.m, 1)
    best = 0.0
    for i in range(len(items)):
        prefix = sorted(items[:i + 1], key=lambda it: (-it[1], it[2], it[3]))
        parent = {v: v for v in g.adj}
        bottleneck = 0.0
        for c, u, x, y in prefix:
            a, b = _uf_find(parent, x), _uf_find(parent, y)
            if a != b:
                parent[a] = b
            if _uf_find(parent, s) == _uf_find(parent, t):
                bottleneck = u
                break
        if bottleneck <= 0:
            continue
        c_i = items[i][0]
        cost_term = INF if c_i <= 0 or budget == INF else budget / (2 * m * c_i)
        best = max(best, min(bottleneck, cost_term))
    return best


# mixed capacities -> vertex capacities -------------------------------------

@dataclass
class ReductionMap:
    s: object
    t: object
    s2: int
    t2: int
    utilde: float
    gamma_u: float
    gamma_c: float
    tau_u: float
    tau_c: float
    budget: float
    vertex_map: dict = field(default_factory=dict)
    split: dict = field(default_factory=dict)
    dropped_vertices: list = field(default_factory=list)
    dropped_edges: list = field(default_factory=list)


def to_vertex_capacitated(g, s, t, budget, eps, min_edges=16):
    """Return (g', s', t', C', rmap) with capacities and costs on vertices only."""
    m = g.m
    if m < min_edges:
        raise GraphError(f"instance has m={m} < {min_edges} edges")
    if eps is not None and not 1 / max(g.n, 1) < eps < 1:
        raise GraphError("eps must lie in (1/n, 1)")
    ut = crude_approx_opt(g, s, t, budget)
    if ut <= 0:
        raise GraphError("s and t are disconnected (or every route is unusable)")
    if ut == INF:
        raise GraphError("unbounded flow: an s-t route has no finite capacity")
    tau_u = ut / (8 * m * m)
    tau_c = budget * 8 * m / ut
    gamma_u = tau_u
    gamma_c = budget / (4 * ut * m * m)
    cap_top = ut * 2 * m * m

    def ucap(v):
        return INF if v in (s, t) else g.vertex_cap.get(v, 0.0)

    def vcost(v):
        return 0.0 if v in (s, t) else g.vertex_cost.get(v, 0.0)

    def scaled_cost(c):
        if c <= 0:
            return 0.0
        if gamma_c == INF:
            return 0.0
        return max(c / gamma_c, 1.0) if gamma_c > 0 else INF

    reasonable = sorted(v for v in g.adj if ucap(v) >= tau_u and vcost(v) <= tau_c)
    rset = set(reasonable)
    rmap = ReductionMap(s=s, t=t, s2=None, t2=None, utilde=ut, gamma_u=gamma_u,
                        gamma_c=gamma_c, tau_u=tau_u, tau_c=tau_c, budget=budget)
    rmap.dropped_vertices = sorted(set(g.adj) - rset)
    base = max(g.adj) + 1
    rmap.s2, rmap.t2 = base, base + 1
    caps, costs, edges = {}, {}, []
    for v in reasonable:
        caps[v] = min(ucap(v), cap_top) / gamma_u
        costs[v] = scaled_cost(vcost(v))
        rmap.vertex_map[v] = v
    caps[base] = caps[base + 1] = cap_top / gamma_u
    costs[base] = costs[base + 1] = 0.0
    nxt = base + 2
    for x, y, _ in g.undirected_edges():
        ue = min(g.edge_cap.get((x, y), INF), g.edge_cap.get((y, x), INF))
        ce = max(g.edge_cost.get((x, y), 0.0), g.edge_cost.get((y, x), 0.0))
        if not (x in rset and y in rset and ue >= tau_u and ce <= tau_c):
            rmap.dropped_edges.append((x, y))
            continue
        v = nxt
        nxt += 1
        caps[v] = min(ue, cap_top) / gamma_u
        costs[v] = scaled_cost(ce)
        rmap.split[v] = (x, y)
        edges += [(x, v, 1.0), (v, y, 1.0)]
    edges += [(s, base, 1.0), (t, base + 1, 1.0)]
    g2 = build(edges, caps, costs, vertices=caps)
    budget2 = budget / (gamma_c * gamma_u) if 0 < gamma_c < INF else INF
    return g2, base, base + 1, budget2, rmap


def map_flow_back(flow2, g2, rmap, tol=1e-9):
    """Map an s'-t' flow of the reduced instance to a flow of the original.

    Anti-parallel flow through each split vertex is cancelled and the net
    amount, scaled by gamma_u, is placed on the original edge.
    """
    from decflow.oracles import flow_check
    _, _, bad = flow_check(g2, rmap.s2, rmap.t2, flow2, budget=INF, tol=tol)
    if bad:
        raise GraphError(f"reduced flow is infeasible: {bad[0]}")
    out = {}
    for v, (x, y) in sorted(rmap.split.items()):
        net = flow2.get((x, v), 0.0) - flow2.get((v, x), 0.0)
        if net > 0:
            out[(x, y)] = net * rmap.gamma_u
        elif net < 0:
            out[(y, x)] = -net * rmap.gamma_u
    return out


def flow_value(flow, s):
    return sum(x for (a, _), x in flow.items() if a == s) - \
        sum(x for (_, b), x in flow.items() if b == s)


# edge splitting ----------------------------------------------------------------

def edge_split(g, s=None, t=None):
    """Subdivide every edge by a vertex of capacity U (the largest capacity) and cost 0.

    Returns (g', split) with split mapping each new vertex to its edge (x, y), x < y.
    """
    finite = [c for v, c in g.vertex_cap.items() if c < INF and v not in (s, t)]
    U = max(finite, default=1.0)
    caps = dict(g.vertex_cap)
    costs = dict(g.vertex_cost)
    split = {}
    edges = []
    nxt = max(g.adj) + 1
    for x, y, _ in g.undirected_edges():
        v = nxt
        nxt += 1
        caps[v] = U
        costs[v] = 0.0
        split[v] = (x, y)
        edges += [(x, v, 1.0), (v, y, 1.0)]
    return build(edges, caps, costs, vertices=caps), split


def copy_with_caps(g, caps):
    h = DynGraph()
    h.adj = {v: dict(nb) for v, nb in g.adj.items()}
    h.vertex_cap = dict(caps)
    h.vertex_cost = dict(g.vertex_cost)
    h._freeze_initial()
    return h
