"""Dynamic undirected graph substrate.

Edges are stored as anti-parallel directed pairs with equal weight.  The
graph only supports deletions and weight increases; every applied update
bumps ``version`` by one and is appended to ``update_log`` so that the
current state can be replayed from version 0.
"""

import heapq
import math

TOL = 1e-9
INF = math.inf


class GraphError(ValueError):
    """Raised on malformed input or a violated update contract."""


class InvariantError(AssertionError):
    """Raised when a maintained structure breaks one of its guarantees."""


class DynGraph:
    def __init__(self):
        self.adj = {}
        self.vertex_cap = {}
        self.vertex_cost = {}
        self.edge_cap = {}
        self.edge_cost = {}
        self.version = 0
        self.update_log = []
        self._initial = None

    # construction -------------------------------------------------------

    def add_vertex(self, v, cap=0.0, cost=0.0):
        if cap < 0 or cost < 0:
            raise GraphError(f"vertex {v}: negative capacity or cost")
        self.adj.setdefault(v, {})
        self.vertex_cap[v] = float(cap)
        self.vertex_cost[v] = float(cost)

    def _add_edge(self, u, v, w):
        if u == v:
            raise GraphError(f"self loop ({u},{v})")
        if not w > 0 or math.isnan(w):
            raise GraphError(f"nonpositive weight on edge ({u},{v}): {w}")
        for x in (u, v):
            if x not in self.adj:
                self.add_vertex(x)
        if v in self.adj[u]:
            raise GraphError(f"duplicate edge ({u},{v})")
        self.adj[u][v] = float(w)
        self.adj[v][u] = float(w)

    def _freeze_initial(self):
        self._initial = (
            {v: dict(nb) for v, nb in self.adj.items()},
            dict(self.vertex_cap),
            dict(self.vertex_cost),
        )

    # views --------------------------------------------------------------

    @property
    def vertices(self):
        return set(self.adj)

    @property
    def n(self):
        return len(self.adj)

    @property
    def m(self):
        """Number of undirected edges."""
        return sum(len(nb) for nb in self.adj.values()) // 2

    @property
    def edges(self):
        """Map of directed pairs (u, v) to weight."""
        return {(u, v): w for u, nb in self.adj.items() for v, w in nb.items()}

    def undirected_edges(self):
        """Sorted list of (u, v, w) with u < v."""
        return sorted((u, v, w) for u, nb in self.adj.items()
                      for v, w in nb.items() if u < v)

    def cap(self, v):
        return self.vertex_cap.get(v, 0.0)

    def cost(self, v):
        return self.vertex_cost.get(v, 0.0)

    def has_edge(self, u, v):
        return u in self.adj and v in self.adj[u]

    def weight(self, u, v):
        try:
            return self.adj[u][v]
        except KeyError:
            raise GraphError(f"missing edge ({u},{v})") from None

    def neighbors(self, v):
        return self.adj[v]

    def degree(self, v):
        return len(self.adj[v])

    def max_degree(self):
        return max((len(nb) for nb in self.adj.values()), default=0)

    def copy(self):
        g = DynGraph()
        g.adj = {v: dict(nb) for v, nb in self.adj.items()}
        g.vertex_cap = dict(self.vertex_cap)
        g.vertex_cost = dict(self.vertex_cost)
        g.edge_cap = dict(self.edge_cap)
        g.edge_cost = dict(self.edge_cost)
        g.version = self.version
        g.update_log = list(self.update_log)
        g._initial = self._initial
        return g

    def snapshot(self):
        """Copy of the current state with a fresh log at version 0."""
        g = self.copy()
        g.version = 0
        g.update_log = []
        g._freeze_initial()
        return g

    # decremental updates ------------------------------------------------

    def delete_edge(self, u, v):
        if not self.has_edge(u, v):
            raise GraphError(f"missing edge ({u},{v})")
        del self.adj[u][v]
        del self.adj[v][u]
        self.version += 1
        self.update_log.append((self.version, ("d", u, v)))
        return self

    def increase_weight(self, u, v, w):
        old = self.weight(u, v)
        if w < old:
            raise GraphError(f"weight decrease on ({u},{v}): {old} -> {w}")
        self.adj[u][v] = float(w)
        self.adj[v][u] = float(w)
        self.version += 1
        self.update_log.append((self.version, ("i", u, v, float(w))))
        return self

    def apply(self, op):
        if op[0] == "d":
            return self.delete_edge(op[1], op[2])
        if op[0] == "i":
            return self.increase_weight(op[1], op[2], op[3])
        raise GraphError(f"unknown update {op!r}")

    def replay(self, upto=None):
        """Rebuild the graph from version 0 by replaying the log."""
        if self._initial is None:
            raise GraphError("graph has no recorded initial state")
        adj, caps, costs = self._initial
        g = DynGraph()
        g.adj = {v: dict(nb) for v, nb in adj.items()}
        g.vertex_cap = dict(caps)
        g.vertex_cost = dict(costs)
        g.edge_cap = dict(self.edge_cap)
        g.edge_cost = dict(self.edge_cost)
        g._initial = self._initial
        for version, op in self.update_log:
            if upto is not None and version > upto:
                break
            g.apply(op)
        return g

    # queries ------------------------------------------------------------

    def bounded_ball(self, sources, r):
        return bounded_ball(self.adj, sources, r)

    def hypergraph(self):
        """Incidence view with every edge as a 2-element hyperedge."""
        return Hypergraph(self.adj, [frozenset((u, v)) for u, v, _ in self.undirected_edges()])


def build(edge_list, caps=None, costs=None, vertices=()):
    """Build a version-0 graph from (u, v, w) triples.

    Each input triple is one undirected edge; listing both (u, v) and
    (v, u) is rejected as a duplicate.
    """
    caps = caps or {}
    costs = costs or {}
    g = DynGraph()
    for v in sorted(set(vertices) | set(caps) | set(costs)):
        g.add_vertex(v, caps.get(v, 0.0), costs.get(v, 0.0))
    for u, v, w in edge_list:
        g._add_edge(u, v, w)
    for v in g.adj:
        g.vertex_cap.setdefault(v, 0.0)
        g.vertex_cost.setdefault(v, 0.0)
    g._freeze_initial()
    return g


def delete_edge(g, u, v):
    return g.delete_edge(u, v)


def increase_weight(g, u, v, w):
    return g.increase_weight(u, v, w)


def bounded_ball(adj, sources, r):
    """Exact distances {v: dist(S, v)} for every v with dist(S, v) <= r.

    Dijkstra keyed by (distance, id) so ties settle on the smaller id.
    """
    dist = {}
    heap = [(0.0, s) for s in sorted(sources)]
    heapq.heapify(heap)
    best = {s: 0.0 for s in sources}
    while heap:
        d, v = heapq.heappop(heap)
        if v in dist:
            continue
        dist[v] = d
        for u, w in adj[v].items():
            nd = d + w
            if nd > r + TOL or u in dist:
                continue
            if nd < best.get(u, INF):
                best[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist


class Hypergraph:
    """Vertex set with a list of hyperedges and a bipartite incidence view.

    Hyperedges are frozensets; the same vertex may sit in many of them.
    """

    def __init__(self, vertices, hyperedges):
        self.vertices = set(vertices)
        self.hyperedges = [frozenset(e) for e in hyperedges]
        for e in self.hyperedges:
            if not e <= self.vertices:
                raise GraphError(f"hyperedge {sorted(e)} has unknown vertices")

    @property
    def size(self):
        """|H|, the total incidence count."""
        return sum(len(e) for e in self.hyperedges)

    def incidence(self):
        """Edges (v, i) of H_bip, i indexing ``hyperedges``."""
        return [(v, i) for i, e in enumerate(self.hyperedges) for v in sorted(e)]

    def neighbors(self):
        """Vertex adjacency: u ~ v iff they share a hyperedge."""
        nb = {v: set() for v in self.vertices}
        for e in self.hyperedges:
            for v in e:
                nb[v].update(e)
        for v in nb:
            nb[v].discard(v)
        return nb

    def induced(self, keep):
        """H[S]: hyperedges restricted to S, dropping those that become empty."""
        keep = set(keep)
        edges = [e & keep for e in self.hyperedges]
        return Hypergraph(keep, [e for e in edges if e])
