"""Path-reporting s-t shortest paths under increasing vertex weights.

Vertex weights are moved onto edges: edge (x, y) weighs (w'(x) + w'(y))/2,
so an s-t path pays every inner vertex in full and the endpoints at half
of w'.  A first ES tree with w'(s) = 0 and w'(t) = 2 w(t) gives the
distance estimate d''.  A second tree charges the source eps * d'' / 4,
which makes any near-shortest walk visit s only once, and reports the
associated path pi(s, t).

Increases are buffered and pushed into both trees in one batch right
before the next query, so pi(s, t) is fixed between updates and does not
depend on the threshold a query asks for.
"""

import math

from decflow.estree import ESTree
from decflow.graph import GraphError, TOL

INF = math.inf


class SsspPi:
    def __init__(self, g, s, t, w, sigma, eps):
        adj = g.adj if hasattr(g, "adj") else g
        if s not in adj or t not in adj:
            raise GraphError("source or sink not in graph")
        if w.get(s, 0.0) != 0 or w.get(t, 0.0) != 0:
            raise GraphError("vertex weights of s and t must be zero")
        self.s, self.t, self.eps = s, t, float(eps)
        self.beta = 1
        self.sigma = dict(sigma)
        self.w = {v: float(w.get(v, 0.0)) for v in adj}
        for v, x in self.w.items():
            if x < 0:
                raise GraphError(f"negative weight on vertex {v}")
        self.nbrs = {v: sorted(nb) for v, nb in adj.items()}
        self.pending = {}
        self.refreshes = 0
        self.first = ESTree(self._edge_weights(0.0), [s], copy=False)
        self.d2 = self.first.level[t]
        self.second = ESTree(self._edge_weights(self._source_weight()), [s],
                             steadiness=self.sigma, copy=False)
        self._fix_path()

    # weights --------------------------------------------------------------

    def _source_weight(self):
        self.d2_used = self.d2
        return self.eps * self.d2 / 4 if self.d2 < INF else 0.0

    def _wv(self, v, ws):
        if v == self.s:
            return ws
        if v == self.t:
            return 2 * self.w[v]
        return self.w[v]

    def _edge_weights(self, ws):
        return {x: {y: (self._wv(x, ws) + self._wv(y, ws)) / 2 for y in nb}
                for x, nb in self.nbrs.items()}

    # updates --------------------------------------------------------------

    def increase_vertex_weight(self, v, value):
        if v in (self.s, self.t):
            raise GraphError("weights of s and t are fixed")
        old = self.pending.get(v, self.w[v])
        if value < old - TOL * max(1.0, abs(old)):
            raise GraphError(f"weight decrease on vertex {v}: {old} -> {value}")
        self.pending[v] = max(float(value), old)

    def flush(self):
        if not self.pending:
            return
        changed = sorted(self.pending)
        for v in changed:
            self.w[v] = self.pending[v]
        self.pending = {}
        edges = sorted({(min(v, y), max(v, y)) for v in changed for y in self.nbrs[v]})
        ws = self.eps * self.d2_used / 4 if self.d2_used < INF else 0.0
        for tree, src in ((self.first, 0.0), (self.second, ws)):
            tree.batch([("i", x, y, (self._wv(x, src) + self._wv(y, src)) / 2)
                        for x, y in edges])
        self.d2 = self.first.level[self.t]
        if self.d2 < INF and self.d2 > (1 + self.eps / 4) * self.d2_used + TOL:
            self._refresh()
        self._fix_path()

    def _refresh(self):
        """Raise w'''(s) to eps * d'' / 4 on the edges leaving s."""
        self.refreshes += 1
        ws = self._source_weight()
        self.second.batch([("i", self.s, y, (ws + self._wv(y, ws)) / 2)
                           for y in self.nbrs[self.s]])

    def _fix_path(self):
        if self.second.level[self.t] == INF:
            self._path = None
        else:
            self._path = self.second.path(self.t)

    # queries --------------------------------------------------------------

    def distance(self):
        """The first tree's estimate d''(t), which is exact here."""
        self.flush()
        return self.d2

    def connected(self):
        self.flush()
        return self._path is not None

    def path(self):
        self.flush()
        if self._path is None:
            raise GraphError("s and t are disconnected")
        return list(self._path)

    def path_edges(self):
        p = self.path()
        return list(zip(p, p[1:]))

    def path_weight(self):
        return sum(self.w[v] for v in self.path()[1:])

    def min_steadiness(self):
        self.flush()
        if self._path is None:
            raise GraphError("s and t are disconnected")
        return self.second.min_st[self.t]

    def threshold_subpath(self, j):
        """sigma_{<=j}(pi(s, t)): path edges of steadiness at most j, in order."""
        self.flush()
        if self._path is None:
            raise GraphError("s and t are disconnected")
        if j < self.second.min_st[self.t]:
            return []
        return [e for e in zip(self._path, self._path[1:]) if self.sigma.get(e, INF) <= j]


def sssp_init(g, s, t, w, sigma, eps):
    return SsspPi(g, s, t, w, sigma, eps)


def sssp_increase_vertex_weight(h, v, value):
    h.increase_vertex_weight(v, value)
    return h


def sssp_threshold_subpath(h, j):
    return h.threshold_subpath(j)
