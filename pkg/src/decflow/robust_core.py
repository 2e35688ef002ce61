"""Robust core: a decremental low-diameter core kept alive by congestion balancing.

Each phase certifies a large low-diameter subset K' of K^init (or learns
that K^init is scattered and stops), then embeds an expander witness into
the heavy-path-augmented graph, doubling capacities on every sparse cut the
embedding runs into.  The witness is pruned under deletions, and a vertex
leaves K once it is far from the surviving pruned set X.
"""

from dataclasses import dataclass
from fractions import Fraction
import math
import random

from decflow.estree import ESTree
from decflow.expander import (CapacityFn, PruneBudgetError, Prune, Scattered, VertexCut,
                              certify_core, embed_witness)
from decflow.graph import GraphError, Hypergraph, InvariantError, TOL, bounded_ball

INF = math.inf


@dataclass
class CoreParams:
    delta_scatter: float = 0.25
    str_core: float = 64.0
    eps_wit: float = 0.1
    phi: float = 0.2
    rho: float = 0.1
    c_cap: float = 64.0
    max_phases: int = 500
    retries: int = 8
    rounds: int = None
    height: int = None
    exhaustive_limit: int = 12

    @property
    def eps_cert(self):
        # a Scattered answer from certify_core bounds balls by (1 - eps/2)|K|
        return 2 * self.delta_scatter


def _fmt(x):
    return f"{float(x):.9f}"


class RobustCore:
    """Maintain K within K^init under deletions and weight increases of G.

    ``hyper`` maps keys to vertex sets of a compressed hypergraph of G with
    parameter ``d``; when omitted the edges of weight at most d are used.
    """

    def __init__(self, g, K_init, D, hyper=None, d=1.0, params=None, rng=None, n=None):
        adj = g.adj if hasattr(g, "adj") else g
        if not K_init:
            raise GraphError("robust core needs a nonempty K^init")
        self.p = params or CoreParams()
        self.rng = rng if rng is not None else random.Random(0)
        self.K_init = frozenset(K_init)
        self.D = float(D)
        self.d = float(d)
        self.n = n if n is not None else len(adj)
        self.lg = max(1.0, math.log2(max(self.n, 2)))
        for v in sorted(self.K_init):
            near = bounded_ball(adj, [v], 2 * self.D)
            if not self.K_init <= set(near):
                raise GraphError(f"K^init is not within distance {2 * self.D:g} of vertex {v}")
        self.radius = 32 * self.D * self.lg
        self.B = frozenset(bounded_ball(adj, self.K_init, self.radius))
        self.adj = {v: {u: w for u, w in adj[v].items() if u in self.B} for v in self.B}
        self._build_hat(hyper)
        self.gamma = Fraction(len(self.Vhat), 4 * len(self.K_init))
        self.kappa = {v: Fraction(2) if v in self.K_init else 1 / self.gamma for v in self.Vhat}
        self.K = set(self.K_init)
        self.X = set()
        self.phase = 0
        self.doublings = 0
        self.done = False
        self.trace = []
        self.es = None
        self.prune = None
        self.paths = {}
        self.edge_paths = {}
        if len(self.K_init) >= 2:
            self._new_phase()
        else:
            self.X = set(self.K_init)

    # heavy-path-augmented graph ------------------------------------------

    def _build_hat(self, hyper):
        edges = []
        self.hyper_index = {}
        self._unit = hyper is None

        def add(key, members):
            self.hyper_index.setdefault(key, []).append(len(edges))
            edges.append(frozenset(members))

        local = sorted((u, v, w) for u, nb in self.adj.items() for v, w in nb.items() if u < v)
        if hyper is None:
            for u, v, w in local:
                if w <= self.d + TOL:
                    add(("g", u, v), (u, v))
        else:
            for key in sorted(hyper, key=repr):
                members = set(hyper[key]) & self.B
                if len(members) >= 2:
                    add(("c", key), members)
        self._fresh = max(self.adj) + 1
        self.Vhat = set(self.B)
        self.H = Hypergraph(self.Vhat, edges)
        for u, v, w in local:
            self._add_heavy(u, v, w)
        self._two_smallest = sorted(self.B)[:2]

    def _add_heavy(self, u, v, w):
        """Chain of ceil(w/d) unit hyperedges through fresh vertices."""
        if not self.d + TOL < w <= self.radius + TOL:
            return []
        k = max(1, math.ceil(w / self.d - TOL))
        chain = [u] + list(range(self._fresh, self._fresh + k - 1)) + [v]
        self._fresh += k - 1
        fresh = chain[1:-1]
        self.Vhat.update(fresh)
        self.H.vertices.update(fresh)
        key = ("h", min(u, v), max(u, v))
        for a, b in zip(chain, chain[1:]):
            self.hyper_index.setdefault(key, []).append(len(self.H.hyperedges))
            self.H.hyperedges.append(frozenset((a, b)))
        return fresh

    # bookkeeping ------------------------------------------------------------

    def _log(self, line):
        self.trace.append(line)

    def kappa_total(self):
        return sum(self.kappa.values(), Fraction(0))

    def budget(self):
        return self.p.c_cap * len(self.K_init) * max(1.0, self.D / self.d) * self.lg ** 2

    def _check_side(self, Kp):
        total = self.kappa_total()
        for v in Kp:
            if self.kappa[v] < 2:
                raise InvariantError(f"terminal {v} has capacity below 2")
        top = max(self.kappa.values())
        if top > total / 2:
            raise InvariantError("a vertex holds more than half the capacity")

    # phases -----------------------------------------------------------------

    def _balance(self, Kp):
        """Double capacities on sparse cuts until a witness embeds."""
        while True:
            self._check_side(Kp)
            res = embed_witness(self.H, Kp, CapacityFn.of(self.kappa), self.rng,
                                eps_wit=self.p.eps_wit, phi=self.p.phi, rho=self.p.rho,
                                rounds=self.p.rounds, height=self.p.height,
                                exhaustive_limit=self.p.exhaustive_limit)
            if not isinstance(res, VertexCut):
                return res
            if not res.S:
                raise InvariantError("sparse cut with an empty separator")
            for v in res.S:
                self.kappa[v] *= 2
            w = min(res.S, key=lambda v: (-self.kappa[v], v))
            w2 = self._two_smallest[0] if self._two_smallest[0] != w else self._two_smallest[1]
            self.kappa[w2] = max(self.kappa[w2], self.kappa[w])
            self.doublings += 1
            total = self.kappa_total()
            self._log(f"double phase={self.phase} S={','.join(map(str, sorted(res.S)))} "
                      f"total={_fmt(total)}")
            if total > self.budget():
                raise InvariantError(f"total capacity {float(total):.3f} exceeds the budget")

    def _start_prune(self, wit):
        self.paths = {}
        self.edge_paths = {}
        multi = {v: {} for v in wit.X}
        for pid, (path, val) in enumerate(wit.embedding.paths):
            a, b = path[0], path[-1]
            copies = max(1, round(val / self.gamma))
            multi[a][b] = multi[a].get(b, 0) + copies
            multi[b][a] = multi[b].get(a, 0) + copies
            self.paths[pid] = (a, b, copies, path)
            for node in path[1::2]:
                self.edge_paths.setdefault(node[1], set()).add(pid)
        self.prune = Prune(multi, self.p.phi, exhaustive_limit=self.p.exhaustive_limit)
        return set(self.prune.X)

    def _new_phase(self):
        tries = 0
        while True:
            self.phase += 1
            if self.phase > self.p.max_phases:
                raise InvariantError("robust core exceeded its phase bound")
            res = certify_core(self.adj, self.K_init, 2 * self.D, self.p.eps_cert, n=self.n)
            if isinstance(res, Scattered):
                self._log(f"phase {self.phase} scattered")
                self.done = True
                self.X = set()
                self.es = None
                self.prune = None
                return
            wit = self._balance(res.K)
            X = self._start_prune(wit)
            self._log(f"phase {self.phase} core={len(res.K)} X={len(X)}")
            if 2 * len(X) >= len(self.K_init):
                break
            tries += 1
            if tries > self.p.retries:
                raise InvariantError("witness stayed below half of K^init")
        self.X = X
        self.es = ESTree(self.adj, X, depth=4.4 * self.D)

    def _evict(self):
        if self.done:
            gone = sorted(self.K)
        else:
            gone = sorted(v for v in self.K if self.es.level.get(v, INF) == INF)
        for v in gone:
            self.K.discard(v)
            self._log(f"evict {v} phase={self.phase}")
        return gone

    # updates ----------------------------------------------------------------

    def delete(self, u, v):
        return self._update(("d", u, v))

    def increase(self, u, v, w):
        return self._update(("i", u, v, float(w)))

    def _kill(self, key, destroyed):
        for i in self.hyper_index.pop(key, ()):
            self.H.hyperedges[i] = frozenset()
            destroyed |= self.edge_paths.pop(i, set())

    def _update(self, op):
        u, v = op[1], op[2]
        if self.done or (u not in self.B and v not in self.B):
            return []
        destroyed = set()
        es_ops = []
        if u in self.adj and v in self.adj[u]:
            old = self.adj[u][v]
            a, b = min(u, v), max(u, v)
            if op[0] == "d":
                del self.adj[u][v]
                del self.adj[v][u]
            else:
                self.adj[u][v] = self.adj[v][u] = op[3]
            if self._unit and (op[0] == "d" or op[3] > self.d + TOL):
                self._kill(("g", a, b), destroyed)
            if op[0] == "d" or math.ceil(op[3] / self.d - TOL) != math.ceil(old / self.d - TOL):
                self._kill(("h", a, b), destroyed)
                if op[0] == "i":
                    # the heavier edge re-enters as a fresh, longer heavy path
                    for x in self._add_heavy(u, v, op[3]):
                        self.kappa[x] = 1 / self.gamma
            es_ops.append(op)
        return self._after(destroyed, es_ops)

    def hyper_update(self, key, members):
        """Shrink (or drop, when ``members`` is None) a compressed hyperedge."""
        if self.done or self._unit:
            return []
        destroyed = set()
        key = ("c", key)
        keep = set(members or ()) & self.B
        if len(keep) < 2:
            self._kill(key, destroyed)
        else:
            for i in self.hyper_index.get(key, ()):
                gone = self.H.hyperedges[i] - keep
                if not gone:
                    continue
                self.H.hyperedges[i] = self.H.hyperedges[i] & keep
                for pid in list(self.edge_paths.get(i, ())):
                    path = self.paths[pid][3]
                    for j in range(1, len(path), 2):
                        if path[j][1] == i and (path[j - 1] in gone or path[j + 1] in gone):
                            destroyed.add(pid)
                            break
        return self._after(destroyed, [])

    def _after(self, destroyed, es_ops):
        if self.es is None:
            return []
        restart = False
        for pid in sorted(destroyed):
            entry = self.paths.pop(pid, None)
            if entry is None:
                continue
            a, b, copies, path = entry
            for node in path[1::2]:
                self.edge_paths.get(node[1], set()).discard(pid)
            if restart:
                continue
            try:
                self.prune.delete(a, b, copies)
            except PruneBudgetError:
                restart = True
        if not restart and 2 * len(self.prune.X) < len(self.K_init):
            restart = True
        if restart:
            self._new_phase()
        else:
            left = self.X - self.prune.X
            self.X = set(self.prune.X)
            self.es.batch(es_ops + [("s", x) for x in sorted(left)])
        return self._evict()


def robust_core_init(g, K_init, D, compressed=None, params=None, rng=None, d=1.0, n=None):
    return RobustCore(g, K_init, D, hyper=compressed, d=d, params=params, rng=rng, n=n)


def robust_core_delete(state, u, v):
    return state.delete(u, v)
