"""Coverings, the emulator with its monotone ES tree, and the layered driver.

A covering keeps levelled robust cores so that every vertex lies within
4 d_l of some core.  Each core has a shell ball; the shells define the
covering-compressed graph.  The emulator on top of a covering holds
core edges, heavy graph edges and near edges from a smaller-scale ball,
all rounded up to multiples of eps*d, and the monotone ES tree keeps
estimates on it that never decrease even when core edges are inserted.

Cover and shell balls are exact ES trees, which is the eps = 0 case of
the approximate ball they stand for.
"""

from dataclasses import dataclass, field
import heapq
import math
import random

from decflow.estree import ESTree
from decflow.graph import GraphError, InvariantError, TOL, bounded_ball
from decflow.robust_core import CoreParams, RobustCore

INF = math.inf


def round_up(x, q):
    """Smallest multiple of q that is at least x."""
    if x == INF:
        return INF
    if q <= 0:
        return x
    k = math.ceil(x / q - 1e-9)
    return max(k, 0) * q


@dataclass
class CoreEntry:
    cid: int
    level: int
    rc: RobustCore
    cover: ESTree
    shell: ESTree
    sources: set


class Covering:
    """Levelled cores over a decremental graph.

    ``lower`` is the covering one distance scale down; its shells form the
    compressed hypergraph handed to this covering's robust cores.  Without
    it the cores run on the edges of weight at most one.
    """

    def __init__(self, g, d, k, eps, str_, core_params=None, rng=None, lower=None, delta=None):
        adj = g.adj if hasattr(g, "adj") else g
        if d <= 0 or k < 1 or not 0 < eps < 1:
            raise GraphError("covering needs d > 0, k >= 1 and 0 < eps < 1")
        self.adj = {v: dict(nb) for v, nb in adj.items()}
        self.n = len(self.adj)
        self.d = float(d)
        self.k = int(k)
        self.eps = float(eps)
        self.str = float(str_)
        self.core_params = core_params or CoreParams(str_core=str_)
        self.rng = rng if rng is not None else random.Random(0)
        self.lower = lower
        self.cores = {}
        self.next_id = 0
        self.outer_count = {v: 0 for v in self.adj}
        self.delta = delta if delta is not None else self.default_delta()
        self.trace = []
        self._shells = {}
        self._fill()

    def default_delta(self):
        delta = self.core_params.delta_scatter
        return math.ceil(4 * self.k * self.n ** (2 / self.k) / delta) + 1

    def d_level(self, level):
        return self.d * (self.str / self.eps) ** level

    # construction -----------------------------------------------------------

    def choose_level(self, v):
        for level in range(self.k - 1):
            ball = bounded_ball(self.adj, [v], self.d_level(level + 1))
            if len(ball) <= self.n ** ((level + 1) / self.k) + TOL:
                return level
        return self.k - 1

    def covered(self):
        out = set()
        for entry in self.cores.values():
            out.update(v for v, lv in entry.cover.level.items() if lv < INF)
        return out

    def _spawn(self, v):
        level = self.choose_level(v)
        dl = self.d_level(level)
        C = set(bounded_ball(self.adj, [v], dl))
        if self.lower is None:
            hyper, dc = None, 1.0
        else:
            hyper, dc = self.lower.compressed_sets(), self.lower.d
        rc = RobustCore(self.adj, C, dl, hyper=hyper, d=dc, params=self.core_params,
                        rng=self.rng, n=self.n)
        cid = self.next_id
        self.next_id += 1
        if not rc.K:
            self.trace.append(f"core {cid} level={level} size={len(C)} empty")
            return
        sources = set(rc.K)
        cover = ESTree(self.adj, sources, depth=4 * dl)
        shell = ESTree(self.adj, sources, depth=self.str / (4 * self.eps) * dl)
        for x in bounded_ball(self.adj, C, self.str / (3 * self.eps) * dl):
            self.outer_count[x] += 1
        self.cores[cid] = CoreEntry(cid, level, rc, cover, shell, sources)
        self._shells[cid] = frozenset(shell.ball())
        self.trace.append(f"core {cid} level={level} size={len(C)}")

    def _fill(self):
        while True:
            missing = sorted(set(self.adj) - self.covered())
            if not missing:
                return
            before = len(self.cores)
            self._spawn(missing[0])
            if len(self.cores) == before and missing[0] not in self.covered():
                # a core that starts empty cannot cover its seed
                raise InvariantError(f"vertex {missing[0]} cannot be covered")

    # queries ------------------------------------------------------------------

    def core_sets(self):
        return {cid: set(e.rc.K) for cid, e in self.cores.items()}

    def compressed_sets(self):
        """Hyperedge view of the covering-compressed graph: one shell per core."""
        return {cid: frozenset(e.shell.ball()) for cid, e in self.cores.items()}

    def compressed_edges(self):
        """Weighted bipartite edges (v, cid) -> ceil(str*d_l + d^C(v)) on the eps*d grid."""
        q = self.eps * self.d
        out = {}
        for cid, e in self.cores.items():
            base = self.str * self.d_level(e.level)
            for v, dv in e.shell.ball().items():
                out[(v, cid)] = round_up(base + dv, q)
        return out

    def memberships(self, v):
        core = [cid for cid, e in self.cores.items() if v in e.rc.K]
        cover = [cid for cid, e in self.cores.items() if e.cover.level.get(v, INF) < INF]
        shell = [cid for cid, e in self.cores.items() if e.shell.level.get(v, INF) < INF]
        return core, cover, shell

    # updates ------------------------------------------------------------------

    def apply(self, op, lower_changes=None):
        """Forward one graph update; return the shells that changed as {cid: set or None}."""
        u, v = op[1], op[2]
        if v not in self.adj.get(u, ()):
            raise GraphError(f"missing edge ({u},{v})")
        if op[0] == "d":
            del self.adj[u][v]
            del self.adj[v][u]
        else:
            self.adj[u][v] = self.adj[v][u] = op[3]
        for cid in sorted(self.cores):
            e = self.cores[cid]
            if op[0] == "d":
                e.rc.delete(u, v)
            else:
                e.rc.increase(u, v, op[3])
            for key, members in sorted((lower_changes or {}).items()):
                if e.rc.done:
                    break
                e.rc.hyper_update(key, members)
            gone = e.sources - e.rc.K
            e.sources -= gone
            ops = [op] + [("s", x) for x in sorted(gone)]
            if e.rc.K:
                e.cover.batch(ops)
                e.shell.batch(ops)
            else:
                del self.cores[cid]
                self.trace.append(f"retire {cid}")
        self._fill()
        changes = {}
        for cid in set(self._shells) | set(self.cores):
            now = frozenset(self.cores[cid].shell.ball()) if cid in self.cores else None
            if now != self._shells.get(cid):
                if cid in self._shells:
                    changes[cid] = now
                if now is None:
                    self._shells.pop(cid, None)
                else:
                    self._shells[cid] = now
        return changes


# monotone ES tree on the emulator -------------------------------------------

SOURCE = -1


def _core_node(cid):
    return -2 - cid


class MES:
    """Monotone ES tree: estimates only grow, insertions never lower them."""

    def __init__(self, w, source, cap):
        self.w = w
        self.source = source
        self.cap = cap
        self.est = {x: INF for x in w}
        dist = {}
        heap = [(0.0, source)]
        while heap:
            dx, x = heapq.heappop(heap)
            if x in dist:
                continue
            dist[x] = dx
            for y, wy in w[x].items():
                if y not in dist:
                    heapq.heappush(heap, (dx + wy, y))
        for x, dx in dist.items():
            self.est[x] = dx if dx <= cap + TOL else INF

    def _best(self, x):
        best = INF
        for y, wy in self.w[x].items():
            c = self.est.get(y, INF) + wy
            if c < best:
                best = c
        return best

    def insert(self, x, y, wt):
        for a in (x, y):
            self.w.setdefault(a, {})
            self.est.setdefault(a, INF)
        self.w[x][y] = wt
        self.w[y][x] = wt

    def raise_edges(self, changes):
        """Apply weight increases (INF deletes) and run UpdateLevel to a fixpoint."""
        touched = set()
        for x, y, wt in changes:
            if wt == INF:
                self.w[x].pop(y, None)
                self.w[y].pop(x, None)
            else:
                self.w[x][y] = wt
                self.w[y][x] = wt
            touched.update((x, y))
        # vertices cut off from the source would climb without bound one
        # step at a time; the fixpoint sends them to infinity, so do it now
        seen = {self.source}
        stack = [self.source]
        while stack:
            x = stack.pop()
            for y in self.w[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        for x in self.est:
            if x not in seen and self.est[x] < INF:
                self.est[x] = INF
        heap = [(self.est[x], x) for x in touched]
        heapq.heapify(heap)
        while heap:
            _, x = heapq.heappop(heap)
            if x == self.source:
                continue
            best = self._best(x)
            if best > self.est[x] + TOL:
                self.est[x] = best if best <= self.cap + TOL else INF
                for y in self.w[x]:
                    heapq.heappush(heap, (self.est[y], y))


class EmulatorBall:
    """Approximate ball from S: min of the near estimate and the MES estimate."""

    def __init__(self, g, S, D, covering, near):
        adj = g.adj if hasattr(g, "adj") else g
        if any((not isinstance(v, int)) or v < 0 for v in adj):
            raise GraphError("emulator needs nonnegative integer vertex ids")
        self.adj = {v: dict(nb) for v, nb in adj.items()}
        self.cov = covering
        self.near = near
        self.D = float(D)
        self.q = covering.eps * covering.d
        self.S = set(S)
        self.Vinit = frozenset(bounded_ball(self.adj, self.S, self.D))
        self.weights = self._desired()
        w = {SOURCE: {}}
        for v in self.Vinit:
            w[v] = {}
        for (x, y), wt in self.weights.items():
            w.setdefault(x, {})[y] = wt
            w.setdefault(y, {})[x] = wt
        self.mes = MES(w, SOURCE, 2 * self.D)

    def _desired(self):
        cov, q = self.cov, self.q
        out = {}
        for (v, cid), wt in cov.compressed_edges().items():
            if v in self.Vinit:
                out[(v, _core_node(cid))] = wt
        for u in self.Vinit:
            for v, wg in self.adj[u].items():
                if u < v and v in self.Vinit and cov.d < wg <= self.D + TOL:
                    out[(u, v)] = round_up(wg, q)
        for v in self.Vinit:
            dn = self.near.estimate(v)
            if dn < INF:
                out[(SOURCE, v)] = round_up(dn, q)
        return out

    def emulator_sync(self):
        """Diff the emulator against the covering and near ball; insertions first."""
        want = self._desired()
        inserts, raises = [], []
        for key, wt in want.items():
            old = self.weights.get(key)
            if old is None:
                inserts.append((key[0], key[1], wt))
            elif wt > old + TOL:
                raises.append((key[0], key[1], wt))
            elif wt < old - TOL:
                raise InvariantError(f"emulator edge {key} decreased from {old} to {wt}")
        for key in self.weights:
            if key not in want:
                raises.append((key[0], key[1], INF))
        self.weights = want
        return inserts, raises

    def apply(self, op):
        u, v = op[1], op[2]
        if op[0] == "d":
            del self.adj[u][v]
            del self.adj[v][u]
        else:
            self.adj[u][v] = self.adj[v][u] = op[3]
        inserts, raises = self.emulator_sync()
        for x, y, wt in inserts:
            self.mes.insert(x, y, wt)
        self.mes.raise_edges(raises)

    def estimate(self, v):
        if v not in self.Vinit:
            return INF
        return min(self.near.estimate(v), self.mes.est.get(v, INF))


class ExactBall:
    """ES tree from S used as the bottom-level ball."""

    def __init__(self, g, S, depth=INF):
        self.es = ESTree(g.adj if hasattr(g, "adj") else g, S, depth=depth)

    def apply(self, op):
        self.es.batch([op])

    def estimate(self, v):
        return self.es.level.get(v, INF)


# layered driver -------------------------------------------------------------

@dataclass
class LevelSpec:
    d: float
    k: int
    eps: float
    str_: float


@dataclass
class Schedule:
    levels: list = field(default_factory=list)
    core_params: CoreParams = None

    def validate(self):
        for i, spec in enumerate(self.levels):
            if spec.d <= 0 or spec.k < 1 or not 0 < spec.eps < 1 or spec.str_ <= 0:
                raise GraphError(f"level {i + 1}: invalid parameters {spec}")
            if i and spec.d < self.levels[i - 1].d:
                raise GraphError("distance scales must be nondecreasing")


def default_schedule(n, wmax, eps, levels, k=3, str_=64.0):
    specs = []
    for i in range(1, levels):
        d = 1.0 if i == 1 else float((n * wmax) ** ((i - 1) / (levels - 1)))
        specs.append(LevelSpec(d, k, eps / 50 ** (levels - i), str_))
    return Schedule(specs)


class LayeredSSSP:
    """Approximate distances from S through a stack of coverings and emulators.

    With one level this is a plain ES tree.  Level i >= 2 is an emulator
    ball over the covering of level i-1, whose near ball is level i-1.
    """

    def __init__(self, g, S, eps, levels=2, schedule=None, rng=None):
        adj = g.adj if hasattr(g, "adj") else g
        if levels < 1:
            raise GraphError("levels must be at least 1")
        wmax = max((w for nb in adj.values() for w in nb.values()), default=1.0)
        self.schedule = schedule or default_schedule(len(adj), wmax, eps, levels)
        self.schedule.validate()
        if len(self.schedule.levels) != levels - 1:
            raise GraphError("schedule must list one entry per covering level")
        self.rng = rng if rng is not None else random.Random(0)
        self.S = set(S)
        self.vertices = sorted(adj)
        self.coverings = []
        lower = None
        for spec in self.schedule.levels:
            params = self.schedule.core_params or CoreParams(str_core=spec.str_)
            lower = Covering(adj, spec.d, spec.k, spec.eps, spec.str_, params, self.rng, lower)
            self.coverings.append(lower)
        radii = [2 * (s.str_ / s.eps) ** s.k * s.d for s in self.schedule.levels] + [INF]
        self.balls = [ExactBall(adj, self.S, depth=radii[0])]
        for i, cov in enumerate(self.coverings):
            self.balls.append(EmulatorBall(adj, self.S, radii[i + 1], cov, self.balls[-1]))
        self.eps_final = 1.0
        for spec in self.schedule.levels:
            self.eps_final *= 1 + 50 * spec.eps
        self.eps_final -= 1
        self.updates = 0

    def apply(self, op):
        changes = None
        for cov in self.coverings:
            changes = cov.apply(op, changes)
        for ball in self.balls:
            ball.apply(op)
        self.updates += 1

    def delete(self, u, v):
        self.apply(("d", u, v))

    def increase(self, u, v, w):
        self.apply(("i", u, v, float(w)))

    def estimate(self, v):
        return self.balls[-1].estimate(v)

    def estimates(self):
        return {v: self.estimate(v) for v in self.vertices}


def layered_sssp(g, S, eps, levels=2, schedule=None, rng=None):
    return LayeredSSSP(g, S, eps, levels, schedule, rng)
