"""Expander tools: cut-matching game, matching embedding, witness, pruning.

Capacities kappa are kept as Fractions on a 1/z grid so that the flow
network built for a matching round has integral capacities; Dinic then
returns integral flows and every embedded path value is a multiple of 1/z.
"""

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np

from decflow.graph import GraphError, bounded_ball
from decflow.maxflow import Dinic

INF = math.inf


class PruneBudgetError(RuntimeError):
    """Pruning lost its guarantee; the caller has to start a new phase."""


@dataclass
class VertexCut:
    L: set
    S: set
    R: set


@dataclass
class CapacityFn:
    kappa: dict
    z: int = 1

    @classmethod
    def of(cls, kappa):
        kappa = {v: Fraction(x) for v, x in kappa.items()}
        z = 1
        for x in kappa.values():
            z = z * x.denominator // math.gcd(z, x.denominator)
        return cls(kappa, z)

    def total(self):
        return sum(self.kappa.values(), Fraction(0))

    def __getitem__(self, v):
        return self.kappa.get(v, Fraction(0))


@dataclass
class Embedding:
    """Valued paths in H_bip; vertex entries alternate with ("e", i) nodes."""

    paths: list = field(default_factory=list)

    def congestion(self):
        load = {}
        for path, val in self.paths:
            for v in path[::2]:
                load[v] = load.get(v, 0) + val
        return load

    def max_len(self):
        return max((len(p) - 1 for p, _ in self.paths), default=0)


@dataclass
class MatchingResult:
    matching: dict
    embedding: Embedding
    value: Fraction


@dataclass
class WitnessResult:
    X: set
    W: dict
    W_multi: dict
    embedding: Embedding
    rounds: int
    fake_weight: Fraction
    z: int


# cut player -----------------------------------------------------------------

def cut_player_round(W, rng, vertices=None, walk_steps=None):
    """Random-projection bisection of a weighted multigraph.

    A Gaussian vector is smoothed by lazy random-walk steps on W and the
    vertices are split at the median.  |A| = floor(n/2) <= |B|.
    """
    verts = sorted(vertices if vertices is not None else W)
    if len(verts) < 2:
        raise GraphError("cut player needs at least two vertices")
    x = {v: rng.gauss(0.0, 1.0) for v in verts}
    steps = walk_steps if walk_steps is not None else max(1, math.ceil(math.log2(len(verts))))
    for _ in range(steps):
        y = {}
        for v in verts:
            nb = W.get(v, {})
            deg = sum(float(w) for w in nb.values())
            if deg <= 0:
                y[v] = x[v]
                continue
            avg = sum(float(w) * x[u] for u, w in nb.items()) / deg
            y[v] = 0.5 * (x[v] + avg)
        x = y
    order = sorted(verts, key=lambda v: (x[v], v))
    half = len(verts) // 2
    return set(order[:half]), set(order[half:])


# matching embedding ---------------------------------------------------------

def default_height(kappa, n_a, eps):
    total = float(kappa.total())
    eps = max(eps, 1e-3)
    return math.ceil(8 * total * math.log(total + 2) / (max(n_a, 1) * eps * eps))


def embed_matching(H, A, B, kappa, eps, height=None):
    """Embed a fractional matching from A to B or return a sparse vertex cut.

    Flow network on the split incidence graph: source -> a (one unit) for a
    in A, b -> sink (one unit) for b in B, in_v -> out_v carrying kappa(v),
    hyperedge nodes uncapacitated.  Capacities are scaled by z.
    """
    A, B = set(A), set(B)
    if A & B:
        raise GraphError("A and B must be disjoint")
    if len(A) > len(B):
        raise GraphError("embed_matching needs |A| <= |B|")
    total = kappa.total()
    for v in A | B:
        if kappa[v] < 2:
            raise GraphError(f"terminal {v} has capacity below 2")
    for v in H.vertices:
        if kappa[v] > total / 2:
            raise GraphError(f"vertex {v} holds more than half the capacity")
    z = kappa.z
    net = Dinic()
    src, snk = ("src",), ("snk",)
    net.node(src)
    net.node(snk)
    vert_arc = {}
    for v in sorted(H.vertices):
        vert_arc[v] = net.add_edge(("i", v), ("o", v), int(kappa[v] * z))
    big = z * (len(A) + 1)
    for i, e in enumerate(H.hyperedges):
        for v in sorted(e):
            net.add_edge(("o", v), ("e", i), big)
            net.add_edge(("e", i), ("i", v), big)
    for a in sorted(A):
        net.add_edge(src, ("i", a), z)
    for b in sorted(B):
        net.add_edge(("o", b), snk, z)
    if height is None:
        height = default_height(kappa, len(A), eps)
    need = (1 - 3 * eps) * len(A) * z
    value = net.max_flow(src, snk, max_level=int(1.5 * height) + 3)
    if value < need - 1e-9:
        value += net.max_flow(src, snk)
    if value >= need - 1e-9:
        paths = []
        matching = {}
        for nodes, amt in net.decompose(src, snk):
            hb = []
            for node in nodes[1:-1]:
                if node[0] == "i":
                    hb.append(node[1])
                elif node[0] == "e":
                    hb.append(("e", node[1]))
            val = Fraction(int(round(amt)), z)
            paths.append((hb, val))
            key = (hb[0], hb[-1])
            matching[key] = matching.get(key, Fraction(0)) + val
        return MatchingResult(matching, Embedding(paths), Fraction(int(round(value)), z))
    reach = net.reachable(src)
    L, S, R = set(), set(), set()
    for v in H.vertices:
        if ("o", v) in reach:
            L.add(v)
        elif ("i", v) in reach:
            S.add(v)
        else:
            R.add(v)
    return VertexCut(L, S, R)


# witness --------------------------------------------------------------------

def _pad_fake(A, B, matching):
    """Complete a fractional matching with fake pairs in id order."""
    deficit_a = {a: Fraction(1) for a in A}
    deficit_b = {b: Fraction(1) for b in B}
    for (a, b), val in matching.items():
        deficit_a[a] -= val
        deficit_b[b] -= val
    fake = {}
    ia = [a for a in sorted(A) if deficit_a[a] > 0]
    ib = [b for b in sorted(B) if deficit_b[b] > 0]
    i = j = 0
    while i < len(ia) and j < len(ib):
        a, b = ia[i], ib[j]
        amt = min(deficit_a[a], deficit_b[b])
        fake[(a, b)] = fake.get((a, b), Fraction(0)) + amt
        deficit_a[a] -= amt
        deficit_b[b] -= amt
        if deficit_a[a] == 0:
            i += 1
        if deficit_b[b] == 0:
            j += 1
    return fake


def _add_weight(W, a, b, w):
    W.setdefault(a, {})
    W.setdefault(b, {})
    W[a][b] = W[a].get(b, 0) + w
    W[b][a] = W[b].get(a, 0) + w


def embed_witness(H, K, kappa, rng, eps_wit=0.1, phi=0.2, rho=0.1, rounds=None,
                  height=None, exhaustive_limit=12):
    """Cut-matching game over terminal set K.

    Returns a VertexCut with eps_wit|K| <= |L&K| <= |R&K| and
    kappa(S) <= 2|L&K|, or a WitnessResult whose W lives on X within K.
    """
    K = sorted(K)
    if len(K) < 2:
        W = {v: {} for v in K}
        return WitnessResult(set(K), W, {v: {} for v in K}, Embedding(), 0, Fraction(0), kappa.z)
    R = rounds if rounds is not None else math.ceil(4 * math.log2(len(K)))
    union = {v: {} for v in K}
    real = {v: {} for v in K}
    fake_all = {}
    paths = []
    for _ in range(R):
        A, B = cut_player_round(union, rng, K)
        eps_m = min(eps_wit * len(K) / len(A), 1 / 3)
        res = embed_matching(H, A, B, kappa, eps_m, height)
        if isinstance(res, VertexCut):
            cut = res
            if len(cut.L & set(K)) > len(cut.R & set(K)):
                cut = VertexCut(cut.R, cut.S, cut.L)
            return cut
        fake = _pad_fake(A, B, res.matching)
        for (a, b), val in res.matching.items():
            _add_weight(union, a, b, val)
            _add_weight(real, a, b, val)
        for (a, b), val in fake.items():
            _add_weight(union, a, b, val)
            key = (min(a, b), max(a, b))
            fake_all[key] = fake_all.get(key, Fraction(0)) + val
        paths.extend(res.embedding.paths)
    z = kappa.z
    multi = {v: {u: int(round(w * z)) for u, w in nb.items() if w * z >= 1} for v, nb in union.items()}
    pr = Prune(multi, phi, exhaustive_limit=exhaustive_limit)
    for (a, b), val in sorted(fake_all.items()):
        copies = int(round(val * z))
        if copies:
            pr.delete(a, b, copies, strict=False)
    X = set(pr.X)
    W = {v: {u: w for u, w in real[v].items() if u in X} for v in X}
    W_multi = {v: {u: c for u, c in pr.W[v].items() if u in X} for v in X}
    emb = Embedding([(p, val) for p, val in paths if p[0] in X and p[-1] in X])
    return WitnessResult(X, W, W_multi, emb, R, sum(fake_all.values(), Fraction(0)), z)


# pruning --------------------------------------------------------------------

def conductance_matrix(M):
    """Min conductance over all bipartitions of a small dense weight matrix."""
    n = M.shape[0]
    if n < 2:
        return INF, None
    vol = M.sum(axis=1)
    total = vol.sum()
    masks = np.arange(1, 1 << (n - 1), dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n - 1)) & 1).astype(float)
    bits = np.hstack([bits, np.zeros((len(masks), 1))])
    va = bits @ vol
    cut = ((bits @ M) * (1 - bits)).sum(axis=1)
    denom = np.minimum(va, total - va)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(denom > 0, cut / np.where(denom > 0, denom, 1), np.where(cut > 0, INF, 0.0))
    k = int(np.argmin(phi))
    return float(phi[k]), bits[k].astype(bool)


def sweep_cut(M):
    """Spectral sweep: best prefix of the second normalized eigenvector."""
    n = M.shape[0]
    vol = M.sum(axis=1)
    total = vol.sum()
    d = np.where(vol > 0, 1 / np.sqrt(np.where(vol > 0, vol, 1)), 0.0)
    N = d[:, None] * M * d[None, :]
    _, vecs = np.linalg.eigh(N)
    x = vecs[:, -2] * d
    order = np.argsort(x, kind="stable")
    best = (INF, None)
    side = np.zeros(n, dtype=bool)
    va = 0.0
    cut = 0.0
    for k in order[:-1]:
        cut += vol[k] - 2 * M[k, side].sum() - M[k, k]
        side[k] = True
        va += vol[k]
        denom = min(va, total - va)
        phi = cut / denom if denom > 0 else (0.0 if cut <= 0 else INF)
        if phi < best[0]:
            best = (phi, side.copy())
    return best


class Prune:
    """Decremental expander pruning on an unweighted multigraph.

    ``W`` maps v -> {u: copies}.  After each batch of deletions low
    conductance pieces are peeled off until W[X] has conductance at least
    phi/6, checked exhaustively on small X and by a spectral sweep above.
    """

    def __init__(self, W, phi, exhaustive_limit=12):
        self.W = {v: dict(nb) for v, nb in W.items()}
        self.V = set(self.W)
        self.X = set(self.W)
        self.phi = phi
        self.deleted = 0
        self.exhaustive_limit = exhaustive_limit
        self.peeled = []
        self._repair()

    def vol(self, S):
        return sum(c for v in S for c in self.W[v].values())

    def delete(self, a, b, copies=1, strict=True):
        have = self.W.get(a, {}).get(b, 0)
        copies = min(copies, have)
        if copies <= 0:
            return set()
        self.W[a][b] -= copies
        self.W[b][a] -= copies
        if self.W[a][b] == 0:
            del self.W[a][b]
            del self.W[b][a]
        self.deleted += copies
        before = set(self.X)
        if a in self.X or b in self.X:
            self._repair()
        if strict:
            self.check()
        return before - self.X

    def check(self):
        if 2 * len(self.X) < len(self.V):
            raise PruneBudgetError("pruned set fell below half")
        if self.vol(self.V - self.X) > 8 * self.deleted / self.phi + 1e-9:
            raise PruneBudgetError("pruned volume exceeds 8i/phi")

    def _peel(self, S):
        self.X -= S
        self.peeled.append(frozenset(S))

    def _repair(self):
        target = self.phi / 6
        while len(self.X) > 1:
            comps = self._components()
            if len(comps) > 1:
                keep = max(comps, key=lambda c: (self.vol(c), -min(c)))
                self._peel(self.X - keep)
                continue
            verts = sorted(self.X)
            idx = {v: i for i, v in enumerate(verts)}
            M = np.zeros((len(verts), len(verts)))
            for v in verts:
                for u, c in self.W[v].items():
                    if u in idx:
                        M[idx[v], idx[u]] = c
            if len(verts) <= self.exhaustive_limit:
                phi, side = conductance_matrix(M)
            else:
                phi, side = sweep_cut(M)
            if side is None or phi >= target:
                break
            A = {verts[i] for i in range(len(verts)) if side[i]}
            Bs = self.X - A
            small = A if self.vol(A) <= self.vol(Bs) else Bs
            self._peel(small)

    def _components(self):
        comps = []
        seen = set()
        for s in sorted(self.X):
            if s in seen:
                continue
            comp = {s}
            stack = [s]
            while stack:
                v = stack.pop()
                for u in self.W[v]:
                    if u in self.X and u not in comp:
                        comp.add(u)
                        stack.append(u)
            seen |= comp
            comps.append(comp)
        return comps


# certify core ---------------------------------------------------------------

@dataclass
class Scattered:
    pass


@dataclass
class Core:
    K: set
    iterations: int


def certify_core(adj, K, d, eps, n=None):
    """Return a large low-diameter subset of K or certify that K is scattered."""
    K = set(K)
    if not K:
        return Scattered()
    n = n if n is not None else len(adj)
    lg = max(1.0, math.log2(max(n, 2)))
    region = bounded_ball(adj, K, 16 * d * lg)
    alive = set(region)
    sub = {v: {u: w for u, w in adj[v].items() if u in alive} for v in alive}
    Kp = set(K)
    rounds = 0
    while len(Kp) > (1 - eps / 2) * len(K):
        rounds += 1
        v = min(Kp)
        i = 0
        inner = bounded_ball(sub, [v], 0)
        while True:
            outer = bounded_ball(sub, [v], 2 * (i + 1) * d)
            if sum(len(sub[x]) for x in outer) > 2 * sum(len(sub[x]) for x in inner):
                i += 1
                inner = outer
                continue
            break
        hit = set(outer) & Kp
        if len(hit) > (1 - eps / 2) * len(Kp):
            return Core(hit, rounds)
        drop = set(inner)
        Kp -= drop
        alive -= drop
        for x in drop:
            for u in sub[x]:
                if u in alive:
                    del sub[u][x]
        for x in drop:
            del sub[x]
    return Scattered()
