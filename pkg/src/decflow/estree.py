"""Decremental Even-Shiloach tree with steadiness-threshold path queries.

The tree keeps exact distances from a decremental source set S up to a
depth bound d.  Multi-vertex S is encoded by a virtual root joined to
every source by a zero-weight edge; dropping a source cuts that edge.

When a tree edge is deleted or made heavier, the subtree hanging below it
is detached and re-settled by a Dijkstra seeded from the rest of the tree,
so parents are always settled before their children.  Changes to non-tree
edges cannot move any level and are absorbed without work.
"""

import heapq
import math

from decflow.graph import GraphError, TOL

INF = math.inf


class ESTree:
    def __init__(self, adj, sources, depth=INF, steadiness=None, copy=True):
        if not sources:
            raise GraphError("ES-tree needs a nonempty source set")
        self.adj = {v: dict(nb) for v, nb in adj.items()} if copy else adj
        self.sources = set(sources)
        missing = self.sources - set(self.adj)
        if missing:
            raise GraphError(f"sources {sorted(missing)} not in graph")
        self.depth = depth
        self.sigma = steadiness
        self.level = {v: INF for v in self.adj}
        self.parent = {v: None for v in self.adj}
        self.children = {v: set() for v in self.adj}
        self.min_st = {v: INF for v in self.adj}
        self.touched = 0
        self._settle(set(self.adj))

    # internal -----------------------------------------------------------

    def _sigma(self, x, y):
        return self.sigma.get((x, y), INF) if self.sigma is not None else INF

    def _settle(self, region):
        """Recompute level/parent for every vertex of ``region`` from scratch.

        Vertices outside ``region`` keep their values and act as seeds.
        """
        level, adj, parent, children = self.level, self.adj, self.parent, self.children
        min_st, sources, depth = self.min_st, self.sources, self.depth + TOL
        sigma = self.sigma if self.sigma is not None else {}
        for x in region:
            p = parent[x]
            if p is not None and p not in region:
                children[p].discard(x)
            parent[x] = None
            children[x] = set()
            level[x] = INF
            min_st[x] = INF
        best = {}
        for x in region:
            if x in sources:
                best[x] = 0.0
                continue
            b = INF
            for y, w in adj[x].items():
                if y not in region:
                    ly = level[y] + w
                    if ly < b:
                        b = ly
            if b < INF and b <= depth:
                best[x] = b
        heap = [(b, x) for x, b in best.items()]
        heapq.heapify(heap)
        pop, push = heapq.heappop, heapq.heappush
        pending = set(region)
        while heap:
            d, x = pop(heap)
            if x not in pending or d > best[x]:
                continue
            pending.discard(x)
            level[x] = d
            if x in sources and d == 0.0:
                parent[x] = None
                min_st[x] = INF
                nbrs = adj[x].items()
            else:
                p = None
                lim = d + TOL
                nbrs = adj[x].items()
                for y, w in nbrs:
                    if y not in pending and level[y] + w <= lim and (p is None or y < p):
                        p = y
                parent[x] = p
                children[p].add(x)
                st = sigma.get((p, x), INF)
                mp = min_st[p]
                min_st[x] = st if st < mp else mp
            for z, w in nbrs:
                if z in pending:
                    nd = d + w
                    if nd <= depth and nd < best.get(z, INF):
                        best[z] = nd
                        push(heap, (nd, z))
        self.touched += len(region) - len(pending)

    def _subtree(self, roots):
        out = set()
        stack = list(roots)
        while stack:
            x = stack.pop()
            if x in out:
                continue
            out.add(x)
            stack.extend(self.children[x])
        return out

    def _tree_child(self, u, v):
        if self.parent.get(v) == u:
            return v
        if self.parent.get(u) == v:
            return u
        return None

    # updates ------------------------------------------------------------

    def delete(self, u, v):
        self.batch([("d", u, v)])

    def increase(self, u, v, w):
        self.batch([("i", u, v, w)])

    def remove_source(self, v):
        self.batch([("s", v)])

    def batch(self, ops):
        """Apply deletions ("d", u, v), increases ("i", u, v, w) and source
        removals ("s", v), then repair all affected subtrees at once."""
        roots = set()
        for op in ops:
            if op[0] == "s":
                v = op[1]
                if v in self.sources:
                    self.sources.discard(v)
                    roots.add(v)
                continue
            u, v = op[1], op[2]
            if v not in self.adj.get(u, ()):
                raise GraphError(f"missing edge ({u},{v})")
            c = self._tree_child(u, v)
            if op[0] == "d":
                del self.adj[u][v]
                del self.adj[v][u]
            else:
                w = op[3]
                if w < self.adj[u][v] - TOL:
                    raise GraphError(f"weight decrease on ({u},{v})")
                self.adj[u][v] = w
                self.adj[v][u] = w
            if c is not None:
                roots.add(c)
        if roots:
            self._settle(self._subtree(roots))

    # queries ------------------------------------------------------------

    def dist(self, v):
        return self.level[v]

    def ball(self):
        return {v: d for v, d in self.level.items() if d < INF}

    def path(self, v):
        if self.level.get(v, INF) == INF:
            raise GraphError(f"vertex {v} outside the ball")
        out = [v]
        while self.parent[out[-1]] is not None:
            out.append(self.parent[out[-1]])
        out.reverse()
        return out

    def path_edges(self, v):
        p = self.path(v)
        return list(zip(p, p[1:]))

    def min_steadiness(self, v):
        return self.min_st[v]

    def threshold_subpath(self, v, j):
        """Edges of the tree path pi(S, v) whose steadiness is at most j."""
        if self.level.get(v, INF) == INF:
            raise GraphError(f"vertex {v} outside the ball")
        if j < self.min_st[v]:
            return []
        return [e for e in self.path_edges(v) if self._sigma(*e) <= j]


def es_init(g, sources, depth=INF, steadiness=None):
    adj = g.adj if hasattr(g, "adj") else g
    return ESTree(adj, sources, depth, steadiness)


def es_delete(tree, u, v):
    tree.delete(u, v)
    return tree


def es_increase(tree, u, v, w):
    tree.increase(u, v, w)
    return tree


def es_threshold_subpath(tree, v, j):
    return tree.threshold_subpath(v, j)
