"""Dinic blocking-flow max flow on float capacities.

Used wherever the algorithms call for an exact max-flow or a height-bounded
blocking flow; callers encode vertex capacities by splitting.
"""

from collections import deque
import math

INF = math.inf
EPS = 1e-12


class Dinic:
    def __init__(self):
        self.head = []
        self.cap = []
        self.orig = []
        self.out = {}

    def node(self, a):
        self.out.setdefault(a, [])

    def add_edge(self, a, b, cap):
        i = len(self.head)
        self.head += [b, a]
        self.cap += [cap, 0.0]
        self.orig += [cap, 0.0]
        self.out.setdefault(a, []).append(i)
        self.out.setdefault(b, []).append(i + 1)
        return i

    def flow(self, i):
        return self.orig[i] - self.cap[i]

    def _levels(self, s, t, max_level):
        level = {s: 0}
        queue = deque([s])
        while queue:
            a = queue.popleft()
            if max_level is not None and level[a] >= max_level:
                continue
            for i in self.out[a]:
                b = self.head[i]
                if self.cap[i] > EPS and b not in level:
                    level[b] = level[a] + 1
                    queue.append(b)
        return level if t in level else None

    def _blocking(self, s, t, level, limit):
        """Iterative DFS pushing flow along level-increasing arcs."""
        it = {a: 0 for a in level}
        total = 0.0
        while limit - total > EPS:
            stack = [s]
            arcs = []
            while stack:
                a = stack[-1]
                if a == t:
                    break
                lst = self.out[a]
                advanced = False
                while it[a] < len(lst):
                    i = lst[it[a]]
                    b = self.head[i]
                    if self.cap[i] > EPS and level.get(b) == level[a] + 1:
                        stack.append(b)
                        arcs.append(i)
                        advanced = True
                        break
                    it[a] += 1
                if not advanced:
                    stack.pop()
                    if arcs:
                        arcs.pop()
                        it[stack[-1]] += 1
                    level.pop(a, None)
            if not stack:
                break
            push = limit - total
            for i in arcs:
                push = min(push, self.cap[i])
            for i in arcs:
                self.cap[i] -= push
                self.cap[i ^ 1] += push
            total += push
        return total

    def max_flow(self, s, t, limit=INF, max_level=None):
        """Push up to ``limit`` units; ``max_level`` bounds augmenting-path hops."""
        self.node(s)
        self.node(t)
        total = 0.0
        while limit - total > EPS:
            level = self._levels(s, t, max_level)
            if level is None:
                break
            pushed = self._blocking(s, t, level, limit - total)
            if pushed <= EPS:
                break
            total += pushed
        return total

    def reachable(self, s):
        """Vertices reachable from s in the residual graph."""
        seen = {s}
        queue = deque([s])
        while queue:
            a = queue.popleft()
            for i in self.out.get(a, ()):
                b = self.head[i]
                if self.cap[i] > EPS and b not in seen:
                    seen.add(b)
                    queue.append(b)
        return seen

    def decompose(self, s, t):
        """Split the s-t flow into paths [(nodes, value)], cancelling cycles."""
        flow = {}
        for a, lst in self.out.items():
            for i in lst:
                if i % 2 == 0 and self.flow(i) > EPS:
                    flow.setdefault(a, {})
                    b = self.head[i]
                    flow[a][b] = flow[a].get(b, 0.0) + self.flow(i)
        paths = []
        while True:
            path = [s]
            pos = {s: 0}
            while path[-1] != t:
                a = path[-1]
                nxt = next((b for b, x in sorted(flow.get(a, {}).items(), key=lambda kv: str(kv[0]))
                            if x > EPS), None)
                if nxt is None:
                    break
                if nxt in pos:
                    cyc = path[pos[nxt]:] + [nxt]
                    amt = min(flow[x][y] for x, y in zip(cyc, cyc[1:]))
                    for x, y in zip(cyc, cyc[1:]):
                        flow[x][y] -= amt
                    for x in path[pos[nxt] + 1:]:
                        pos.pop(x)
                    path = path[:pos[nxt] + 1]
                    continue
                pos[nxt] = len(path)
                path.append(nxt)
            if path[-1] != t:
                break
            amt = min(flow[x][y] for x, y in zip(path, path[1:]))
            for x, y in zip(path, path[1:]):
                flow[x][y] -= amt
            paths.append((path, amt))
        return paths
