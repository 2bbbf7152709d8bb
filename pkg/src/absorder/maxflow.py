"""Integral maximum flow (Dinic) with deterministic augmentation order.

Adjacency lists keep edges in insertion order and the blocking-flow search
always advances along the lowest-numbered admissible edge, so equal inputs
give equal flows.
"""
from __future__ import annotations

from collections import deque


class FlowNetwork:
    def __init__(self, n: int):
        self.n = n
        self.adj: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, cap: int) -> int:
        """Add ``u -> v`` with integer capacity; returns the edge id (reverse is ``id ^ 1``)."""
        eid = len(self.to)
        self.to += [v, u]
        self.cap += [cap, 0]
        self.adj[u].append(eid)
        self.adj[v].append(eid + 1)
        return eid

    def flow_on(self, eid: int) -> int:
        return self.cap[eid ^ 1]

    def _levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.n
        level[s] = 0
        queue = deque([s])
        to, cap, adj = self.to, self.cap, self.adj
        while queue:
            u = queue.popleft()
            for e in adj[u]:
                v = to[e]
                if cap[e] > 0 and level[v] < 0:
                    level[v] = level[u] + 1
                    queue.append(v)
        return level if level[t] >= 0 else None

    def _blocking_flow(self, s: int, t: int, level: list[int]) -> int:
        to, cap, adj = self.to, self.cap, self.adj
        ptr = [0] * self.n
        total = 0
        while True:
            # Iterative DFS for one augmenting path in the level graph.
            path: list[int] = []
            u = s
            while u != t:
                edges = adj[u]
                advanced = False
                while ptr[u] < len(edges):
                    e = edges[ptr[u]]
                    v = to[e]
                    if cap[e] > 0 and level[v] == level[u] + 1:
                        path.append(e)
                        u = v
                        advanced = True
                        break
                    ptr[u] += 1
                if not advanced:
                    if u == s:
                        return total
                    # Dead end: retreat and skip the edge that led here.
                    level[u] = -1
                    e = path.pop()
                    u = to[e ^ 1]
                    ptr[u] += 1
            push = min(cap[e] for e in path)
            for e in path:
                cap[e] -= push
                cap[e ^ 1] += push
            total += push

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        while True:
            level = self._levels(s, t)
            if level is None:
                return total
            total += self._blocking_flow(s, t, level)

    def reachable(self, s: int) -> list[bool]:
        """Vertices reachable from ``s`` in the residual graph."""
        seen = [False] * self.n
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for e in self.adj[u]:
                v = self.to[e]
                if self.cap[e] > 0 and not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return seen
