"""Rooted i-trees on weighted trees and the doubling reduction to latency tours.

``itree_dp`` binarizes the tree (high-degree vertices become zero-weight
gadgets) and runs a tree-knapsack over node weight. ``mlt_from_itrees``
traverses the largest affordable i-tree for budgets 2, 4, 8, ... after
normalizing the start's nearest neighbour to distance 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import PreconditionError, TreeInstance, metric_closure
from .exact import _walk_latencies, brute_force_mlt

BRUTE_BOUND_N = 9


@dataclass
class BinarizedTree:
    """Rooted tree with 0/1 node weights and at most two children per node.

    Node 0 is the root (the original start). ``orig[x]`` is the original
    vertex of node ``x`` or -1 for gadget nodes.
    """

    orig: list = field(default_factory=list)
    weight: list = field(default_factory=list)
    parent: list = field(default_factory=list)
    edge: list = field(default_factory=list)
    children: list = field(default_factory=list)

    def add(self, orig: int, weight: int, parent: int, edge: float) -> int:
        x = len(self.orig)
        self.orig.append(orig)
        self.weight.append(weight)
        self.parent.append(parent)
        self.edge.append(edge)
        self.children.append([])
        if parent >= 0:
            self.children[parent].append(x)
        return x

    def __len__(self):
        return len(self.orig)

    def contract(self) -> set:
        """Original edges ``(min(u,v), max(u,v), w)`` recovered by contracting gadget nodes."""
        out = set()
        for x, o in enumerate(self.orig):
            if o < 0 or self.parent[x] < 0:
                continue
            p = self.parent[x]
            while self.orig[p] < 0:
                p = self.parent[p]
            u = self.orig[p]
            out.add((min(u, o), max(u, o), self.edge[x]))
        return out


def binarize(t: TreeInstance) -> BinarizedTree:
    _, _, pw, children = t.rooted()
    bt = BinarizedTree()
    node_of = {t.start: bt.add(t.start, 1, -1, 0.0)}
    queue = [t.start]

    def attach(x, items):
        if len(items) <= 2:
            for c in items:
                node_of[c] = bt.add(c, 1, x, pw[c])
            return
        half = (len(items) + 1) // 2
        for part in (items[:half], items[half:]):
            if len(part) == 1:
                node_of[part[0]] = bt.add(part[0], 1, x, pw[part[0]])
            else:
                attach(bt.add(-1, 0, x, 0.0), part)

    for u in queue:
        attach(node_of[u], children[u])
        queue.extend(children[u])
    return bt


class KTreeTable:
    """Optimal rooted i-tree costs ``cost[i]`` for i = 1..n (``cost[0]`` is unused).

    Witness edge sets are rebuilt lazily from the stored knapsack choices.
    """

    def __init__(self, tree: TreeInstance, bt: BinarizedTree, cost: np.ndarray, takes: list):
        self.tree = tree
        self.bt = bt
        self.cost = cost
        self._takes = takes
        self._cache = {}

    @property
    def n(self) -> int:
        return self.tree.n

    def vertices(self, i: int) -> list[int]:
        if not 1 <= i <= self.n:
            raise ValueError(f"i must be in 1..{self.n}, got {i}")
        if i in self._cache:
            return self._cache[i]
        out = []
        stack = [(0, i)]
        while stack:
            x, w = stack.pop()
            if self.bt.orig[x] >= 0:
                out.append(self.bt.orig[x])
            for c, take in reversed(list(zip(self.bt.children[x], self._takes[x]))):
                wc = int(take[w])
                if wc:
                    stack.append((c, wc))
                    w -= wc
        out.sort()
        self._cache[i] = out
        return out

    def witness(self, i: int) -> tuple:
        """Original edges ``(parent, child, w)`` of the optimal i-tree."""
        keep = set(self.vertices(i))
        _, parent, pw, _ = self.tree.rooted()
        return tuple(sorted((parent[v], v, pw[v]) for v in keep if v != self.tree.start))


def itree_dp(t: TreeInstance) -> KTreeTable:
    bt = binarize(t)
    m = len(bt)
    order = [0]
    for x in order:
        order.extend(bt.children[x])
    best = [None] * m
    takes = [None] * m
    for x in reversed(order):
        cur = np.array([np.inf, 0.0]) if bt.weight[x] else np.array([0.0])
        merges = []
        for c in bt.children[x]:
            bc = best[c]
            e = bt.edge[c]
            s1, s2 = len(cur) - 1, len(bc) - 1
            new = np.full(s1 + s2 + 1, np.inf)
            new[: s1 + 1] = cur
            take = np.zeros(s1 + s2 + 1, dtype=np.int32)
            if s1 + 1 <= s2:
                ws = np.arange(1, s2 + 1, dtype=np.int32)
                for w1 in range(s1 + 1):
                    if not np.isfinite(cur[w1]):
                        continue
                    cand = cur[w1] + e + bc[1:]
                    seg = new[w1 + 1: w1 + 1 + s2]
                    better = cand < seg
                    seg[better] = cand[better]
                    take[w1 + 1: w1 + 1 + s2][better] = ws[better]
            else:
                for w2 in range(1, s2 + 1):
                    cand = cur + (e + bc[w2])
                    seg = new[w2: w2 + s1 + 1]
                    better = cand < seg
                    seg[better] = cand[better]
                    take[w2: w2 + s1 + 1][better] = w2
            cur = new
            merges.append(take)
            best[c] = None
        best[x] = cur
        takes[x] = merges
    cost = best[0].copy()
    cost[0] = np.nan
    return KTreeTable(t, bt, cost, takes)


def _closed_dfs(t: TreeInstance, keep: set, adj) -> list[int]:
    """Closed depth-first walk from the start over the subtree induced by ``keep``."""
    walk = [t.start]
    stack = [(t.start, -1, iter(adj[t.start]))]
    while stack:
        u, p, it = stack[-1]
        for v, _ in it:
            if v != p and v in keep:
                walk.append(v)
                stack.append((v, u, iter(adj[v])))
                break
        else:
            stack.pop()
            if stack:
                walk.append(stack[-1][0])
    return walk


def itree_phases(t: TreeInstance, provider=itree_dp) -> list[tuple[float, int]]:
    """Phase schedule ``(budget, m_j)`` in normalized units, ending at the first m_j = n."""
    if t.n < 2:
        raise PreconditionError("need at least two vertices")
    table = provider(t)
    scale = min(w for u, v, w in t.edges if t.start in (u, v))
    cost = np.asarray(table.cost[1:], dtype=float) / scale
    out = []
    j = 0
    prev = 0
    while True:
        budget = 2.0 ** (j + 1)
        m = int(np.count_nonzero(cost <= budget * (1 + 1e-12)))
        assert m >= prev
        out.append((budget, m))
        if m == t.n:
            return out
        prev = m
        j += 1


def mlt_from_itrees(t: TreeInstance, provider=itree_dp) -> tuple[list[int], float]:
    """Concatenate closed DFS traversals of the affordable i-trees; returns ``(walk, value)``.

    With an exact provider the total latency is within 8x of optimal.
    """
    table = provider(t)
    adj = t.adjacency()
    walk = [t.start]
    phases = itree_phases(t, lambda _: table)
    for k, (_, m) in enumerate(phases):
        seg = _closed_dfs(t, set(table.vertices(m)), adj)
        if k == len(phases) - 1:
            seen = set(walk)
            last = 0
            for idx, v in enumerate(seg):
                if v not in seen:
                    seen.add(v)
                    last = idx
            seg = seg[: last + 1]
        walk.extend(seg[1:])
    value = sum(lat for _, lat in _walk_latencies(t, walk))
    return walk, float(value)


def itree_sum_bounds(t: TreeInstance):
    """``(lower, upper, opt)`` with lower = sum of i-tree costs and upper = 8 * lower.

    ``opt`` is the brute-force optimum for n <= 9, else None.
    """
    table = itree_dp(t)
    lower = float(np.sum(table.cost[1:]))
    upper = 8.0 * lower
    opt = None
    if t.n <= BRUTE_BOUND_N:
        opt = brute_force_mlt(metric_closure(t)).value
        tol = 1e-9 * max(1.0, upper)
        assert lower <= opt + tol and opt <= upper + tol, (lower, opt, upper)
    return lower, upper, opt
