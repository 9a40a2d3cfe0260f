"""Instances, cost functionals and generators for the minimum latency problem.

Vertices are 0-based everywhere. A *tour* is a sequence visiting every vertex
exactly once; a *walk* is any vertex sequence starting at the start vertex
(repeats allowed). Both are plain sequences of ints.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

TOL = 1e-9

POSITIVE = "positive-linear"
REVERSED = "reversed-linear"
NEGATIVE = "negative-linear"
ORIENTATIONS = (POSITIVE, REVERSED, NEGATIVE)


class InstanceError(ValueError):
    """Malformed or inconsistent instance data."""


class PreconditionError(ValueError):
    """Instance is valid but violates a solver's precondition."""


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def tolerance(d: np.ndarray) -> float:
    """Absolute comparison tolerance scaled by the instance diameter."""
    diam = float(d.max()) if d.size else 0.0
    return TOL * max(1.0, diam)


@dataclass(frozen=True, eq=False)
class MetricInstance:
    """Symmetric distance matrix with a designated start vertex.

    ``metric_flag`` records that the triangle inequality has been checked;
    pass ``check_metric=True`` to :meth:`from_matrix` to set it.
    """

    d: np.ndarray
    start: int = 0
    metric_flag: bool = False

    def __post_init__(self):
        d = _frozen(self.d)
        object.__setattr__(self, "d", d)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 1:
            raise InstanceError(f"distance matrix must be square and nonempty, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise InstanceError("distance matrix has non-finite entries")
        n = d.shape[0]
        if not 0 <= self.start < n:
            raise InstanceError(f"start {self.start} out of range for n={n}")
        if np.any(d < 0):
            i, j = np.argwhere(d < 0)[0]
            raise InstanceError(f"negative distance at ({i},{j})")
        if np.any(np.diag(d) != 0):
            i = int(np.flatnonzero(np.diag(d))[0])
            raise InstanceError(f"nonzero diagonal at ({i},{i})")
        tol = tolerance(d)
        bad = np.argwhere(np.abs(d - d.T) > tol)
        if len(bad):
            i, j = bad[0]
            raise InstanceError(f"matrix not symmetric at ({i},{j}): {d[i, j]} != {d[j, i]}")
        if self.metric_flag and not is_metric(d):
            raise InstanceError("metric_flag set but triangle inequality fails")

    @classmethod
    def from_matrix(cls, d, start: int = 0, check_metric: bool = True) -> "MetricInstance":
        d = np.asarray(d, dtype=float)
        flag = bool(check_metric and is_metric(d))
        return cls(d, start, flag)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def __eq__(self, other):
        if not isinstance(other, MetricInstance):
            return NotImplemented
        return (self.start == other.start and self.metric_flag == other.metric_flag
                and np.array_equal(self.d, other.d))

    __hash__ = None


def is_metric(d: np.ndarray) -> bool:
    """Check the triangle inequality for all triples (O(n^3) memory-light)."""
    d = np.asarray(d, dtype=float)
    tol = tolerance(d)
    for j in range(d.shape[0]):
        # d[i,k] <= d[i,j] + d[j,k]
        if np.any(d > d[:, j, None] + d[None, j, :] + tol):
            return False
    return True


@dataclass(frozen=True)
class TreeInstance:
    """Weighted tree given as an edge list ``(u, v, w)`` with ``w > 0``."""

    n: int
    edges: tuple = ()
    start: int = 0

    def __post_init__(self):
        edges = tuple((int(u), int(v), float(w)) for u, v, w in self.edges)
        object.__setattr__(self, "edges", edges)
        if self.n < 1:
            raise InstanceError("tree needs at least one vertex")
        if not 0 <= self.start < self.n:
            raise InstanceError(f"start {self.start} out of range for n={self.n}")
        if len(edges) != self.n - 1:
            raise InstanceError(f"tree on {self.n} vertices needs {self.n - 1} edges, got {len(edges)}")
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, w in edges:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InstanceError(f"edge ({u},{v}) has an endpoint out of range")
            if not (w > 0 and np.isfinite(w)):
                raise InstanceError(f"edge ({u},{v}) has non-positive weight {w}")
            ru, rv = find(u), find(v)
            if ru == rv:
                raise InstanceError(f"edge ({u},{v}) closes a cycle")
            parent[ru] = rv

    @property
    def unit_flag(self) -> bool:
        return all(w == 1.0 for _, _, w in self.edges)

    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        for a in adj:
            a.sort()
        return adj

    def rooted(self, root: int | None = None):
        """BFS from ``root`` (default start): returns ``(order, parent, parent_weight, children)``."""
        root = self.start if root is None else root
        adj = self.adjacency()
        parent = [-1] * self.n
        pw = [0.0] * self.n
        children = [[] for _ in range(self.n)]
        seen = [False] * self.n
        seen[root] = True
        order = [root]
        q = deque([root])
        while q:
            u = q.popleft()
            for v, w in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    parent[v], pw[v] = u, w
                    children[u].append(v)
                    order.append(v)
                    q.append(v)
        return order, parent, pw, children


@dataclass(frozen=True)
class LineInstance:
    """Points on the real line (duplicates allowed) and a start coordinate."""

    coords: tuple = ()
    start: float = 0.0

    def __post_init__(self):
        coords = tuple(float(x) for x in self.coords)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "start", float(self.start))
        if not all(np.isfinite(coords)) or not np.isfinite(self.start):
            raise InstanceError("line coordinates must be finite")

    @property
    def n(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class TdtspCoefficients:
    """Linear time-dependent edge multipliers.

    For ``negative-linear`` the stored ``a``/``b`` are magnitudes and the cost
    is to be maximized.
    """

    a: float = 1.0
    b: float = 0.0
    orientation: str = POSITIVE

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"unknown orientation {self.orientation!r}")
        if self.a < 0 or self.b < 0:
            raise ValueError("coefficients must be nonnegative (negative-linear stores magnitudes)")

    def multipliers(self, n: int) -> np.ndarray:
        """Multiplier of edge i for i = 1..n-1."""
        i = np.arange(1, n, dtype=float)
        if self.orientation == REVERSED:
            return self.a * i + self.b
        return self.a * (n - i) + self.b


# -- walks and cost functionals ------------------------------------------------

def _check_walk(inst: MetricInstance, w: Sequence[int], complete: bool = True) -> list[int]:
    steps = [int(v) for v in w]
    if not steps:
        raise ValueError("walk is empty")
    if steps[0] != inst.start:
        raise ValueError(f"walk starts at {steps[0]}, expected start vertex {inst.start}")
    if any(not 0 <= v < inst.n for v in steps):
        raise ValueError("walk contains a vertex out of range")
    if complete:
        missing = set(range(inst.n)).difference(steps)
        if missing:
            raise ValueError(f"walk misses vertices {sorted(missing)}")
    return steps


def _check_tour(n: int, t: Sequence[int]) -> list[int]:
    order = [int(v) for v in t]
    if sorted(order) != list(range(n)):
        raise ValueError(f"tour is not a permutation of 0..{n - 1}")
    return order


def latency_profile(inst: MetricInstance, w: Sequence[int]) -> list[tuple[int, float]]:
    """First-visit latency of every vertex, in first-visit order."""
    steps = _check_walk(inst, w)
    d = inst.d
    out = [(steps[0], 0.0)]
    seen = {steps[0]}
    t = 0.0
    for a, b in zip(steps, steps[1:]):
        t += d[a, b]
        if b not in seen:
            seen.add(b)
            out.append((b, t))
    return out


def total_latency(inst: MetricInstance, w: Sequence[int]) -> float:
    return float(sum(lat for _, lat in latency_profile(inst, w)))


def walk_length(inst: MetricInstance, w: Sequence[int]) -> float:
    steps = _check_walk(inst, w, complete=False)
    return float(sum(inst.d[a, b] for a, b in zip(steps, steps[1:])))


def tsp_cycle_length(inst: MetricInstance, t: Sequence[int]) -> float:
    """Length of the closed cycle through ``t`` returning to its first vertex."""
    steps = [int(v) for v in t]
    if len(steps) <= 1:
        return 0.0
    return walk_length(inst, steps) + float(inst.d[steps[-1], steps[0]])


def tdtsp_cost(inst: MetricInstance, t: Sequence[int], c: TdtspCoefficients) -> float:
    """Time-dependent cost sum_i mult(i) * d(e_i) of a permutation tour.

    The start constraint is not enforced here so that reversed tours can be
    priced; for ``negative-linear`` the returned value is to be maximized.
    """
    order = _check_tour(inst.n, t)
    if inst.n == 1:
        return 0.0
    edges = inst.d[order[:-1], order[1:]]
    return float(np.dot(c.multipliers(inst.n), edges))


def shortcut(inst: MetricInstance, w: Sequence[int]) -> list[int]:
    """First-visit order of a complete walk. Needs the triangle inequality."""
    if not inst.metric_flag:
        raise PreconditionError("shortcutting requires a verified metric instance")
    return [v for v, _ in latency_profile(inst, w)]


# -- conversions --------------------------------------------------------------

def tree_distances(t: TreeInstance) -> np.ndarray:
    d = np.zeros((t.n, t.n))
    adj = t.adjacency()
    for s in range(t.n):
        row = d[s]
        seen = [False] * t.n
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for v, w in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    row[v] = row[u] + w
                    stack.append(v)
    return d


def metric_closure(t: TreeInstance) -> MetricInstance:
    # tree path lengths always satisfy the triangle inequality
    return MetricInstance(tree_distances(t), t.start, metric_flag=True)


def line_positions(l: LineInstance) -> tuple[np.ndarray, int]:
    """Coordinates of the metric vertices of ``line_to_metric(l)`` and the start vertex.

    If the start coordinate is not among the points it is prepended as vertex 0
    and point k becomes vertex k+1; otherwise point k is vertex k and the first
    point at the start coordinate is the start vertex.
    """
    xs = list(l.coords)
    if l.start in xs:
        return np.array(xs, dtype=float), xs.index(l.start)
    return np.array([l.start] + xs, dtype=float), 0


def line_to_metric(l: LineInstance) -> MetricInstance:
    x, s = line_positions(l)
    return MetricInstance(np.abs(x[:, None] - x[None, :]), s, metric_flag=True)


def normalize(inst: MetricInstance) -> tuple[MetricInstance, float]:
    """Rescale so the start's nearest neighbour is at distance 1; returns ``(inst, scale)``."""
    if inst.n < 2:
        raise PreconditionError("normalize needs at least two vertices")
    row = np.delete(inst.d[inst.start], inst.start)
    scale = float(row.min())
    if scale <= 0:
        raise PreconditionError("a vertex coincides with the start (zero distance); merge it first")
    if scale == 1.0:
        return inst, 1.0
    return MetricInstance(inst.d / scale, inst.start, inst.metric_flag), scale


# -- generators ----------------------------------------------------------------

def gen_points(n: int, seed: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.random.default_rng(seed).random((n, 2))


def gen_metric(n: int, seed: int) -> MetricInstance:
    """Euclidean distances between ``n`` uniform points in the unit square; start 0."""
    p = gen_points(n, seed)
    d = np.sqrt(((p[:, None, :] - p[None, :, :]) ** 2).sum(-1))
    return MetricInstance(d, 0, metric_flag=True)


def gen_tree(n: int, seed: int, unit: bool = False) -> TreeInstance:
    """Random recursive tree on shuffled labels; weights uniform in [0.1, 10] or all 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    labels = rng.permutation(n)
    edges = []
    for i in range(1, n):
        p = int(rng.integers(0, i))
        w = 1.0 if unit else float(rng.uniform(0.1, 10.0))
        edges.append((int(labels[p]), int(labels[i]), w))
    return TreeInstance(n, tuple(edges), 0)


def gen_line(n: int, seed: int) -> LineInstance:
    """``n`` points uniform in [-10, 10]; start at the origin."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    return LineInstance(tuple(float(x) for x in rng.uniform(-10, 10, n)), 0.0)


def gen_diameter3(kL: int, kR: int, seed: int) -> TreeInstance:
    """Central edge 0-1 with ``kL`` spokes on hub 0 and ``kR`` on hub 1; start at hub 0."""
    if kL < 0 or kR < 0:
        raise ValueError("spoke counts must be nonnegative")
    rng = np.random.default_rng(seed)
    edges = [(0, 1, float(rng.uniform(0.1, 10.0)))]
    v = 2
    for hub, k in ((0, kL), (1, kR)):
        for _ in range(k):
            edges.append((hub, v, float(rng.uniform(0.1, 10.0))))
            v += 1
    return TreeInstance(v, tuple(edges), 0)


def gen_penalties(n: int, seed: int, high: float = 1.0) -> np.ndarray:
    """Uniform penalties in [0, high]; the start's entry is irrelevant to solvers."""
    return np.random.default_rng((seed, 7)).uniform(0.0, high, n)
