"""Constant-factor latency approximations built on a (3, 6) partial-tour oracle.

The oracle (``tsp_approximator``) prices every vertex at 2L/(eps*n) and solves
the prize-collecting tour. The two latency schemes call it with doubling length
budgets (``mlt_approx_doubling``) or halving miss fractions
(``mlt_approx_epsilon``) and chain the resulting closed tours from the start.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    NEGATIVE,
    REVERSED,
    LineInstance,
    MetricInstance,
    PreconditionError,
    TdtspCoefficients,
    line_positions,
    normalize,
    shortcut,
    tdtsp_cost,
    tolerance,
    total_latency,
    walk_length,
)
from .pctsp import PctspInstance, gw_pctsp

ALPHA = 3.0
BETA = 6.0
DOUBLING_BOUND = 8 * math.ceil(ALPHA) * BETA  # 144
EPSILON_BOUND = 4 * ALPHA * BETA  # 72


@dataclass(frozen=True)
class ApproximatorCall:
    """Parameters of one partial-tour oracle call; at most one of ``epsilon``/``L`` may be None."""

    epsilon: float | None = None
    L: float | None = None
    alpha: float = ALPHA
    beta: float = BETA

    def __post_init__(self):
        if self.epsilon is None and self.L is None:
            raise ValueError("give epsilon, L, or both")
        if self.epsilon is not None and not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if self.L is not None and self.L < 0:
            raise ValueError(f"L must be nonnegative, got {self.L}")

    @property
    def vacuous(self) -> bool:
        """True when alpha*epsilon >= 1, i.e. the visit guarantee is empty."""
        return self.epsilon is not None and self.alpha * self.epsilon >= 1


@dataclass
class ApproxTour:
    tour: tuple
    visited_count: int
    length: float
    phase_log: list = field(default_factory=list)
    latency: float | None = None


def _closed(cycle) -> tuple:
    cycle = tuple(cycle)
    return cycle + cycle[:1] if len(cycle) > 1 else cycle


def _as_tour(inst: MetricInstance, cycle) -> ApproxTour:
    walk = _closed(cycle)
    return ApproxTour(walk, len(set(walk)), walk_length(inst, walk))


def double_tree_tour(inst: MetricInstance) -> list[int]:
    """Preorder of a minimum spanning tree rooted at the start (Prim)."""
    n = inst.n
    d = inst.d
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    parent = np.full(n, -1)
    best[inst.start] = 0.0
    children = [[] for _ in range(n)]
    for _ in range(n):
        u = int(np.argmin(np.where(in_tree, np.inf, best)))
        in_tree[u] = True
        if parent[u] >= 0:
            children[parent[u]].append(u)
        closer = ~in_tree & (d[u] < best)
        best[closer] = d[u][closer]
        parent[closer] = u
    order, stack = [], [inst.start]
    while stack:
        u = stack.pop()
        order.append(u)
        stack.extend(sorted(children[u], reverse=True))
    return order


def _oracle(inst: MetricInstance, epsilon: float, L: float) -> ApproxTour:
    n = inst.n
    if epsilon == 0:
        return _as_tour(inst, double_tree_tour(inst))
    P = 2.0 * L / (epsilon * n)
    sol = gw_pctsp(PctspInstance(inst, np.full(n, P)))
    return _as_tour(inst, sol.cycle)


def tsp_approximator(inst: MetricInstance, call: ApproximatorCall) -> ApproxTour:
    """Closed tour from the start meeting the (alpha, beta) partial-tour contract.

    If a closed tour of length <= L misses at most eps*n vertices, the result
    has length <= beta*L and misses at most alpha*eps*n vertices. With only L
    given, every miss count k = 1..n is tried and the longest-reaching tour of
    length <= beta*L wins. With only eps given, L runs over 1, 2, 4, ... on the
    normalized instance until the visit target is met.
    """
    if not inst.metric_flag:
        raise PreconditionError("the approximator needs a verified metric instance")
    n = inst.n
    if n == 1:
        return ApproxTour((inst.start,), 1, 0.0)
    tol = tolerance(inst.d)
    if call.epsilon is not None and call.L is not None:
        return _oracle(inst, call.epsilon, call.L)

    if call.epsilon is None:
        L = call.L
        best = ApproxTour((inst.start,), 1, 0.0)
        for k in range(1, n + 1):
            out = _oracle(inst, k / n, L)
            if out.length > call.beta * L + tol:
                continue
            if (out.visited_count, -out.length) > (best.visited_count, -best.length):
                best = out
        return best

    norm, scale = normalize(inst)
    target = math.ceil((1 - call.alpha * call.epsilon) * n - 1e-9)
    cap = 4.0 * float(np.triu(norm.d).sum())
    L = 1.0
    while L <= cap:
        out = _oracle(norm, call.epsilon, L)
        if out.visited_count >= target:
            out.length *= scale
            out.phase_log = [(L * scale, out.visited_count, out.length)]
            return out
        L *= 2
    out = _as_tour(inst, double_tree_tour(inst))
    out.phase_log = [(math.inf, n, out.length)]
    return out


def _chain(inst: MetricInstance, phases) -> ApproxTour:
    """Concatenate closed phase tours; the last one is cut at its final new vertex."""
    walk = [inst.start]
    seen = {inst.start}
    log = []
    for param, tour in phases:
        added = 0
        for v in tour[1:]:
            walk.append(v)
            if v not in seen:
                seen.add(v)
                added += 1
        log.append((param, added, walk_length(inst, tour)))
    last = max(walk.index(v) for v in seen)
    walk = walk[: last + 1]
    return ApproxTour(tuple(walk), len(seen), walk_length(inst, walk), log, total_latency(inst, walk))


def mlt_approx_doubling(inst: MetricInstance) -> ApproxTour:
    """Latency tour within 144x of optimal; also within 24x of the optimal TSP cycle.

    Calls the oracle with L = 2, 4, 8, ... (normalized units) and stops after
    the first phase tour covering every vertex.
    """
    if not inst.metric_flag:
        raise PreconditionError("needs a verified metric instance")
    if inst.n == 1:
        return ApproxTour((inst.start,), 1, 0.0, [], 0.0)
    norm, scale = normalize(inst)
    cap = 4.0 * float(np.triu(norm.d).sum())
    phases = []
    L = 2.0
    while True:
        if L > cap:
            phases.append((math.inf, _closed(double_tree_tour(inst))))
            break
        out = tsp_approximator(norm, ApproximatorCall(L=L))
        phases.append((L * scale, out.tour))
        if out.visited_count == inst.n:
            break
        L *= 2
    return _chain(inst, phases)


def mlt_approx_epsilon(inst: MetricInstance) -> ApproxTour:
    """Latency tour within 72x of optimal, from oracle calls at eps = 1/2, 1/4, ..."""
    if not inst.metric_flag:
        raise PreconditionError("needs a verified metric instance")
    if inst.n == 1:
        return ApproxTour((inst.start,), 1, 0.0, [], 0.0)
    phases = []
    eps = 0.5
    while True:
        out = tsp_approximator(inst, ApproximatorCall(epsilon=eps))
        phases.append((eps, out.tour))
        if out.visited_count == inst.n:
            break
        eps /= 2
    return _chain(inst, phases)


def tdtsp_positive_linear(inst: MetricInstance, c: TdtspCoefficients) -> tuple[list[int], float]:
    """Tour for positive-linear (or reversed-linear) time-dependent costs.

    The doubling latency walk is shortcut to a tour; for reversed-linear
    multipliers the tour is returned back to front, so it ends at the start.
    """
    if c.orientation == NEGATIVE:
        raise PreconditionError("negative-linear costs: use greedy_negative_linear")
    if c.a == 0 and c.b == 0:
        raise PreconditionError("coefficients a and b are both zero")
    tour = shortcut(inst, mlt_approx_doubling(inst).tour)
    if c.orientation == REVERSED:
        tour = tour[::-1]
    return tour, tdtsp_cost(inst, tour, c)


def greedy_negative_linear(inst: MetricInstance) -> tuple[list[int], float, float]:
    """Farthest-unvisited-next tour; returns ``(tour, total latency, open path length)``."""
    n = inst.n
    d = inst.d
    tour = [inst.start]
    left = np.ones(n, dtype=bool)
    left[inst.start] = False
    while left.any():
        row = np.where(left, d[tour[-1]], -np.inf)
        nxt = int(np.argmax(row))  # first maximum = smallest index
        tour.append(nxt)
        left[nxt] = False
    return tour, total_latency(inst, tour), walk_length(inst, tour)


# -- the line ----------------------------------------------------------------------

@dataclass(frozen=True)
class LineWalk:
    """Turning coordinates of a sweep and the resulting first-visit order."""

    turns: tuple
    order: tuple


def line_doubling(l: LineInstance, first: str = "auto", skip_empty: bool = True) -> tuple[LineWalk, float]:
    """Zig-zag sweep from the start with turning radii 1, 2, 4, ... (normalized).

    The first excursion heads toward the nearer point (ties: right) unless
    ``first`` is ``"left"``/``"right"``. Each excursion stops at the farthest
    remaining point on its side; with ``skip_empty`` an excursion into a side
    with nothing left is skipped, otherwise it runs the full radius. Vertex
    numbering follows ``line_to_metric``.
    """
    x, s = line_positions(l)
    rel = x - x[s]
    lat = {v: 0.0 for v in range(len(x)) if rel[v] == 0}
    pending = {+1: sorted((r, v) for v, r in enumerate(rel) if r > 0),
               -1: sorted((-r, v) for v, r in enumerate(rel) if r < 0)}
    turns = [float(x[s])]
    if pending[+1] or pending[-1]:
        unit = min(p[0][0] for p in pending.values() if p)
        if first == "auto":
            near_r = pending[+1][0][0] if pending[+1] else math.inf
            near_l = pending[-1][0][0] if pending[-1] else math.inf
            side = +1 if near_r <= near_l else -1
        else:
            side = {"right": +1, "left": -1}[first]
        tol = 1e-12 * max(1.0, float(np.abs(rel).max()))
        elapsed = 0.0
        k = 0
        while pending[+1] or pending[-1]:
            radius = unit * 2.0 ** k
            todo = pending[side]
            if todo or not skip_empty:
                reach = min(radius, todo[-1][0]) if todo else radius
                while todo and todo[0][0] <= reach + tol:
                    dist, v = todo.pop(0)
                    lat[v] = elapsed + dist
                elapsed += reach
                turns.append(float(x[s] + side * reach))
                if not (pending[+1] or pending[-1]):
                    break
                elapsed += reach
                turns.append(float(x[s]))
            k += 1
            side = -side
    order = tuple(sorted(lat, key=lambda v: (lat[v], v)))
    return LineWalk(tuple(turns), order), float(sum(lat.values()))
