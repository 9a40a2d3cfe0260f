"""Rooted prize-collecting TSP: exact oracle and primal-dual approximation.

``gw_pctsp`` grows moats around vertex components (the root's component never
grows), merges components when an edge becomes tight, retires a component once
its duals exhaust its penalty budget, prunes retired pendant sets, and
shortcuts a depth-first traversal of what remains into a cycle. The tree phase
runs on halved penalties, which is what makes the doubled tree pay off.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import InstanceError, MetricInstance, PreconditionError, tolerance, tsp_cycle_length
from .exact import _cap, _path_dp, _unwind

MAX_BRUTE_PCTSP_N = 9


@dataclass(frozen=True, eq=False)
class PctspInstance:
    base: MetricInstance
    penalties: np.ndarray

    def __post_init__(self):
        p = np.array(self.penalties, dtype=float)
        p.flags.writeable = False
        object.__setattr__(self, "penalties", p)
        if p.shape != (self.base.n,):
            raise InstanceError(f"need {self.base.n} penalties, got shape {p.shape}")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise InstanceError("penalties must be finite and nonnegative")
        if not self.base.metric_flag:
            raise PreconditionError("prize-collecting TSP needs a verified metric instance")

    @property
    def root(self) -> int:
        return self.base.start

    @property
    def n(self) -> int:
        return self.base.n


@dataclass(frozen=True)
class PctspSolution:
    cycle: tuple
    visited: frozenset
    length: float
    penalty_paid: float
    cost: float


def make_solution(inst: PctspInstance, cycle) -> PctspSolution:
    cycle = tuple(int(v) for v in cycle)
    visited = frozenset(cycle)
    length = tsp_cycle_length(inst.base, cycle)
    pen = float(sum(inst.penalties[v] for v in range(inst.n) if v not in visited))
    return PctspSolution(cycle, visited, length, pen, length + pen)


def subset_cycle_lengths(inst: MetricInstance) -> np.ndarray:
    """Optimal closed-cycle length from the start through exactly each vertex subset.

    Indexed by bitmask; subsets without the start are ``inf``.
    """
    n = inst.n
    _cap(n)
    f, _ = _path_dp(inst.d, inst.start, np.ones(max(n - 1, 1)))
    out = np.min(f + inst.d[:, inst.start][None, :], axis=1)
    out[1 << inst.start] = 0.0
    return out


def brute_force_pctsp(inst: PctspInstance) -> PctspSolution:
    n = inst.n
    _cap(n, MAX_BRUTE_PCTSP_N)
    d = inst.base.d
    r = inst.root
    f, parent = _path_dp(d, r, np.ones(max(n - 1, 1)))
    tol = tolerance(d)
    pen = inst.penalties
    best, best_cycle = math.inf, None
    for mask in range(1 << n):
        if not mask & (1 << r):
            continue
        missed = sum(pen[v] for v in range(n) if v != r and not mask & (1 << v))
        if mask == 1 << r:
            cost, cyc = missed, (r,)
        else:
            closing = f[mask] + d[:, r]
            last = int(np.argmin(closing))
            cost = closing[last] + missed
            cyc = None
        if cost < best - tol:
            best = cost
            best_cycle = cyc if cyc is not None else tuple(_unwind(parent, mask, last))
    return make_solution(inst, best_cycle)


def _moat_forest(d: np.ndarray, root: int, budget: np.ndarray):
    """Primal-dual moat growth. Returns ``(forest_edges, retired_sets, labels)``."""
    n = d.shape[0]
    tol = tolerance(d)
    label = np.arange(n)
    radius = np.zeros(n)
    slack = {v: float(budget[v]) for v in range(n)}
    active = {v: v != root for v in range(n)}
    forest = []
    retired = []
    iu, ju = np.triu_indices(n, 1)
    while any(active.values()):
        act_v = np.array([active[c] for c in label], dtype=float)
        rate = act_v[iu] + act_v[ju]
        live = (label[iu] != label[ju]) & (rate > 0)
        t_edge = math.inf
        if np.any(live):
            gap = d[iu, ju] - radius[iu] - radius[ju]
            times = np.full(len(iu), np.inf)
            times[live] = np.maximum(gap[live], 0.0) / rate[live]
            t_edge = float(times.min())
        acts = sorted(c for c, a in active.items() if a)
        t_dead = min(max(slack[c], 0.0) for c in acts)
        if t_edge <= t_dead + tol:
            k = int(np.flatnonzero(times <= t_edge + tol)[0])
            step = t_edge
        else:
            k = None
            step = t_dead
        radius += step * act_v
        for c in acts:
            slack[c] -= step
        if k is not None:
            i, j = int(iu[k]), int(ju[k])
            ci, cj = int(label[i]), int(label[j])
            keep, drop = min(ci, cj), max(ci, cj)
            label[label == drop] = keep
            forest.append((i, j))
            slack[keep] = max(slack[ci], 0.0) + max(slack[cj], 0.0)
            active[keep] = not (label[root] == keep)
            del slack[drop], active[drop]
        else:
            c = next(c for c in acts if slack[c] <= t_dead + tol)
            active[c] = False
            slack[c] = 0.0
            retired.append(frozenset(np.flatnonzero(label == c).tolist()))
    return forest, retired, label


def _prune(root: int, forest, retired, label) -> tuple[set, list]:
    verts = set(np.flatnonzero(label == label[root]).tolist())
    edges = [(i, j) for i, j in forest if i in verts and j in verts]
    for X in reversed(retired):
        inside = X & verts
        if not inside:
            continue
        crossing = [e for e in edges if (e[0] in X) != (e[1] in X)]
        if len(crossing) == 1:
            verts -= inside
            edges = [e for e in edges if e[0] not in X and e[1] not in X]
    return verts, edges


def _preorder(root: int, edges) -> list[int]:
    adj = {}
    for i, j in edges:
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)
    order, seen, stack = [], {root}, [root]
    while stack:
        u = stack.pop()
        order.append(u)
        for v in sorted(adj.get(u, ()), reverse=True):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return order


def gw_pctsp(inst: PctspInstance) -> PctspSolution:
    """Primal-dual prize-collecting tour, within 2 - 1/(n-1) of optimal."""
    if inst.n == 1:
        return make_solution(inst, (inst.root,))
    forest, retired, label = _moat_forest(inst.base.d, inst.root, inst.penalties / 2.0)
    verts, edges = _prune(inst.root, forest, retired, label)
    return make_solution(inst, _preorder(inst.root, edges))
