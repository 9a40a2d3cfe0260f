"""Exact solvers: brute-force oracles and the polynomial special cases.

The brute-force routines are capped at ``MAX_BRUTE_N`` vertices. ``dp_line``
and ``dp_diameter3`` are cost-to-go dynamic programs: moving a distance D while
r vertices are still unvisited adds r*D to the total latency.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    NEGATIVE,
    POSITIVE,
    REVERSED,
    LineInstance,
    MetricInstance,
    PreconditionError,
    TdtspCoefficients,
    TreeInstance,
    line_positions,
    tolerance,
)

MAX_BRUTE_N = 11


@dataclass(frozen=True)
class ExactResult:
    """Optimal route (tour or walk) and its value.

    ``permutation_only`` marks results on non-metric input, where only
    permutation tours were searched.
    """

    route: tuple
    value: float
    nodes: int = 0
    permutation_only: bool = False


def _cap(n: int, cap: int = MAX_BRUTE_N):
    if n > cap:
        raise PreconditionError(f"brute force is capped at n <= {cap}, got n={n}")


def brute_force_mlt(inst: MetricInstance, prune: bool = True) -> ExactResult:
    """Minimum total latency over all permutation tours from the start.

    Depth-first enumeration in lexicographic order; a prefix is abandoned once
    ``partial + r * (elapsed + min outgoing distance)`` cannot beat the
    incumbent, so the lexicographically first optimum is kept.
    """
    n = inst.n
    _cap(n)
    d = inst.d.tolist()
    tol = tolerance(inst.d)
    s = inst.start
    best_val = math.inf
    best_route = None
    nodes = 0

    def rec(cur, elapsed, partial, remaining, prefix):
        nonlocal best_val, best_route, nodes
        nodes += 1
        if not remaining:
            if partial < best_val - tol:
                best_val, best_route = partial, tuple(prefix)
            return
        row = d[cur]
        if prune:
            step = min(row[u] for u in remaining)
            if partial + len(remaining) * (elapsed + step) >= best_val - tol:
                return
        for k, u in enumerate(remaining):
            t = elapsed + row[u]
            prefix.append(u)
            rec(u, t, partial + t, remaining[:k] + remaining[k + 1:], prefix)
            prefix.pop()

    rec(s, 0.0, 0.0, [v for v in range(n) if v != s], [s])
    return ExactResult(best_route, float(best_val), nodes, not inst.metric_flag)


def _path_dp(d: np.ndarray, start: int, mult: np.ndarray, maximize: bool = False):
    """Held-Karp table over (visited set, last vertex) for a weighted Hamiltonian path.

    The k-th edge of the path (k = 1..n-1) is priced ``mult[k-1] * d``.
    Returns ``(f, parent)`` arrays of shape ``(2**n, n)``.
    """
    n = d.shape[0]
    worst = -np.inf if maximize else np.inf
    f = np.full((1 << n, n), worst)
    parent = np.full((1 << n, n), -1, dtype=np.int64)
    f[1 << start, start] = 0.0
    bits = np.array([1 << u for u in range(n)])
    pick = np.argmax if maximize else np.argmin
    for mask in range(1 << n):
        row = f[mask]
        ends = np.flatnonzero(np.isfinite(row))
        if not len(ends):
            continue
        k = bin(mask).count("1")
        if k == n:
            continue
        cand = row[ends, None] + mult[k - 1] * d[ends, :]
        for u in range(n):
            if mask & (1 << u):
                continue
            j = pick(cand[:, u])
            val = cand[j, u]
            nm = mask | int(bits[u])
            if (val > f[nm, u]) if maximize else (val < f[nm, u]):
                f[nm, u] = val
                parent[nm, u] = ends[j]
    return f, parent


def _unwind(parent: np.ndarray, mask: int, last: int) -> list[int]:
    route = []
    while last >= 0:
        route.append(int(last))
        prev = int(parent[mask, last])
        mask &= ~(1 << last)
        last = prev
    return route[::-1]


def brute_force_tsp(inst: MetricInstance) -> float:
    """Optimal closed-cycle length through all vertices."""
    n = inst.n
    _cap(n)
    if n == 1:
        return 0.0
    f, _ = _path_dp(inst.d, inst.start, np.ones(n - 1))
    full = (1 << n) - 1
    return float(np.min(f[full] + inst.d[:, inst.start]))


def brute_force_tdtsp(inst: MetricInstance, c: TdtspCoefficients) -> ExactResult:
    """Optimal time-dependent tour.

    Positive-linear tours are minimized and negative-linear ones maximized,
    both starting at the start vertex. Reversed-linear tours are minimized
    over tours that *end* at the start, the mirror image of the positive case.
    """
    n = inst.n
    _cap(n)
    if n == 1:
        return ExactResult((inst.start,), 0.0)
    maximize = c.orientation == NEGATIVE
    base = TdtspCoefficients(c.a, c.b, POSITIVE if c.orientation == REVERSED else c.orientation)
    f, parent = _path_dp(inst.d, inst.start, base.multipliers(n), maximize)
    full = (1 << n) - 1
    last = int(np.argmax(f[full]) if maximize else np.argmin(f[full]))
    route = _unwind(parent, full, last)
    if c.orientation == REVERSED:
        route = route[::-1]
    return ExactResult(tuple(route), float(f[full, last]), 1 << n)


def max_open_path(inst: MetricInstance) -> float:
    """Longest Hamiltonian path from the start (the max-TSP reference for greedy tours)."""
    return brute_force_tdtsp(inst, TdtspCoefficients(0.0, 1.0, NEGATIVE)).value


def max_latency(inst: MetricInstance) -> float:
    return brute_force_tdtsp(inst, TdtspCoefficients(1.0, 0.0, NEGATIVE)).value


# -- points on a line ------------------------------------------------------------

def dp_line(l: LineInstance) -> ExactResult:
    """Optimal latency tour for points on a line in O(n^2).

    A state is the covered interval of sorted positions plus the end we stand
    at. Tables are filled from the full interval down, one interval length at
    a time. The route uses the vertex numbering of ``line_to_metric``.
    """
    x_all, s_vertex = line_positions(l)
    perm = np.argsort(x_all, kind="stable")
    x = x_all[perm]
    N = len(x)
    s = int(np.flatnonzero(perm == s_vertex)[0])
    tol = 1e-9 * max(1.0, float(x[-1] - x[0]))

    fL = np.zeros(1)
    fR = np.zeros(1)
    go_left_from_L = [None] * (N + 1)
    go_left_from_R = [None] * (N + 1)
    for L in range(N - 1, 0, -1):
        m = N - L + 1
        i = np.arange(m)
        j = i + L - 1
        r = N - L
        # extension left lands in interval [i-1, j] (index i-1 in the L+1 table)
        has_left = i > 0
        has_right = j < N - 1
        il = np.maximum(i - 1, 0)
        jr = np.minimum(j + 1, N - 1)
        # clip index into next-length tables (size m-1)
        nl = np.minimum(il, m - 2)
        nr = np.minimum(i, m - 2)
        ext_l = np.where(has_left, fL[nl], np.inf)
        ext_r = np.where(has_right, fR[nr], np.inf)
        cost_l_from_L = r * (x[i] - x[il]) + ext_l
        cost_r_from_L = r * (x[jr] - x[i]) + ext_r
        cost_l_from_R = r * (x[j] - x[il]) + ext_l
        cost_r_from_R = r * (x[jr] - x[j]) + ext_r
        left_first = perm[il] < perm[jr]

        def choose(cl, cr):
            return (cl < cr - tol) | ((np.abs(cl - cr) <= tol) & left_first)

        gl = choose(cost_l_from_L, cost_r_from_L)
        gr = choose(cost_l_from_R, cost_r_from_R)
        go_left_from_L[L] = gl
        go_left_from_R[L] = gr
        fL = np.where(gl, cost_l_from_L, cost_r_from_L)
        fR = np.where(gr, cost_l_from_R, cost_r_from_R)

    value = float(fL[s]) if N > 1 else 0.0
    route = [int(perm[s])]
    i = j = s
    at_left = True
    for L in range(1, N):
        table = go_left_from_L[L] if at_left else go_left_from_R[L]
        if table[i]:
            i -= 1
            route.append(int(perm[i]))
            at_left = True
        else:
            j += 1
            route.append(int(perm[j]))
            at_left = False
    return ExactResult(tuple(route), value, N * N)


# -- trees -------------------------------------------------------------------------

def _covers(adj, u, v, n):
    reach = {u, v}
    reach.update(w for w, _ in adj[u])
    reach.update(w for w, _ in adj[v])
    return len(reach) == n


def diameter3_hubs(t: TreeInstance):
    """Return ``(hub, partner, lead_in)`` for a tree of diameter <= 3.

    ``hub`` is where the search starts; ``lead_in`` is the weight of the forced
    first move when the start is a leaf (0 otherwise).
    """
    adj = t.adjacency()
    s = t.start
    for v, _ in adj[s]:
        if _covers(adj, s, v, t.n):
            return s, v, 0.0
    if len(adj[s]) == 1:
        h, lead = adj[s][0]
        for v, _ in adj[h]:
            if v != s and _covers(adj, h, v, t.n):
                return h, v, lead
    raise PreconditionError("tree diameter exceeds 3")


def dp_diameter3(t: TreeInstance) -> ExactResult:
    """Optimal latency tour on a tree of diameter <= 3 in O(n^2).

    Spokes at each hub are taken in increasing length; the state is the number
    of spokes done at each hub, the hub we stand at, and whether the far hub
    has been reached yet.
    """
    n = t.n
    if n == 1:
        return ExactResult((t.start,), 0.0)
    adj = t.adjacency()
    A, B, lead = diameter3_hubs(t)
    w = dict(adj[A])[B]
    spokesA = sorted((ln, v) for v, ln in adj[A] if v not in (B, t.start))
    spokesB = sorted((ln, v) for v, ln in adj[B] if v != A)
    la = [ln for ln, _ in spokesA]
    lb = [ln for ln, _ in spokesB]
    nA, nB = len(la), len(lb)
    INF = math.inf

    # crossed states: F[side][kA][kB]; choice codes: 's' spoke, 'x' cross
    FA = [[0.0] * (nB + 1) for _ in range(nA + 1)]
    FB = [[0.0] * (nB + 1) for _ in range(nA + 1)]
    CA = [[None] * (nB + 1) for _ in range(nA + 1)]
    CB = [[None] * (nB + 1) for _ in range(nA + 1)]
    for kA in range(nA, -1, -1):
        for kB in range(nB, -1, -1):
            r = (nA - kA) + (nB - kB)
            if r == 0:
                continue
            aA = (2 * r - 1) * la[kA] + FA[kA + 1][kB] if kA < nA else INF
            aB = (2 * r - 1) * lb[kB] + FB[kA][kB + 1] if kB < nB else INF
            if aA <= r * w + aB:
                FA[kA][kB], CA[kA][kB] = aA, "s"
            else:
                FA[kA][kB], CA[kA][kB] = r * w + aB, "x"
            if aB <= r * w + aA:
                FB[kA][kB], CB[kA][kB] = aB, "s"
            else:
                FB[kA][kB], CB[kA][kB] = r * w + aA, "x"

    # far hub not yet reached: only side A with kB = 0
    G = [0.0] * (nA + 1)
    CG = [None] * (nA + 1)
    for kA in range(nA, -1, -1):
        r = (nA - kA) + nB + 1
        spoke = (2 * r - 1) * la[kA] + G[kA + 1] if kA < nA else INF
        cross = r * w + FB[kA][0]
        G[kA], CG[kA] = (spoke, "s") if spoke <= cross else (cross, "x")

    value = G[0] + (n - 1) * lead
    route = [t.start] if A == t.start else [t.start, A]
    kA = kB = 0
    while CG[kA] == "s":
        route.append(spokesA[kA][1])
        kA += 1
    route.append(B)
    side = "B"
    while (nA - kA) + (nB - kB) > 0:
        if side == "A":
            if CA[kA][kB] == "s":
                route.append(spokesA[kA][1])
                kA += 1
            else:
                side = "B"
        else:
            if CB[kA][kB] == "s":
                route.append(spokesB[kB][1])
                kB += 1
            else:
                side = "A"
    return ExactResult(tuple(route), float(value), (nA + 1) * (nB + 1))


def tree_depths(t: TreeInstance) -> list[float]:
    order, parent, pw, _ = t.rooted()
    depth = [0.0] * t.n
    for v in order[1:]:
        depth[v] = depth[parent[v]] + pw[v]
    return depth


def dfs_walk(t: TreeInstance, rng: np.random.Generator | None = None) -> list[int]:
    """Depth-first walk from the start, children in index order (or shuffled by ``rng``).

    Backtracking steps are kept; the walk stops at the last new vertex.
    """
    _, _, _, children = t.rooted()
    if rng is not None:
        children = [list(rng.permutation(c)) if c else [] for c in children]
    walk = [t.start]
    stack = [(t.start, iter(children[t.start]))]
    while stack:
        u, it = stack[-1]
        v = next(it, None)
        if v is None:
            stack.pop()
            if stack:
                walk.append(stack[-1][0])
        else:
            walk.append(int(v))
            stack.append((int(v), iter(children[int(v)])))
    # trim trailing backtrack to the last first-visit
    seen = set()
    last = 0
    for k, v in enumerate(walk):
        if v not in seen:
            seen.add(v)
            last = k
    return walk[: last + 1]


def _walk_latencies(t: TreeInstance, walk) -> list[tuple[int, float]]:
    wt = {}
    for u, v, w in t.edges:
        wt[u, v] = wt[v, u] = w
    out = [(walk[0], 0.0)]
    seen = {walk[0]}
    acc = 0.0
    for a, b in zip(walk, walk[1:]):
        acc += wt[a, b]
        if b not in seen:
            seen.add(b)
            out.append((b, acc))
    return out


def dfs_unweighted_tree(t: TreeInstance, rng: np.random.Generator | None = None) -> ExactResult:
    """Depth-first walk on a unit-length tree, which is an optimal latency walk."""
    if not t.unit_flag:
        raise PreconditionError("DFS optimality needs unit edge lengths")
    walk = dfs_walk(t, rng)
    value = sum(lat for _, lat in _walk_latencies(t, walk))
    return ExactResult(tuple(walk), float(value), len(walk))


def dfs_certificate(t: TreeInstance, walk) -> list[tuple[int, int, float, float]]:
    """Rows ``(i, v, latency, 2i - depth(v))`` for the i-th distinct vertex (start is i = 0)."""
    depth = tree_depths(t)
    return [(i, v, lat, 2 * i - depth[v]) for i, (v, lat) in enumerate(_walk_latencies(t, walk))]


def best_dfs_value(t: TreeInstance) -> float:
    """Smallest total latency over every depth-first child ordering (small trees only)."""
    _, _, pw, children = t.rooted()
    best = math.inf
    choices = [list(itertools.permutations(c)) for c in children]
    for combo in itertools.product(*choices):
        # preorder with this child ordering; tree-metric latency equals walk latency
        walk = []

        def visit(u):
            walk.append(u)
            for v in combo[u]:
                visit(v)
                walk.append(u)

        visit(t.start)
        lat = sum(x for _, x in _walk_latencies(t, walk))
        best = min(best, lat)
    return float(best)
