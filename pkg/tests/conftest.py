import itertools

import numpy as np
import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line for the acceptance summary."""

    def _report(criterion, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# -- independent oracles (plain enumeration, no package solvers) -------------------

def enum_latency(d, start=0):
    """(best value, best order) over all permutations from ``start`` by direct enumeration."""
    n = len(d)
    rest = [v for v in range(n) if v != start]
    best = (np.inf, None)
    for perm in itertools.permutations(rest):
        t = lat = 0.0
        cur = start
        for v in perm:
            t += d[cur][v]
            lat += t
            cur = v
        if lat < best[0]:
            best = (lat, (start,) + perm)
    return best


def enum_cycle(d, start=0):
    n = len(d)
    rest = [v for v in range(n) if v != start]
    best = 0.0 if n == 1 else np.inf
    for perm in itertools.permutations(rest):
        seq = (start,) + perm + (start,)
        best = min(best, sum(d[a][b] for a, b in zip(seq, seq[1:])))
    return best


def enum_open_path(d, start=0):
    n = len(d)
    rest = [v for v in range(n) if v != start]
    best = 0.0 if n == 1 else np.inf
    for perm in itertools.permutations(rest):
        seq = (start,) + perm
        best = min(best, sum(d[a][b] for a, b in zip(seq, seq[1:])))
    return best


def connected_subtree_costs(tree):
    """Minimum edge weight of a connected vertex set containing the start, per set size."""
    adj = {v: [] for v in range(tree.n)}
    for u, v, w in tree.edges:
        adj[u].append(v)
        adj[v].append(u)
    wt = {frozenset((u, v)): w for u, v, w in tree.edges}
    best = [np.inf] * (tree.n + 1)
    others = [v for v in range(tree.n) if v != tree.start]
    for r in range(tree.n):
        for sub in itertools.combinations(others, r):
            S = set(sub) | {tree.start}
            seen, stack = {tree.start}, [tree.start]
            while stack:
                u = stack.pop()
                for v in adj[u]:
                    if v in S and v not in seen:
                        seen.add(v)
                        stack.append(v)
            if len(seen) != len(S):
                continue
            cost = sum(w for e, w in wt.items() if e <= S)
            best[len(S)] = min(best[len(S)], cost)
    return best
