"""Acceptance criteria 1-11, each reported as one PASS/FAIL line.

Seeded sweeps at desk scale; every ratio is checked against an exact oracle.
"""
import time
import warnings

import numpy as np
import pytest

from conftest import connected_subtree_costs
from minlatency.approx import (
    DOUBLING_BOUND,
    EPSILON_BOUND,
    ApproximatorCall,
    greedy_negative_linear,
    line_doubling,
    mlt_approx_doubling,
    mlt_approx_epsilon,
    tdtsp_positive_linear,
    tsp_approximator,
)
from minlatency.core import (
    PreconditionError,
    TdtspCoefficients,
    TreeInstance,
    gen_diameter3,
    gen_line,
    gen_metric,
    gen_penalties,
    gen_tree,
    latency_profile,
    line_to_metric,
    metric_closure,
    tdtsp_cost,
    total_latency,
    walk_length,
)
from minlatency.exact import (
    MAX_BRUTE_N,
    best_dfs_value,
    brute_force_mlt,
    brute_force_tdtsp,
    brute_force_tsp,
    dfs_certificate,
    dfs_unweighted_tree,
    dp_diameter3,
    dp_line,
    max_latency,
    max_open_path,
    tree_depths,
)
from minlatency.ktree import itree_dp, itree_sum_bounds, mlt_from_itrees
from minlatency.pctsp import MAX_BRUTE_PCTSP_N, PctspInstance, brute_force_pctsp, gw_pctsp, subset_cycle_lengths

SEEDS = 500
TOL = 1e-9


def _sizes(seed, lo=2, hi=9):
    return lo + seed % (hi - lo + 1)


def _opt(m):
    return brute_force_mlt(m).value


def test_criterion_01_exact_solvers(report):
    bad = []
    for seed in range(SEEDS):
        l = gen_line(_sizes(seed, 1, 8), seed)
        if abs(dp_line(l).value - _opt(line_to_metric(l))) > TOL:
            bad.append(("line", seed))
        n = _sizes(seed, 2, 9)
        k = n - 2
        kL = seed % (k + 1)
        t = gen_diameter3(kL, k - kL, seed)
        t = TreeInstance(t.n, t.edges, seed % t.n)
        if abs(dp_diameter3(t).value - _opt(metric_closure(t))) > TOL:
            bad.append(("diam3", seed))
        u = gen_tree(n, seed, unit=True)
        if abs(dfs_unweighted_tree(u).value - _opt(metric_closure(u))) > TOL:
            bad.append(("dfs", seed))
    ok = not bad
    report(1, ok, f"dp_line, dp_diameter3, dfs == brute force on {SEEDS} instances each; mismatches={bad}")
    assert ok


def test_criterion_02_dfs_certificate(report):
    cert_bad = 0
    for seed in range(SEEDS):
        t = gen_tree(_sizes(seed, 1, 9), seed, unit=True)
        rows = dfs_certificate(t, dfs_unweighted_tree(t).route)
        cert_bad += sum(abs(lat - bound) > TOL for _, _, lat, bound in rows)
    rng = np.random.default_rng(2024)
    walk_bad = 0
    for case in range(1000):
        t = gen_tree(int(rng.integers(2, 10)), case, unit=True)
        adj = t.adjacency()
        depth = tree_depths(t)
        walk, seen = [t.start], {t.start}
        while len(seen) < t.n:
            v = adj[walk[-1]][int(rng.integers(len(adj[walk[-1]])))][0]
            walk.append(v)
            seen.add(v)
        for i, (v, lat) in enumerate(latency_profile(metric_closure(t), walk)):
            walk_bad += lat < 2 * i - depth[v] - TOL
    ok = cert_bad == 0 and walk_bad == 0
    report(2, ok, f"2i-depth certificate on {SEEDS} unit trees ({cert_bad} misses); "
                  f"lower bound on 1000 random walks ({walk_bad} misses)")
    assert ok


def test_criterion_03_weighted_counterexample(report):
    t = TreeInstance(5, ((0, 1, 1), (1, 2, 10), (0, 3, 1), (3, 4, 10)), 0)
    dfs, opt = best_dfs_value(t), brute_force_mlt(metric_closure(t))
    ok = dfs == 68 and opt.value == 52 and opt.route == (0, 1, 3, 4, 2)
    report(3, ok, f"pinned weighted tree: best DFS {dfs:g} > optimum {opt.value:g} via {opt.route}")
    assert ok


def test_criterion_04_itrees(report):
    dp_bad = 0
    for seed in range(SEEDS):
        t = gen_tree(_sizes(seed, 1, 12), seed)
        oracle = connected_subtree_costs(t)
        dp_bad += not np.allclose(itree_dp(t).cost[1:], oracle[1:], atol=TOL, rtol=0)
    sandwich_bad, worst = 0, 0.0
    for seed in range(SEEDS):
        t = gen_tree(_sizes(seed), seed)
        lower, upper, opt = itree_sum_bounds(t)
        sandwich_bad += not (lower - TOL <= opt <= upper + TOL)
        _, value = mlt_from_itrees(t)
        worst = max(worst, value / opt)
    ok = dp_bad == 0 and sandwich_bad == 0 and worst <= 8 + TOL
    report(4, ok, f"i-tree DP exact ({dp_bad} mismatches, n<=12); sandwich violations {sandwich_bad}; "
                  f"max mlt_from_itrees ratio {worst:.4f} <= 8")
    assert ok


def test_criterion_05_gw_pctsp(report):
    bad, worst = [], 0.0
    for seed in range(SEEDS):
        n = _sizes(seed)
        inst = PctspInstance(gen_metric(n, seed), gen_penalties(n, seed, high=[0.25, 0.5, 1.0, 2.0][seed % 4]))
        opt, gw = brute_force_pctsp(inst).cost, gw_pctsp(inst).cost
        bound = 2 - 1 / (n - 1) if n > 2 else 1.0
        ratio = gw / opt if opt > 0 else (1.0 if gw <= TOL else np.inf)
        worst = max(worst, ratio)
        if gw > bound * opt + TOL:
            bad.append(seed)
    ok = not bad
    report(5, ok, f"gw_pctsp <= (2-1/(n-1))*opt on {SEEDS} instances; max ratio {worst:.4f}; violations {bad}")
    assert ok


def test_criterion_06_approximator_contract(report):
    checked, bad = 0, []
    for seed in range(120):
        n = _sizes(seed, 2, 8)
        m = gen_metric(n, seed)
        cycles = subset_cycle_lengths(m)
        sizes = np.array([bin(s).count("1") for s in range(1 << n)])
        for k in range(n):
            # a tour of length L visiting n-k vertices exists; slack L values also satisfy the premise
            L0 = float(np.min(cycles[sizes >= n - k]))
            for L in (L0, 1.5 * L0):
                if L <= 0:
                    continue
                for call in (ApproximatorCall(epsilon=k / n, L=L), ApproximatorCall(L=L)):
                    out = tsp_approximator(m, call)
                    eps = k / n
                    checked += 1
                    if out.length > 6 * L + TOL or out.visited_count < (1 - 3 * eps) * n - TOL:
                        bad.append((seed, k, L))
                    if abs(walk_length(m, out.tour) - out.length) > TOL:
                        bad.append((seed, k, "length"))
    ok = not bad
    report(6, ok, f"(3,6) contract on {checked} premise pairs; violations {bad[:5]}")
    assert ok


@pytest.fixture(scope="module")
def euclid_suite():
    rows = []
    for seed in range(SEEDS):
        m = gen_metric(_sizes(seed), seed)
        rows.append((m, _opt(m), brute_force_tsp(m), mlt_approx_doubling(m), mlt_approx_epsilon(m)))
    return rows


def test_criterion_07_mlt_ratios(report, euclid_suite):
    r144 = [a.latency / opt for _, opt, _, a, _ in euclid_suite]
    r72 = [b.latency / opt for _, opt, _, _, b in euclid_suite]
    consistent = all(abs(total_latency(m, a.tour) - a.latency) <= TOL
                     and abs(total_latency(m, b.tour) - b.latency) <= TOL
                     for m, _, _, a, b in euclid_suite)
    ok = max(r144) <= DOUBLING_BOUND + TOL and max(r72) <= EPSILON_BOUND + TOL and consistent
    report(7, ok, f"{SEEDS} Euclidean n<=9: doubling max {max(r144):.4f} (mean {np.mean(r144):.4f}) <= 144; "
                  f"epsilon max {max(r72):.4f} (mean {np.mean(r72):.4f}) <= 72")
    assert ok


def test_criterion_08_tsp_and_tdtsp(report, euclid_suite):
    tsp_ratio = max(a.length / tsp for _, _, tsp, a, _ in euclid_suite)
    worst = {}
    for a, b in ((1, 0), (0, 1), (1, 1), (2, 3)):
        c = TdtspCoefficients(a, b)
        r = 0.0
        for m, *_ in euclid_suite:
            tour, cost = tdtsp_positive_linear(m, c)
            assert abs(cost - tdtsp_cost(m, tour, c)) <= 1e-7 * max(1.0, cost)
            r = max(r, cost / brute_force_tdtsp(m, c).value)
        worst[(a, b)] = r
    ok = tsp_ratio <= 24 + TOL and all(r <= DOUBLING_BOUND + TOL for r in worst.values())
    detail = ", ".join(f"{k}: {v:.3f}" for k, v in worst.items())
    report(8, ok, f"walk length / TSP max {tsp_ratio:.4f} <= 24; TDTSP max ratios {detail} <= 144")
    assert ok


def test_criterion_09_latency_identity(report):
    rng = np.random.default_rng(9)
    bad = 0
    for case in range(1000):
        n = int(rng.integers(1, 12))
        m = gen_metric(n, case)
        tour = [0] + [int(v) for v in rng.permutation(np.arange(1, n))]
        bad += abs(total_latency(m, tour) - tdtsp_cost(m, tour, TdtspCoefficients(1, 0))) > TOL
    ok = bad == 0
    report(9, ok, f"total_latency == tdtsp_cost(a=1,b=0) on 1000 random tours; mismatches {bad}")
    assert ok


def test_criterion_10_empirical_bounds(report):
    line_worst, line_find = 0.0, []
    for seed in range(SEEDS):
        l = gen_line(_sizes(seed, 1, 12), seed)
        _, value = line_doubling(l)
        opt = dp_line(l).value
        r = value / opt if opt > 0 else 1.0
        line_worst = max(line_worst, r)
        if r > 9 + TOL:
            line_find.append(seed)
    g_lat, g_len, greedy_find = 1.0, 1.0, []
    for seed in range(SEEDS):
        m = gen_metric(_sizes(seed), seed)
        _, lat, length = greedy_negative_linear(m)
        ml, mp = max_latency(m), max_open_path(m)
        g_lat, g_len = min(g_lat, lat / ml), min(g_len, length / mp)
        if lat < ml / 2 - TOL or length < mp / 2 - TOL:
            greedy_find.append(seed)
    for name, found in (("line_doubling > 9*opt", line_find), ("greedy < max/2", greedy_find)):
        if found:
            warnings.warn(f"empirical finding: {name} on seeds {found}")
    # warn-level: findings are reported, the criterion itself never fails
    report(10, True, f"(warn-level) line_doubling max ratio {line_worst:.4f} vs 9, findings {line_find}; "
                     f"greedy min latency ratio {g_lat:.4f}, min length ratio {g_len:.4f} vs 0.5, "
                     f"findings {greedy_find}")


def test_criterion_11_performance_and_caps(report):
    timings = {}
    t0 = time.perf_counter()
    dp_line(gen_line(2000, 0))
    timings["dp_line"] = time.perf_counter() - t0
    trees = {
        "random": gen_tree(2000, 0),
        "path": TreeInstance(2000, tuple((i, i + 1, 1.0) for i in range(1999)), 0),
        "star": TreeInstance(2000, tuple((0, i, 1.0 + i % 7) for i in range(1, 2000)), 0),
    }
    for name, t in trees.items():
        t0 = time.perf_counter()
        itree_dp(t)
        timings[f"itree_dp/{name}"] = time.perf_counter() - t0
    caps = []
    for fn, n in ((brute_force_mlt, MAX_BRUTE_N + 1), (brute_force_tsp, MAX_BRUTE_N + 1),
                  (lambda m: brute_force_tdtsp(m, TdtspCoefficients(1, 0)), MAX_BRUTE_N + 1),
                  (lambda m: brute_force_pctsp(PctspInstance(m, np.ones(m.n))), MAX_BRUTE_PCTSP_N + 1)):
        try:
            fn(gen_metric(n, 0))
            caps.append(False)
        except PreconditionError:
            caps.append(True)
    ok = all(v < 5 for v in timings.values()) and all(caps)
    detail = ", ".join(f"{k} {v:.2f}s" for k, v in timings.items())
    report(11, ok, f"n=2000: {detail} (limit 5s); brute-force caps enforced: {all(caps)}")
    assert ok
