"""
Approximating minimum latency on a metric
=========================================

Partial tours from the (3,6)-approximator are chained with doubling
length budgets (or halving epsilon), then compared to brute force.
"""

from minlatency.approx import ApproximatorCall, mlt_approx_doubling, mlt_approx_epsilon, tsp_approximator
from minlatency.core import gen_metric
from minlatency.exact import brute_force_mlt, brute_force_tsp

m = gen_metric(9, seed=7)

# one approximator call: a budget of L covers part of the points
for L in (0.5, 1.0, 2.0):
    out = tsp_approximator(m, ApproximatorCall(L=L))
    print("L=%.1f: visits %d of %d, length %.3f (limit %.1f)" % (L, out.visited_count, m.n, out.length, 6 * L))

opt = brute_force_mlt(m).value
for name, fn in (("doubling", mlt_approx_doubling), ("epsilon", mlt_approx_epsilon)):
    out = fn(m)
    print("\n%s: latency %.4f, optimum %.4f, ratio %.3f" % (name, out.latency, opt, out.latency / opt))
    print("walk length %.3f vs TSP %.3f" % (out.length, brute_force_tsp(m)))
    for param, added, length in out.phase_log:
        print("  phase %-8.4g +%d vertices, length %.3f" % (param, added, length))
