"""
Time-dependent costs, maximum latency and the line
==================================================

Positive-linear edge costs reuse the latency walk; the negative-linear
(maximization) case uses a farthest-first greedy. On the line a doubling
search walk is compared with the exact DP.
"""

from minlatency.approx import greedy_negative_linear, line_doubling, tdtsp_positive_linear
from minlatency.core import TdtspCoefficients, gen_line, gen_metric, line_to_metric
from minlatency.exact import brute_force_tdtsp, dp_line, max_latency, max_open_path

m = gen_metric(8, seed=4)
for a, b in ((1, 0), (0, 1), (2, 3)):
    for orient in ("positive-linear", "reversed-linear"):
        c = TdtspCoefficients(a, b, orient)
        tour, cost = tdtsp_positive_linear(m, c)
        print("a=%d b=%d %-15s cost %.4f optimum %.4f" % (a, b, orient, cost, brute_force_tdtsp(m, c).value))

tour, lat, length = greedy_negative_linear(m)
print("\ngreedy farthest-first: latency %.4f of max %.4f, length %.4f of max %.4f"
      % (lat, max_latency(m), length, max_open_path(m)))

l = gen_line(10, seed=3)
walk, value = line_doubling(l)
print("\nline doubling turns", [round(x, 2) for x in walk.turns])
print("latency %.3f vs DP optimum %.3f" % (value, dp_line(l).value))
print("line instance has %d vertices once the origin is added" % line_to_metric(l).n)
