"""
Exact solvers on small instances
================================

Branch and bound over permutations, the interval DP on a line and the
diameter-3 tree DP, all checked against each other.
"""

import numpy as np

from minlatency.core import LineInstance, gen_diameter3, gen_metric, line_to_metric, metric_closure, total_latency
from minlatency.exact import brute_force_mlt, brute_force_tsp, dp_diameter3, dp_line

# points at -3, 9 and -27 with the server at 0: zig-zagging outward is optimal
line = LineInstance((-3.0, 9.0, -27.0), 0.0)
r = dp_line(line)
print("line DP route", r.route, "total latency", r.value)
print("brute force agrees:", brute_force_mlt(line_to_metric(line)).value)

# random points in the unit square
m = gen_metric(8, seed=1)
best = brute_force_mlt(m)
print("\nEuclidean n=8: optimal latency %.4f via %s" % (best.value, best.route))
print("nodes explored with pruning %d, without %d" % (best.nodes, brute_force_mlt(m, prune=False).nodes))
print("a latency-optimal order is not a shortest tour: TSP %.4f" % brute_force_tsp(m))

# a diameter-3 tree: two hubs with spokes hanging off each
t = gen_diameter3(3, 2, seed=5)
r = dp_diameter3(t)
print("\ndiameter-3 tree, DP latency %.4f, brute force %.4f" % (r.value, brute_force_mlt(metric_closure(t)).value))
print("route", r.route, "check", np.isclose(total_latency(metric_closure(t), r.route), r.value))
