"""
Depth-first search, its limits, and i-trees
===========================================

On unit-length trees any depth-first traversal is optimal. Weighted trees
break this, and the i-tree route gives a constant factor instead.
"""

import numpy as np

from minlatency.core import TreeInstance, gen_tree, metric_closure
from minlatency.exact import best_dfs_value, brute_force_mlt, dfs_certificate, dfs_unweighted_tree
from minlatency.ktree import itree_dp, itree_sum_bounds, mlt_from_itrees

# unit tree: the i-th new vertex is reached at time 2i - depth
t = gen_tree(8, seed=3, unit=True)
r = dfs_unweighted_tree(t)
print("DFS walk", r.route, "latency", r.value)
for i, v, lat, bound in dfs_certificate(t, r.route):
    print("  i=%d vertex %d latency %g  2i-depth %g" % (i, v, lat, bound))

# two long legs behind short edges: DFS has to finish one leg first
w = TreeInstance(5, ((0, 1, 1), (1, 2, 10), (0, 3, 1), (3, 4, 10)), 0)
opt = brute_force_mlt(metric_closure(w))
print("\nweighted tree: best DFS %g, optimum %g via %s" % (best_dfs_value(w), opt.value, opt.route))

# cheapest connected subtree through the root, for every size i
t = gen_tree(9, seed=0)
table = itree_dp(t)
print("\ni-tree costs", np.round(table.cost[1:], 3).tolist())
print("4-tree edges", table.witness(4))
lower, upper, opt = itree_sum_bounds(t)
walk, value = mlt_from_itrees(t)
print("sum of i-trees %.3f <= opt %.3f <= %.3f; concatenated walk %.3f (ratio %.3f)"
      % (lower, opt, upper, value, value / opt))
