"""
Prize-collecting TSP by moat growing
====================================

Raising penalties pulls more vertices into the tour. The primal-dual tour
stays within 2 - 1/(n-1) of the brute-force optimum.
"""

import numpy as np

from minlatency.core import gen_metric
from minlatency.pctsp import PctspInstance, brute_force_pctsp, gw_pctsp

m = gen_metric(9, seed=2)
base = np.random.default_rng(0).uniform(0, 1, 9)
base[0] = 0.0
for scale in (0.1, 0.5, 1.0, 3.0):
    inst = PctspInstance(m, scale * base)
    gw, opt = gw_pctsp(inst), brute_force_pctsp(inst)
    print("scale %.1f: gw visits %d cost %.4f | opt visits %d cost %.4f | ratio %.3f"
          % (scale, len(gw.visited), gw.cost, len(opt.visited), opt.cost, gw.cost / opt.cost))
