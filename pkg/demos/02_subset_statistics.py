"""
Neighbourhood statistics of vertex subsets
==========================================

For an occupied set U, only vertices with two neighbours in U can be
occupied next step. Here we look at how large that set can get.
"""

import numpy as np

from threshold_cp import isoperimetry as iso
from threshold_cp._rng import make_rng
from threshold_cp.graph_gen import GraphConfig, complete_graph, sample_simple_regular

k4 = complete_graph(4)
print("K4, U={0,1}:", iso.subset_stats(k4, [0, 1]))
print("K4, W={0,1,2}:", iso.vacancy_stats(k4, [0, 1, 2]))

g = sample_simple_regular(GraphConfig(10_000, 4, seed=7))
rng = make_rng(8)

# A BFS ball is close to a tree, so about r-2 edges leave it per vertex.
ball = iso.bfs_ball(g, 0, 3)
s = iso.subset_stats(g, ball)
print(f"radius-3 ball: m={s.m}, cross edges / m = {s.cross_edges / s.m:.2f}")

# Scattered subsets barely share neighbours; compact ones share many.
for name in ("uniform", "ball", "two_ball"):
    rep = iso.audit_events(g, 50, 0.5, name, 2000, rng)
    summ = rep.summary()
    print(f"{name:>8}: max |U*2|/m = {summ['max_star2_ratio']:.2f}, "
          f"min |U*1|/m = {summ['min_star1_ratio']:.2f}, "
          f"max blocked/m = {summ['max_blocked_ratio']:.2f}, "
          f"violations of |U*1|+|U*2| <= rm: {summ['ustar_violations']}")

# The identity behind the blocked set, checked on a random vacant set.
W = np.flatnonzero(rng.random(g.n) < 0.4)
v = iso.vacancy_stats(g, W)
print(f"|W|={v.m}: |W0|+|W1| = {v.w0 + v.w1} = blocked {v.blocked}")
