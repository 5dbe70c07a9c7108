"""
Extinction and persistence
==========================

From a fully occupied start the process dies within a few dozen steps when
p is small, and settles at a high density when p is close to 1. There is
nothing in between.
"""

import math

from threshold_cp.dynamics import OccupancyState, ProcessParams, plateau_density, run
from threshold_cp.graph_gen import GraphConfig, sample_simple_regular

g = sample_simple_regular(GraphConfig(2000, 4, seed=1))
full = OccupancyState.full(g.n)

for p in (0.2, 0.5, 0.7, 0.76, 0.78, 0.8, 0.9, 0.95):
    rec = run(g, full, ProcessParams(p=p, seed=11, t_max=2000))
    if rec.extinct:
        print(f"p={p:.2f}: extinct at t={rec.extinction_time:4d}  ({rec.extinction_time / math.log(g.n):.1f} log n)")
    else:
        plat = plateau_density(rec).value
        print(f"p={p:.2f}: alive after {rec.steps_run} steps, plateau density {plat:.3f}")

# Sharing the uniform stream couples different p: a larger p never has fewer
# occupied vertices.
lo = run(g, full, ProcessParams(p=0.77, seed=3, t_max=300))
hi = run(g, full, ProcessParams(p=0.79, seed=3, t_max=300))
n = min(lo.densities.size, hi.densities.size)
print("coupled runs ordered at every step:", bool((lo.densities[:n] <= hi.densities[:n]).all()))
