"""
Sampling a uniform random regular graph
=======================================

Pair up half-edges uniformly at random, reject anything with loops or
repeated edges, and keep the first simple result.
"""

import io

from threshold_cp import graph_gen
from threshold_cp._rng import make_rng

# A raw pairing on 4 vertices of degree 3 is one of 10395 perfect matchings.
pairing = graph_gen.sample_pairing(4, 3, make_rng(0))
mg = graph_gen.pairing_to_multigraph(pairing)
print("pairing:", pairing.canonical())
print("loops:", mg.loop_count, " repeated edges:", mg.multi_edge_count)

# Only 1296 of those matchings are simple, and all of them give K4.
rate = graph_gen.acceptance_rate(4, 3, 20_000, make_rng(1))
print(f"acceptance rate {rate:.4f}  (exact {1296 / 10395:.4f})")

# Larger graphs: the attempt count grows roughly like exp((r^2 - 1)/4).
for r in (3, 4, 5):
    g = graph_gen.sample_simple_regular(graph_gen.GraphConfig(2000, r, seed=r))
    print(f"r={r}: n={g.n}, {len(g.edges())} edges, accepted after {g.attempts} attempts")

# Graphs round-trip through a plain edge-list format.
buf = io.StringIO()
graph_gen.write_graph(g, buf)
print(buf.getvalue().splitlines()[0])
assert graph_gen.read_graph(io.StringIO(buf.getvalue())) == g
