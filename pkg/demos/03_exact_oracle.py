"""
Exact answers by enumerating every pairing
==========================================

For tiny graphs the pairing space is small enough to list, which gives exact
rational probabilities to test the samplers against.
"""

from threshold_cp import exact_oracle as ex

for u in (2, 4, 6, 12, 20):
    print(f"{u} half-edges: {ex.pairing_count(u)} pairings")

# Cross edges leaving U = {0, 1} in a 3-regular pairing on 4 vertices.
pmf = ex.exact_cross_edge_pmf(4, 3, 2)
for s, q in pmf.items():
    print(f"  P(e(U,U^c) = {s}) = {q}  ({float(q):.4f})")
print("mean", sum(s * q for s, q in pmf.items()), "=", ex.cross_edge_mean(4, 3, 2))

# Conditioned on simplicity: 2-regular graphs on 7 vertices are C7 or C3+C4.
q = ex.exact_event_probability(7, 2, 3, 3, "H")
print("P(some 3-set has only 3 neighbours | simple) =", q)

try:
    ex.enumerate_pairings(6, 3, lambda pairs: None)
except ex.BudgetExceeded as err:
    print("refused:", err)
