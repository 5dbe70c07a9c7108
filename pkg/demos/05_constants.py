"""
The analytic constants
======================

Most constants are ordinary numbers. The small-set thresholds are so small
that they are carried as mpmath values and reported through their logs.
"""

from threshold_cp import bounds

for p in (0.1, 0.2, 1 / 3, 0.5):
    print(f"p={p:.3f}: eta={bounds.eta_of_p(p):.5f}  C0={bounds.c0_of_p(p):.4f}")

print("beta(2, 1)   =", bounds.beta_root(2, 1))
print("beta(4, 0.1) =", bounds.beta_root(4, 0.1))

for r in (3, 4, 5):
    fit = bounds.delta2_fit(r)
    print(f"r={r}: Delta1={bounds.delta1(r):.4f}  Delta2={fit.value:.5f} at eta={fit.argmax:.4f}")

casc = bounds.epsilon_cascade(0.2, 4)
for name in ("eps5", "eps3", "eps4"):
    print(f"log10 {name}(0.2) = {casc.log10(name):.1f}")

print()
print(bounds.bounds_table(4, 1.0, eta=0.1).to_text())
