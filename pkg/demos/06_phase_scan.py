"""
A small phase scan
==================

Replicas on fresh graphs across a grid of p, then the survival bracket and
the plateau histogram. Surviving plateaus stay far from zero.
"""

import sys
import tempfile

from threshold_cp import harness

cfg = harness.ScanConfig(
    r=4, n_list=(500, 1000), p_grid=(0.6, 0.7, 0.74, 0.78, 0.82, 0.9),
    replicas=8, t_max=1000, master_seed=2024,
)
with tempfile.TemporaryDirectory() as out_dir:
    out = harness.run_scan(cfg, out_dir=out_dir)
    print(open(out.manifest_path).read())

for n, iv in harness.estimate_pc(out.results).items():
    print(f"n={n}: survival boundary in ({iv.p_lo}, {iv.p_hi}]")

rows = harness.gap_report(out.results)
print("smallest surviving plateau per n:", harness.pooled_gap_by_n(rows))
harness.write_gap_csv(rows, sys.stdout)
