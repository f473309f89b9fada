"""Sweep the quality-distribution parameter and write the measure CSV.

One row per (x, beta, theta_max) grid point with the four critical
values for the model and the uncorrelated baseline plus the four
affected fractions -- the file format behind the package's plots and
the `qpanet sweep` command.
"""

import io

from qpanet import sweep, write_sweep_csv

rows = sweep(
    "exponential",
    x_grid=[0.25, 0.5, 0.75, 1.0, 1.25, 1.5],
    beta_list=[2, 8],
    theta_max_list=[8],
)

buf = io.StringIO()
write_sweep_csv(rows, buf)
print(buf.getvalue())

print("trends to look for:")
print(" - crit_q_mean / crit_q_median never drop as q grows")
print(" - frac_k_median <= frac_k_mean on every row")
print(" - at beta=8 the model criticals sit closer to the uncorrelated")
print("   ones than at beta=2: more links per node wash out the")
print("   quality-degree correlation")

with open("sweep_demo.csv", "w", encoding="utf-8") as fh:
    write_sweep_csv(rows, fh)
print("wrote sweep_demo.csv")
