"""Grow networks and check them against the closed forms.

The generative model is the ground truth for the analytics: every
arrival brings beta links and a random quality, and attaches to
existing nodes with probability proportional to degree + quality.
Token-list sampling makes a 200k-node network a sub-second affair,
so the closed-form joint distribution can be validated wholesale.
"""

import numpy as np

from qpanet import (
    ModelParams,
    build_joint_table,
    empirical_report,
    grow_qpa,
    grow_uniform,
    joint_histogram,
    make_exponential,
)

params = ModelParams(beta=2, quality=make_exponential(0.5, 4))
table = build_joint_table(params)

print("growing 5 networks of 200k nodes...")
pooled = {}
for seed in range(5):
    net = grow_qpa(200_000, params, seed)
    for key, v in joint_histogram(net).items():
        pooled[key] = pooled.get(key, 0.0) + v / 5

print()
print("empirical vs closed-form joint law (degree k, quality theta):")
print(" (k,th)   simulated   closed-form")
for k, th in [(2, 0), (2, 4), (3, 1), (5, 0), (10, 2), (20, 0)]:
    sim = pooled.get((k, th), 0.0)
    ana = table.probs[k - 2, th]
    print(f" ({k:>2},{th})   {sim:.6f}    {ana:.6f}")

tv = 0.0
for k in range(2, 21):
    for th in range(5):
        tv += 0.5 * abs(pooled.get((k, th), 0.0) - table.probs[k - 2, th])
print(f"total variation over k <= 20: {tv:.4f}")

print()
print("per-node paradox fractions, growth rule vs uniform attachment:")
net = grow_qpa(200_000, params, 99)
rep = empirical_report(net)
netu = grow_uniform(200_000, params, 99)
repu = empirical_report(netu)
print(f"            {'growth':>8} {'uniform':>8}")
print(f"mean FP:    {rep.frac_degree_mean:8.3f} {repu.frac_degree_mean:8.3f}")
print(f"median FP:  {rep.frac_degree_median:8.3f} {repu.frac_degree_median:8.3f}")
print(f"mean QP:    {rep.frac_quality_mean:8.3f} {repu.frac_quality_mean:8.3f}")
print(f"median QP:  {rep.frac_quality_median:8.3f} {repu.frac_quality_median:8.3f}")
print()
print("the degree paradoxes survive uniform attachment (any degree spread")
print("produces them) but are far stronger under preferential growth")
