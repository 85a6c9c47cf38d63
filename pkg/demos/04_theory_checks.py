"""Numerical checks of the inequalities used in the consistency argument.

Every check reports a margin (bound minus value, in log scale where the
bound is multiplicative); a negative margin beyond 1e-9 is a violation.
"""
import numpy as np

from dcsbm import Labels
from dcsbm.sweeps import all_sweeps, random_omega_network
from dcsbm.theory import (
    MergeMap, check_gamma_partition, check_ratio_bounds, identifiability_gap,
    merged_params, merging_functional,
)

print("Gamma partition bound for parts (3, 1, 4):", check_gamma_partition([3, 1, 4]))

rng = np.random.default_rng(0)
x = random_omega_network(6, rng)
z = Labels(rng.integers(0, 2, 6), 2)
for res in check_ratio_bounds(x, z):
    print(f"{res.name}: log ratio {res.value:.3f}, margin {res.margin:.3f}")

pi = np.array([0.5, 0.5])
lam = np.array([[2.0, 1.0], [1.0, 2.0]])
print("merging functional:", merging_functional(pi, lam))
print("after merging both blocks:", merging_functional(*merged_params(MergeMap((0, 0), 1), pi, lam)))
print("identifiability gap, distinct columns    :", identifiability_gap(pi, lam, 1))
print("identifiability gap, proportional columns:", identifiability_gap(pi, [[2, 2], [2, 2]], 1))

print()
for res in all_sweeps(seed=0, quick=True):
    print(res.line())
